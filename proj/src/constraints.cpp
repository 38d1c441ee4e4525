#include "tempergrid/constraints.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tempergrid/errors.hpp"

namespace tempergrid {

using nlohmann::json;

ConstraintSet::ConstraintSet(int n_spins, std::vector<std::pair<int, int>> pairs)
    : pairs_(std::move(pairs)) {
    for (auto& [a, b] : pairs_) {
        if (a == b) throw config_error("constraint: pair on a single spin " +
                                       std::to_string(a));
        if (a > b) std::swap(a, b);
        if (a < 0 || b >= n_spins)
            throw config_error("constraint: index out of range: (" +
                               std::to_string(a) + ", " + std::to_string(b) + ")");
    }
    std::vector<int> degree(n_spins, 0);
    for (const auto& [a, b] : pairs_) {
        ++degree[a];
        ++degree[b];
    }
    offsets_.assign(n_spins + 1, 0);
    for (int i = 0; i < n_spins; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    partners_.resize(offsets_[n_spins]);
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& [a, b] : pairs_) {
        partners_[cursor[a]++] = b;
        partners_[cursor[b]++] = a;
    }
}

double ConstraintSet::evaluate(const SpinState& state) const {
    double g = 0.0;
    for (const auto& [a, b] : pairs_) {
        const double d = static_cast<double>(state[a]) - static_cast<double>(state[b]);
        g += d * d;
    }
    return g;
}

SparsifyResult sparsify(const IsingModel& logical, int copies_per_node,
                        int max_degree) {
    if (copies_per_node < 1)
        throw config_error("sparsify: copies_per_node must be >= 1");

    const int n = logical.n_spins();
    if (copies_per_node == 1) {
        SparsificationMap map;
        map.n_logical = n;
        map.n_physical = n;
        map.copies.resize(n);
        for (int u = 0; u < n; ++u) map.copies[u] = {u};
        for (const auto& c : logical.couplings())
            map.edges.push_back({c.i, c.j, c.i, c.j});
        return {{logical, ConstraintSet(n, {})}, std::move(map)};
    }

    if (max_degree < 3)
        throw config_error("sparsify: max_degree must be >= 3 with copy chains");

    const int c = copies_per_node;
    auto chain_degree = [&](int k) { return (k == 0 || k == c - 1) ? 1 : 2; };

    SparsificationMap map;
    map.n_logical = n;
    map.n_physical = n * c;
    map.copies.resize(n);
    std::vector<std::vector<int>> budget(n, std::vector<int>(c));
    for (int u = 0; u < n; ++u) {
        for (int k = 0; k < c; ++k) {
            map.copies[u].push_back(u * c + k);
            budget[u][k] = max_degree - chain_degree(k);
        }
    }

    auto place = [&](int u) {
        int best = -1;
        for (int k = 0; k < c; ++k)
            if (best < 0 || budget[u][k] > budget[u][best]) best = k;
        if (budget[u][best] <= 0)
            throw config_error("sparsify: degree cap " +
                               std::to_string(max_degree) +
                               " too small for node " + std::to_string(u));
        --budget[u][best];
        return u * c + best;
    };

    std::vector<Coupling> couplings;
    for (const auto& edge : logical.couplings()) {
        const int pu = place(edge.i);
        const int pv = place(edge.j);
        couplings.push_back({pu, pv, edge.weight});
        map.edges.push_back({edge.i, edge.j, pu, pv});
    }

    std::vector<double> fields(n * c, 0.0);
    for (int u = 0; u < n; ++u) fields[u * c] = logical.fields()[u];

    std::vector<std::pair<int, int>> pairs;
    for (int u = 0; u < n; ++u)
        for (int k = 0; k + 1 < c; ++k)
            pairs.emplace_back(u * c + k, u * c + k + 1);

    IsingModel physical(n * c, std::move(couplings), std::move(fields));
    ConstraintSet constraints(n * c, std::move(pairs));
    for (int i = 0; i < physical.n_spins(); ++i)
        if (physical.degree(i) + constraints.chain_degree(i) > max_degree)
            throw config_error("sparsify: degree cap violated at physical spin " +
                               std::to_string(i));
    return {{std::move(physical), std::move(constraints)}, std::move(map)};
}

EffectiveModel build_effective(const ConstrainedProblem& problem, double penalty) {
    if (penalty < 0.0)
        throw config_error("build_effective: penalty must be >= 0");
    std::map<std::pair<int, int>, double> weights;
    for (const auto& c : problem.cost.couplings())
        weights[{c.i, c.j}] += c.weight;
    for (auto [a, b] : problem.constraints.pairs()) {
        if (a > b) std::swap(a, b);
        weights[{a, b}] += 2.0 * penalty;
    }
    std::vector<Coupling> merged;
    merged.reserve(weights.size());
    for (const auto& [pair, w] : weights)
        merged.push_back({pair.first, pair.second, w});
    return {IsingModel(problem.cost.n_spins(), std::move(merged),
                       problem.cost.fields()),
            problem.constraints, penalty,
            2.0 * penalty * problem.constraints.count()};
}

EnergyBreakdown energy_breakdown(const EffectiveModel& view, const SpinState& state) {
    EnergyBreakdown out;
    out.g = view.constraints.evaluate(state);
    out.f = energy_effective(view, state) - view.penalty * out.g;
    return out;
}

DecodedState decode(const SparsificationMap& map, const SpinState& physical) {
    DecodedState out;
    out.logical.resize(map.n_logical);
    for (int u = 0; u < map.n_logical; ++u) {
        const auto& chain = map.copies[u];
        int sum = 0;
        for (int p : chain) sum += physical[p];
        out.logical[u] = sum != 0 ? (sum > 0 ? Spin{1} : Spin{-1})
                                  : physical[chain.front()];
        for (std::size_t k = 0; k + 1 < chain.size(); ++k)
            if (physical[chain[k]] != physical[chain[k + 1]]) out.feasible = false;
    }
    return out;
}

SparsificationMap map_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw config_error("map: malformed JSON");
    SparsificationMap map;
    try {
        map.n_logical = j.at("n_logical").get<int>();
        map.n_physical = j.at("n_physical").get<int>();
        map.copies = j.at("copies").get<std::vector<std::vector<int>>>();
        for (const auto& e : j.at("edges")) {
            if (!e.is_array() || e.size() != 4)
                throw config_error(
                    "map: edge entries must be [u, v, u_phys, v_phys]");
            map.edges.push_back({e[0].get<int>(), e[1].get<int>(),
                                 e[2].get<int>(), e[3].get<int>()});
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("map: ") + e.what());
    }
    return map;
}

std::string map_to_json_text(const SparsificationMap& map) {
    json j;
    j["n_logical"] = map.n_logical;
    j["n_physical"] = map.n_physical;
    j["copies"] = map.copies;
    j["edges"] = json::array();
    for (const auto& e : map.edges)
        j["edges"].push_back({e.u, e.v, e.u_phys, e.v_phys});
    return j.dump(2) + "\n";
}

SparsificationMap load_map(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open map file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return map_from_json_text(buf.str());
}

void save_map(const SparsificationMap& map, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write map file: " + path);
    out << map_to_json_text(map);
}

}  // namespace tempergrid
