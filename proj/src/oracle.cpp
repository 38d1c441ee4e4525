#include "tempergrid/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "tempergrid/errors.hpp"

namespace tempergrid {

using nlohmann::json;

std::uint64_t encode_state(const SpinState& state) {
    std::uint64_t enc = 0;
    for (std::size_t i = 0; i < state.size(); ++i)
        if (state[i] > 0) enc |= std::uint64_t{1} << i;
    return enc;
}

SpinState decode_state(int n_spins, std::uint64_t encoding) {
    SpinState state(n_spins);
    for (int i = 0; i < n_spins; ++i)
        state[i] = (encoding >> i) & 1 ? Spin{1} : Spin{-1};
    return state;
}

Histogram histogram_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw config_error("histogram: malformed JSON");
    Histogram hist;
    try {
        hist.n = j.at("n").get<int>();
        for (const auto& [key, value] : j.at("counts").items())
            hist.counts[std::stoull(key)] = value.get<std::uint64_t>();
        hist.total = j.at("total").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw config_error(std::string("histogram: ") + e.what());
    }
    std::uint64_t sum = 0;
    for (const auto& [enc, cnt] : hist.counts) sum += cnt;
    if (sum != hist.total)
        throw config_error("histogram: counts do not sum to total");
    return hist;
}

std::string histogram_to_json_text(const Histogram& hist) {
    json counts = json::object();
    for (const auto& [enc, cnt] : hist.counts)
        counts[std::to_string(enc)] = cnt;
    json j;
    j["n"] = hist.n;
    j["counts"] = counts;
    j["total"] = hist.total;
    return j.dump(2) + "\n";
}

Histogram load_histogram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open histogram file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return histogram_from_json_text(buf.str());
}

void save_histogram(const Histogram& hist, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write histogram file: " + path);
    out << histogram_to_json_text(hist);
}

namespace {

void check_size(int n) {
    if (n > kMaxEnumerationSpins)
        throw resource_error("exact enumeration refused for " +
                             std::to_string(n) + " spins (limit " +
                             std::to_string(kMaxEnumerationSpins) + ")");
}

// Total energy and g of every state, by encoding.
struct EnumeratedEnergies {
    std::vector<double> energy;
    std::vector<double> g;
};

EnumeratedEnergies enumerate_energies(const IsingModel& model,
                                      const ConstraintSet* constraints,
                                      double penalty) {
    check_size(model.n_spins());
    const std::uint64_t count = std::uint64_t{1} << model.n_spins();
    EnumeratedEnergies out;
    out.energy.resize(count);
    out.g.assign(count, 0.0);
    for (std::uint64_t enc = 0; enc < count; ++enc) {
        const SpinState state = decode_state(model.n_spins(), enc);
        double e = energy(model, state);
        if (constraints != nullptr) {
            out.g[enc] = constraints->evaluate(state);
            e += penalty * out.g[enc];
        }
        out.energy[enc] = e;
    }
    return out;
}

ExactDistribution boltzmann_from_energies(const std::vector<double>& energies,
                                          double beta) {
    ExactDistribution dist;
    dist.beta = beta;
    dist.probabilities.resize(energies.size());
    double max_log = -std::numeric_limits<double>::infinity();
    for (double e : energies) max_log = std::max(max_log, -beta * e);
    double sum = 0.0;
    for (std::size_t s = 0; s < energies.size(); ++s) {
        dist.probabilities[s] = std::exp(-beta * energies[s] - max_log);
        sum += dist.probabilities[s];
    }
    dist.log_partition = max_log + std::log(sum);
    for (auto& p : dist.probabilities) p /= sum;
    return dist;
}

GroundState ground_from_energies(int n_spins,
                                 const std::vector<double>& energies) {
    std::uint64_t best = 0;
    for (std::uint64_t enc = 1; enc < energies.size(); ++enc)
        if (energies[enc] < energies[best]) best = enc;
    return {decode_state(n_spins, best), energies[best]};
}

ExactMoments moments_from_energies(const EnumeratedEnergies& ee, double beta) {
    const ExactDistribution dist = boltzmann_from_energies(ee.energy, beta);
    ExactMoments m;
    double e2 = 0.0, g2 = 0.0;
    for (std::size_t s = 0; s < ee.energy.size(); ++s) {
        const double p = dist.probabilities[s];
        m.mean_e += p * ee.energy[s];
        e2 += p * ee.energy[s] * ee.energy[s];
        m.mean_g += p * ee.g[s];
        g2 += p * ee.g[s] * ee.g[s];
    }
    m.var_e = std::max(0.0, e2 - m.mean_e * m.mean_e);
    m.var_g = std::max(0.0, g2 - m.mean_g * m.mean_g);
    return m;
}

}  // namespace

ExactDistribution enumerate_boltzmann(const IsingModel& model, double beta) {
    return boltzmann_from_energies(
        enumerate_energies(model, nullptr, 0.0).energy, beta);
}

ExactDistribution enumerate_boltzmann(const EffectiveModel& view, double beta) {
    // Merged couplings already include the penalty term; only the constant
    // offset is missing from plain energy evaluation.
    auto ee = enumerate_energies(view.merged, nullptr, 0.0);
    for (auto& e : ee.energy) e += view.offset;
    return boltzmann_from_energies(ee.energy, beta);
}

GroundState exact_ground_state(const IsingModel& model) {
    return ground_from_energies(
        model.n_spins(), enumerate_energies(model, nullptr, 0.0).energy);
}

GroundState exact_ground_state(const EffectiveModel& view) {
    auto ee = enumerate_energies(view.merged, nullptr, 0.0);
    for (auto& e : ee.energy) e += view.offset;
    return ground_from_energies(view.merged.n_spins(), ee.energy);
}

double kl_divergence(const Histogram& empirical, const ExactDistribution& exact) {
    if (empirical.total == 0)
        throw config_error("kl: empty histogram");
    const std::uint64_t n_states = exact.probabilities.size();
    double kl = 0.0;
    for (const auto& [enc, cnt] : empirical.counts) {
        if (cnt == 0) continue;
        if (enc >= n_states)
            throw config_error("kl: histogram encoding out of range");
        const double p_hat =
            static_cast<double>(cnt) / static_cast<double>(empirical.total);
        const double p = exact.probabilities[enc];
        if (p <= 0.0)
            throw config_error("kl: target has zero mass on an observed state");
        kl += p_hat * std::log(p_hat / p);
    }
    return kl;
}

double expected_kl_bias(std::int64_t k, std::int64_t t) {
    if (k < 2 || t < 1) throw config_error("kl bias: need k >= 2 and t >= 1");
    return static_cast<double>(k - 1) / (2.0 * static_cast<double>(t));
}

ExactMoments exact_moments(const IsingModel& model, double beta) {
    return moments_from_energies(enumerate_energies(model, nullptr, 0.0), beta);
}

ExactMoments exact_moments(const EffectiveModel& view, double beta) {
    auto ee = enumerate_energies(view.merged, nullptr, 0.0);
    for (auto& e : ee.energy) e += view.offset;
    // g is still needed separately for probe statistics.
    for (std::uint64_t enc = 0; enc < ee.energy.size(); ++enc)
        ee.g[enc] = view.constraints.evaluate(
            decode_state(view.merged.n_spins(), enc));
    return moments_from_energies(ee, beta);
}

}  // namespace tempergrid
