#include "tempergrid/ising.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "tempergrid/errors.hpp"

namespace tempergrid {

using nlohmann::json;

SpinState random_state(int n_spins, RngStream& rng) {
    SpinState state(n_spins);
    for (auto& s : state) s = rng.spin();
    return state;
}

IsingModel::IsingModel(int n_spins, std::vector<Coupling> couplings,
                       std::vector<double> fields)
    : n_(n_spins), couplings_(std::move(couplings)), fields_(std::move(fields)) {
    if (n_ <= 0) throw config_error("model: n_spins must be positive");
    if (static_cast<int>(fields_.size()) != n_)
        throw config_error("model: fields length " +
                           std::to_string(fields_.size()) + " != n " +
                           std::to_string(n_));
    for (auto& c : couplings_) {
        if (c.i == c.j)
            throw config_error("model: self-loop on spin " + std::to_string(c.i));
        if (c.i > c.j) std::swap(c.i, c.j);
        if (c.i < 0 || c.j >= n_)
            throw config_error("model: coupling index out of range: (" +
                               std::to_string(c.i) + ", " + std::to_string(c.j) +
                               ")");
    }
    std::sort(couplings_.begin(), couplings_.end(),
              [](const Coupling& a, const Coupling& b) {
                  return a.i != b.i ? a.i < b.i : a.j < b.j;
              });
    for (std::size_t k = 1; k < couplings_.size(); ++k)
        if (couplings_[k - 1].i == couplings_[k].i &&
            couplings_[k - 1].j == couplings_[k].j)
            throw config_error("model: duplicate coupling (" +
                               std::to_string(couplings_[k].i) + ", " +
                               std::to_string(couplings_[k].j) + ")");

    std::vector<int> degree(n_, 0);
    for (const auto& c : couplings_) {
        ++degree[c.i];
        ++degree[c.j];
    }
    offsets_.assign(n_ + 1, 0);
    for (int i = 0; i < n_; ++i) offsets_[i + 1] = offsets_[i] + degree[i];
    adjacency_.resize(offsets_[n_]);
    std::vector<int> cursor(offsets_.begin(), offsets_.end() - 1);
    for (const auto& c : couplings_) {
        adjacency_[cursor[c.i]++] = {c.j, c.weight};
        adjacency_[cursor[c.j]++] = {c.i, c.weight};
    }
}

int IsingModel::max_degree() const {
    int best = 0;
    for (int i = 0; i < n_; ++i) best = std::max(best, degree(i));
    return best;
}

double energy(const IsingModel& model, const SpinState& state) {
    double e = 0.0;
    for (const auto& c : model.couplings())
        e -= c.weight * state[c.i] * state[c.j];
    const auto& h = model.fields();
    for (int i = 0; i < model.n_spins(); ++i) e -= h[i] * state[i];
    return e;
}

LocalFields local_fields(const IsingModel& model, const SpinState& state) {
    LocalFields local(model.n_spins());
    for (int i = 0; i < model.n_spins(); ++i) {
        double sum = model.fields()[i];
        for (const auto& nb : model.neighbors(i))
            sum += nb.weight * state[nb.index];
        local[i] = sum;
    }
    return local;
}

void apply_flip(const IsingModel& model, SpinState& state, int i,
                LocalFields& local) {
    state[i] = -state[i];
    const double two_si = 2.0 * static_cast<double>(state[i]);
    for (const auto& nb : model.neighbors(i))
        local[nb.index] += two_si * nb.weight;
}

namespace {

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded())
        throw config_error(std::string(what) + ": malformed JSON");
    return j;
}

}  // namespace

IsingModel model_from_json_text(const std::string& text) {
    json j = parse_json(text, "model");
    if (!j.is_object() || !j.contains("n") || !j.contains("couplings") ||
        !j.contains("fields"))
        throw config_error("model: expected object with n, couplings, fields");
    if (!j["n"].is_number_integer())
        throw config_error("model: n must be an integer");
    const int n = j["n"].get<int>();
    std::vector<Coupling> couplings;
    for (const auto& entry : j["couplings"]) {
        if (!entry.is_array() || entry.size() != 3 ||
            !entry[0].is_number_integer() || !entry[1].is_number_integer() ||
            !entry[2].is_number())
            throw config_error("model: coupling entries must be [i, j, J]");
        couplings.push_back({entry[0].get<int>(), entry[1].get<int>(),
                             entry[2].get<double>()});
    }
    std::vector<double> fields;
    for (const auto& h : j["fields"]) {
        if (!h.is_number()) throw config_error("model: fields must be numbers");
        fields.push_back(h.get<double>());
    }
    return IsingModel(n, std::move(couplings), std::move(fields));
}

std::string model_to_json_text(const IsingModel& model) {
    json j;
    j["n"] = model.n_spins();
    j["couplings"] = json::array();
    for (const auto& c : model.couplings())
        j["couplings"].push_back({c.i, c.j, c.weight});
    j["fields"] = model.fields();
    return j.dump(2) + "\n";
}

IsingModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open model file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str());
}

void save_model(const IsingModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write model file: " + path);
    out << model_to_json_text(model);
}

}  // namespace tempergrid
