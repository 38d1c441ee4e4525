#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "tempergrid/rng.hpp"

namespace tempergrid {

using Spin = std::int8_t;  // -1 or +1

// Spin configuration of a fixed-size system. Entries are exactly -1 or +1.
using SpinState = std::vector<Spin>;

SpinState random_state(int n_spins, RngStream& rng);

// One coupling J_ij with i < j. Each unordered pair appears once.
struct Coupling {
    int i;
    int j;
    double weight;
};

struct Neighbor {
    int index;
    double weight;
};

// Cost Hamiltonian E(S) = -sum_{i<j} J_ij S_i S_j - sum_i h_i S_i.
// Couplings are kept both as the canonical (i<j) list and as per-spin
// neighbor lists so that flip deltas cost O(degree).
class IsingModel {
public:
    IsingModel() = default;
    IsingModel(int n_spins, std::vector<Coupling> couplings,
               std::vector<double> fields);

    int n_spins() const { return n_; }
    const std::vector<Coupling>& couplings() const { return couplings_; }
    const std::vector<double>& fields() const { return fields_; }

    std::span<const Neighbor> neighbors(int i) const {
        return {adjacency_.data() + offsets_[i],
                adjacency_.data() + offsets_[i + 1]};
    }
    int degree(int i) const { return offsets_[i + 1] - offsets_[i]; }
    int max_degree() const;

private:
    int n_ = 0;
    std::vector<Coupling> couplings_;
    std::vector<double> fields_;
    std::vector<int> offsets_;
    std::vector<Neighbor> adjacency_;
};

// f and g of one configuration; total energy at penalty P is f + P*g.
struct EnergyBreakdown {
    double f = 0.0;
    double g = 0.0;
    double total(double penalty) const { return f + penalty * g; }
};

double energy(const IsingModel& model, const SpinState& state);

// local[i] = sum_j J_ij S_j + h_i. Kept incrementally during sweeps.
using LocalFields = std::vector<double>;

LocalFields local_fields(const IsingModel& model, const SpinState& state);

// Energy change of flipping spin i, given a cache consistent with state.
inline double delta_energy_flip(const IsingModel& /*model*/,
                                const SpinState& state, int i,
                                const LocalFields& local) {
    return 2.0 * static_cast<double>(state[i]) * local[i];
}

// Flip spin i and update the cache of its neighbors.
void apply_flip(const IsingModel& model, SpinState& state, int i,
                LocalFields& local);

// Model file round-trip. Format:
//   { "n": int, "couplings": [[i, j, J_ij], ...], "fields": [h_0, ...] }
// Indices 0-based; duplicates, self-loops, and out-of-range indices rejected.
IsingModel model_from_json_text(const std::string& text);
std::string model_to_json_text(const IsingModel& model);
IsingModel load_model(const std::string& path);
void save_model(const IsingModel& model, const std::string& path);

}  // namespace tempergrid
