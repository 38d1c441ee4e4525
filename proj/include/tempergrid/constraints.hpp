#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tempergrid/ising.hpp"

namespace tempergrid {

// Equality constraints: each pair (a, b) contributes (S_a - S_b)^2 to g.
// Values are integers in {0, 4, 8, ..., 4m}.
class ConstraintSet {
public:
    ConstraintSet() = default;
    ConstraintSet(int n_spins, std::vector<std::pair<int, int>> pairs);

    const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
    int count() const { return static_cast<int>(pairs_.size()); }
    bool empty() const { return pairs_.empty(); }

    // Spins paired with spin i by some constraint.
    std::span<const int> partners(int i) const {
        return {partners_.data() + offsets_[i],
                partners_.data() + offsets_[i + 1]};
    }
    int chain_degree(int i) const { return offsets_[i + 1] - offsets_[i]; }

    double evaluate(const SpinState& state) const;

    // g change of flipping spin i (state is the pre-flip configuration).
    double delta_flip(const SpinState& state, int i) const {
        double d = 0.0;
        for (int b : partners(i))
            d += 4.0 * static_cast<double>(state[i]) * static_cast<double>(state[b]);
        return d;
    }

private:
    std::vector<std::pair<int, int>> pairs_;
    std::vector<int> offsets_;
    std::vector<int> partners_;
};

struct ConstrainedProblem {
    IsingModel cost;
    ConstraintSet constraints;
};

// How a logical model was spread over copy-node chains.
struct SparsificationMap {
    int n_logical = 0;
    int n_physical = 0;
    std::vector<std::vector<int>> copies;          // per logical node, chain order
    struct EdgePlacement {
        int u, v;              // logical endpoints
        int u_phys, v_phys;    // chosen physical copies
    };
    std::vector<EdgePlacement> edges;
};

struct SparsifyResult {
    ConstrainedProblem problem;
    SparsificationMap map;
};

// Split each logical node into a chain of copies_per_node physical spins,
// assign each logical coupling to copies with spare degree budget, and add
// chain equality constraints. Physical degree (cost + chain edges) stays
// <= max_degree. copies_per_node = 1 returns the input unchanged.
SparsifyResult sparsify(const IsingModel& logical, int copies_per_node,
                        int max_degree);

// Cost model with every constraint pair merged in as a ferromagnetic
// coupling of strength 2P. energy(merged) + offset = f + P*g exactly.
struct EffectiveModel {
    IsingModel merged;
    ConstraintSet constraints;
    double penalty = 0.0;
    double offset = 0.0;
};

EffectiveModel build_effective(const ConstrainedProblem& problem, double penalty);

inline double energy_effective(const EffectiveModel& view, const SpinState& state) {
    return energy(view.merged, state) + view.offset;
}

EnergyBreakdown energy_breakdown(const EffectiveModel& view, const SpinState& state);

struct DecodedState {
    SpinState logical;
    bool feasible = true;
};

// Majority vote over each node's copies, ties to the first copy in chain
// order. feasible is true iff every chain pair is aligned.
DecodedState decode(const SparsificationMap& map, const SpinState& physical);

// Map file round-trip (written next to the physical model for audit).
SparsificationMap map_from_json_text(const std::string& text);
std::string map_to_json_text(const SparsificationMap& map);
SparsificationMap load_map(const std::string& path);
void save_map(const SparsificationMap& map, const std::string& path);

}  // namespace tempergrid
