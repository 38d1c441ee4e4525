#pragma once

#include "tempergrid/constraints.hpp"
#include "tempergrid/ising.hpp"
#include "tempergrid/rng.hpp"

namespace tempergrid {

// One replica's configuration plus the caches a sweep needs. local is the
// merged-model field cache (penalty-dependent); f and g are the cost and
// constraint values of spins (penalty-independent, so they travel with the
// configuration on swaps).
struct SweepState {
    SpinState spins;
    LocalFields local;
    double f = 0.0;
    double g = 0.0;
};

SweepState make_sweep_state(const EffectiveModel& view, SpinState spins);

// Recompute all caches from the spins (after a cross-penalty exchange, or
// periodically to cut float drift).
void refresh_sweep_state(const EffectiveModel& view, SweepState& state);

// One Metropolis pass in sequential index order: each spin's flip is
// accepted with probability min(1, exp(-beta * dE_total)). Exactly one
// uniform draw per proposal regardless of outcome.
void metropolis_sweep(const EffectiveModel& view, double beta,
                      SweepState& state, RngStream& rng);

}  // namespace tempergrid
