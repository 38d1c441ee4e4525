#include "tempergrid/mc.hpp"

#include <cmath>

namespace tempergrid {

SweepState make_sweep_state(const EffectiveModel& view, SpinState spins) {
    SweepState state;
    state.spins = std::move(spins);
    refresh_sweep_state(view, state);
    return state;
}

void refresh_sweep_state(const EffectiveModel& view, SweepState& state) {
    state.local = local_fields(view.merged, state.spins);
    const EnergyBreakdown eb = energy_breakdown(view, state.spins);
    state.f = eb.f;
    state.g = eb.g;
}

void metropolis_sweep(const EffectiveModel& view, double beta,
                      SweepState& state, RngStream& rng) {
    const int n = view.merged.n_spins();
    for (int i = 0; i < n; ++i) {
        const double de =
            delta_energy_flip(view.merged, state.spins, i, state.local);
        const double u = rng.uniform01();
        if (de <= 0.0 || u < std::exp(-beta * de)) {
            const double dg = view.constraints.delta_flip(state.spins, i);
            apply_flip(view.merged, state.spins, i, state.local);
            state.f += de - view.penalty * dg;
            state.g += dg;
        }
    }
}

}  // namespace tempergrid
