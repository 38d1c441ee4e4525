#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempergrid/constraints.hpp"
#include "tempergrid/mc.hpp"
#include "tempergrid/schedule.hpp"

namespace tempergrid {

// min(1, exp(beta * dP * dg)): exchange along the penalty axis at common
// beta, dP = P_{j+1} - P_j, dg = g_{j+1} - g_j.
double p_swap_probability(double beta, double d_penalty, double dg);

// min(1, exp(dBeta * dE)): exchange along the temperature axis at common
// penalty, dBeta = beta_{i+1} - beta_i, dE = E_{i+1} - E_i with E = f + P*g.
double beta_swap_probability(double d_beta, double d_energy);

// min(1, exp(betaA * dEA + betaB * dEB)) with dEA = E_A(S_A) - E_A(S_B) and
// dEB = E_B(S_B) - E_B(S_A); covers both special cases above.
double general_swap_probability(double beta_a, double beta_b, double de_a,
                                double de_b);

struct RunConfig {
    std::int64_t total_sweeps = 0;
    std::int64_t sweeps_per_swap = 1;
    std::uint64_t seed = 1;
    bool store_target_only = true;
    int threads = 1;
};

// One swap round's view of the run. f/g/state describe the target replica
// (largest beta, largest penalty). Acceptance rates are cumulative up to
// this round: per (row, column-pair) row-major for the P direction, per
// (row-pair, column) row-major for the beta direction. grid holds every
// replica's configuration when store_target_only is off.
struct TraceRecord {
    std::int64_t round = 0;  // 1-based
    std::int64_t sweep_count = 0;
    double f = 0.0;
    double g = 0.0;
    bool feasible = false;
    SpinState state;
    std::vector<double> acceptance_rates_p;
    std::vector<double> acceptance_rates_beta;
    std::vector<SpinState> grid;
};

struct Trace {
    std::vector<double> betas;
    std::vector<double> penalties;
    std::int64_t sweeps_per_swap = 1;
    std::vector<TraceRecord> records;
};

// Alternating-phase replica-grid run. Rounds alternate the swap direction
// every two rounds; the attempted-pair parity alternates every round. A
// single-row grid swaps along P every round, a single-column grid along
// beta every round, and a 1x1 grid never swaps.
Trace run_2dpt(const ConstrainedProblem& problem, const Schedule& schedule,
               const RunConfig& cfg);

// One round of the resource-matched baseline: best feasible cold-replica
// cost energy across the J independent repeats (f is NaN when no repeat was
// feasible that round).
struct BaselineRecord {
    std::int64_t round = 0;
    std::int64_t sweep_count = 0;
    double best_f = 0.0;
    bool any_feasible = false;
    int n_feasible = 0;
    int n_total = 0;
};

struct BaselineTrace {
    std::vector<double> betas;
    double penalty = 0.0;
    std::int64_t sweeps_per_swap = 1;
    std::vector<BaselineRecord> records;
    double feasible_fraction = 0.0;
};

// Standard PT (beta swaps only) at fixed penalty, repeated j_repeats times
// with independent seeds and merged per round.
BaselineTrace run_jcolumn_pt(const ConstrainedProblem& problem,
                             const std::vector<double>& betas,
                             double p_fixed, int j_repeats,
                             const RunConfig& cfg);

// Run-length encoding used by the trace files: each entry's magnitude is a
// run length, its sign the spin value.
std::vector<int> rle_encode(const SpinState& state);
SpinState rle_decode(const std::vector<int>& runs);

std::string trace_record_to_json_line(const TraceRecord& record);
std::string trace_to_jsonl(const Trace& trace);
void save_trace(const Trace& trace, const std::string& path);
Trace load_trace(const std::string& path);

}  // namespace tempergrid
