#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tempergrid/constraints.hpp"
#include "tempergrid/engine.hpp"
#include "tempergrid/oracle.hpp"

namespace tempergrid {

struct ResidualPoint {
    std::int64_t t = 0;  // sweeps
    double rho_e = 0.0;
    double ci95 = 0.0;
};

struct ResidualCurve {
    int n_logical = 0;
    std::vector<ResidualPoint> points;
    int trials = 0;
    int instances = 0;
    bool degenerate_ci = false;  // set with a single run (CI width is zero)
};

// One run's contribution: a trace plus its instance's ground-state energy.
struct ResidualInput {
    const Trace* trace = nullptr;
    double e_gs = 0.0;
    int instance_id = 0;
};

// rho_E(t) = (E(t) - E_gs) / n_logical averaged over runs with a bootstrap
// 95% CI. E(t) is the stored state's cost energy; infeasible states are
// decoded and evaluated on the logical model first (dropped when strict).
ResidualCurve residual_curve(const std::vector<ResidualInput>& runs,
                             const SparsificationMap& map,
                             const IsingModel& logical, int n_logical,
                             bool strict = false, int bootstrap_resamples = 200,
                             std::uint64_t seed = 1);

struct CollapseResult {
    double b = 0.0;
    double mu = 0.0;
    double objective = 0.0;
    double t_min = 0.0;
    double t_max = 0.0;
};

struct MuGrid {
    double lo = 0.0;
    double hi = 15.0;
    double step = 0.1;
};

// Rescale every curve to (t * N^-mu, rho * N^b), interpolate in log-log onto
// a shared grid, and score each mu by the mean squared deviation from the
// pointwise median curve. Requires >= 3 distinct sizes.
CollapseResult fss_collapse(const std::vector<ResidualCurve>& curves,
                            double b_fixed, const MuGrid& mu_grid,
                            double window_t_min, double window_t_max);

struct SwapRateReport {
    // Cumulative acceptance per adjacent pair: row-major (row, column-pair)
    // for the P direction, (row-pair, column) for the beta direction.
    std::vector<double> rates_p;
    std::vector<double> rates_beta;
};

SwapRateReport swap_rate_report(const Trace& trace);

struct KlPoint {
    std::int64_t t = 0;           // sweeps
    std::int64_t samples = 0;     // states accumulated so far
    double kl = 0.0;
    double iid_reference = 0.0;   // (k - 1) / (2 * samples)
};

// KL of the time-accumulated decoded target-replica distribution against
// the logical Boltzmann distribution at beta, evaluated after every round.
// Infeasible samples are decoded by majority vote unless discard_infeasible.
std::vector<KlPoint> kl_curve(const Trace& trace, const SparsificationMap& map,
                              const IsingModel& logical, double beta,
                              bool discard_infeasible = false);

// First sweep count at which the running best feasible cost energy reaches
// rho_E <= rho_max; nullopt if never. Series entries are per-round feasible
// energies (NaN when that round had none).
struct EnergySample {
    std::int64_t t = 0;
    double f = 0.0;
    bool feasible = false;
};

std::vector<EnergySample> feasible_series(const Trace& trace);
std::vector<EnergySample> feasible_series(const BaselineTrace& trace);
std::optional<std::int64_t> time_to_residual(
    const std::vector<EnergySample>& series, double e_gs, int n_logical,
    double rho_max);

// Log-log least-squares slope of (t, y) pairs over t in [t_lo, t_hi];
// points with y <= 0 are dropped.
double loglog_slope(const std::vector<std::pair<double, double>>& points,
                    double t_lo, double t_hi);

std::string residual_curve_to_csv(const ResidualCurve& curve);
std::string kl_curve_to_csv(const std::vector<KlPoint>& points);
std::string collapse_to_json_text(const CollapseResult& result);

}  // namespace tempergrid
