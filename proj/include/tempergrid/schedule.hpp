#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tempergrid/constraints.hpp"

namespace tempergrid {

struct ScheduleConfig {
    double beta0 = 0.3;
    double p0 = 0.5;
    int i_max = 20;
    int j_max = 20;
    double sigma_min = 0.0;  // <= 0 selects 0.5 * sqrt(n_phys)
    double alpha_beta = 1.0;
    double alpha_p = 1.2;
    int n_chains = 32;
    int sweeps_per_probe = 1000;
    int replica_budget = 400;
    std::uint64_t seed = 1;
};

struct ProbeStats {
    int row = 0;     // 0-based position in the beta ladder
    int column = 0;  // 0-based position in the penalty ladder
    double beta = 0.0;
    double penalty = 0.0;
    double sigma_e = 0.0;
    double sigma_g = 0.0;
    double mean_g = 0.0;
};

struct Schedule {
    std::vector<double> betas;
    std::vector<double> penalties;
    std::vector<ProbeStats> probe_stats;
    // Set when the replica budget or column cap stopped growth before the
    // cold replica reached mean_g < 0.5.
    bool budget_exhausted = false;
};

// Equilibrate n_chains independent chains at (beta, P) and pool the second
// half of their per-sweep (E, g) samples, E = f + P*g.
ProbeStats probe_population(const ConstrainedProblem& problem, double beta,
                            double penalty, int n_chains, int sweeps,
                            std::uint64_t seed);

// Adaptive ladder construction: grow the first column's beta ladder by
// alpha_beta / sigma_E until sigma_E <= sigma_min, set each next column's
// penalty to the row-median of accumulated proposals P + alpha_P/(beta
// sigma_g), and stop adding columns once the coldest probe satisfies the
// constraints (mean_g < 0.5). Final betas are per-row medians across
// columns.
Schedule build_schedule(const ConstrainedProblem& problem,
                        const ScheduleConfig& cfg);

Schedule schedule_from_json_text(const std::string& text);
std::string schedule_to_json_text(const Schedule& schedule);
Schedule load_schedule(const std::string& path);
void save_schedule(const Schedule& schedule, const std::string& path);

}  // namespace tempergrid
