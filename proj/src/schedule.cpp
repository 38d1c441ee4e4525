#include "tempergrid/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "tempergrid/errors.hpp"
#include "tempergrid/mc.hpp"

namespace tempergrid {

using nlohmann::json;

ProbeStats probe_population(const ConstrainedProblem& problem, double beta,
                            double penalty, int n_chains, int sweeps,
                            std::uint64_t seed) {
    if (n_chains < 2) throw config_error("probe: need at least 2 chains");
    if (sweeps < 2) throw config_error("probe: need at least 2 sweeps");
    const EffectiveModel view = build_effective(problem, penalty);
    const int burn_in = sweeps / 2;
    double sum_e = 0.0, sum_e2 = 0.0, sum_g = 0.0, sum_g2 = 0.0;
    std::int64_t kept = 0;
    for (int c = 0; c < n_chains; ++c) {
        RngStream rng(derive_seed(seed, StreamPurpose::probe, c));
        SweepState state =
            make_sweep_state(view, random_state(problem.cost.n_spins(), rng));
        for (int s = 0; s < sweeps; ++s) {
            metropolis_sweep(view, beta, state, rng);
            if (s < burn_in) continue;
            const double e = state.f + penalty * state.g;
            sum_e += e;
            sum_e2 += e * e;
            sum_g += state.g;
            sum_g2 += state.g * state.g;
            ++kept;
        }
    }
    const double inv = 1.0 / static_cast<double>(kept);
    ProbeStats stats;
    stats.beta = beta;
    stats.penalty = penalty;
    stats.mean_g = sum_g * inv;
    const double mean_e = sum_e * inv;
    stats.sigma_e = std::sqrt(std::max(0.0, sum_e2 * inv - mean_e * mean_e));
    stats.sigma_g =
        std::sqrt(std::max(0.0, sum_g2 * inv - stats.mean_g * stats.mean_g));
    return stats;
}

namespace {

// Lower median: deterministic for even counts.
double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

void check_config(const ScheduleConfig& cfg) {
    if (cfg.beta0 <= 0.0) throw config_error("schedule: beta0 must be > 0");
    if (cfg.p0 < 0.0) throw config_error("schedule: P0 must be >= 0");
    if (cfg.i_max < 1 || cfg.j_max < 1)
        throw config_error("schedule: I_max and J_max must be >= 1");
    if (cfg.alpha_beta <= 0.0 || cfg.alpha_p <= 0.0)
        throw config_error("schedule: learning rates must be > 0");
    if (cfg.replica_budget < 1)
        throw config_error("schedule: replica budget must be >= 1");
    if (static_cast<long long>(cfg.i_max) * cfg.j_max > cfg.replica_budget)
        throw config_error("schedule: I_max * J_max exceeds replica budget");
}

}  // namespace

Schedule build_schedule(const ConstrainedProblem& problem,
                        const ScheduleConfig& cfg) {
    check_config(cfg);
    const double sigma_min =
        cfg.sigma_min > 0.0
            ? cfg.sigma_min
            : 0.5 * std::sqrt(static_cast<double>(problem.cost.n_spins()));
    const double p_cap = 2.0 * cfg.p0 + 1.0;  // bound on one P increment
    std::uint64_t probe_counter = 0;
    auto run_probe = [&](double beta, double penalty) {
        return probe_population(
            problem, beta, penalty, cfg.n_chains, cfg.sweeps_per_probe,
            derive_seed(cfg.seed, StreamPurpose::probe, probe_counter++));
    };
    auto p_increment = [&](double beta, double sigma_g) {
        return std::min(cfg.alpha_p / (beta * std::max(sigma_g, 1e-300)), p_cap);
    };

    Schedule out;
    out.penalties = {cfg.p0};
    // beta ladders per column and accumulated penalty proposals per row.
    std::vector<std::vector<double>> beta_columns;
    std::map<std::pair<int, int>, double> proposals;

    // First column: grow the ladder while fluctuations stay above sigma_min.
    std::vector<double> column = {cfg.beta0};
    ProbeStats last{};
    for (int i = 0;; ++i) {
        last = run_probe(column[i], cfg.p0);
        last.row = i;
        last.column = 0;
        out.probe_stats.push_back(last);
        if (last.sigma_e <= sigma_min) break;
        proposals[{i, 1}] = cfg.p0 + p_increment(column[i], last.sigma_g);
        if (i + 1 >= cfg.i_max) break;
        column.push_back(column[i] + cfg.alpha_beta / last.sigma_e);
    }
    beta_columns.push_back(column);
    const int n_rows = static_cast<int>(column.size());

    // Column growth stops as soon as the coldest probe meets the
    // constraints; this also covers unconstrained problems at column one.
    if (last.mean_g >= 0.5) {
        if (proposals.empty())
            proposals[{0, 1}] = cfg.p0 + p_increment(cfg.beta0, last.sigma_g);
        for (int j = 1;; ++j) {
            std::vector<double> next_p;
            for (const auto& [key, value] : proposals)
                if (key.second == j) next_p.push_back(value);
            if (static_cast<long long>(j + 1) * n_rows > cfg.replica_budget ||
                j >= cfg.j_max) {
                out.budget_exhausted = true;
                break;
            }
            const double prev = out.penalties.back();
            out.penalties.push_back(
                std::max(median_of(next_p), prev + 1e-9 * (1.0 + std::abs(prev))));

            column.assign(1, cfg.beta0);
            for (int i = 0; i < n_rows; ++i) {
                last = run_probe(column[i], out.penalties[j]);
                last.row = i;
                last.column = j;
                out.probe_stats.push_back(last);
                const auto base = proposals.find({i, j});
                proposals[{i, j + 1}] =
                    (base != proposals.end() ? base->second : out.penalties[j]) +
                    p_increment(column[i], last.sigma_g);
                if (i + 1 < n_rows)
                    column.push_back(column[i] + cfg.alpha_beta /
                                                     std::max(last.sigma_e,
                                                              sigma_min));
            }
            beta_columns.push_back(column);
            if (last.mean_g < 0.5) break;
        }
    }

    out.betas.resize(n_rows);
    for (int i = 0; i < n_rows; ++i) {
        std::vector<double> row;
        row.reserve(beta_columns.size());
        for (const auto& col : beta_columns) row.push_back(col[i]);
        out.betas[i] = median_of(row);
    }
    return out;
}

Schedule schedule_from_json_text(const std::string& text) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw config_error("schedule: malformed JSON");
    if (!j.contains("betas") || !j.contains("penalties"))
        throw config_error("schedule: expected betas and penalties arrays");
    Schedule schedule;
    try {
        schedule.betas = j["betas"].get<std::vector<double>>();
        schedule.penalties = j["penalties"].get<std::vector<double>>();
        if (j.contains("budget_exhausted"))
            schedule.budget_exhausted = j["budget_exhausted"].get<bool>();
        if (j.contains("probe_stats")) {
            for (const auto& entry : j["probe_stats"]) {
                ProbeStats stats;
                stats.row = entry.at("row").get<int>();
                stats.column = entry.at("column").get<int>();
                stats.beta = entry.at("beta").get<double>();
                stats.penalty = entry.at("penalty").get<double>();
                stats.sigma_e = entry.at("sigma_E").get<double>();
                stats.sigma_g = entry.at("sigma_g").get<double>();
                stats.mean_g = entry.at("mean_g").get<double>();
                schedule.probe_stats.push_back(stats);
            }
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("schedule: ") + e.what());
    }
    return schedule;
}

std::string schedule_to_json_text(const Schedule& schedule) {
    json j;
    j["betas"] = schedule.betas;
    j["penalties"] = schedule.penalties;
    j["budget_exhausted"] = schedule.budget_exhausted;
    j["probe_stats"] = json::array();
    for (const auto& stats : schedule.probe_stats) {
        json entry;
        entry["row"] = stats.row;
        entry["column"] = stats.column;
        entry["beta"] = stats.beta;
        entry["penalty"] = stats.penalty;
        entry["sigma_E"] = stats.sigma_e;
        entry["sigma_g"] = stats.sigma_g;
        entry["mean_g"] = stats.mean_g;
        j["probe_stats"].push_back(entry);
    }
    return j.dump(2) + "\n";
}

Schedule load_schedule(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open schedule file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return schedule_from_json_text(buf.str());
}

void save_schedule(const Schedule& schedule, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write schedule file: " + path);
    out << schedule_to_json_text(schedule);
}

}  // namespace tempergrid
