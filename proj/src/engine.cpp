#include "tempergrid/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <thread>
#include <utility>

#include <json.hpp>

#include "tempergrid/errors.hpp"

namespace tempergrid {

using nlohmann::json;

double p_swap_probability(double beta, double d_penalty, double dg) {
    const double exponent = beta * d_penalty * dg;
    return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

double beta_swap_probability(double d_beta, double d_energy) {
    const double exponent = d_beta * d_energy;
    return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

double general_swap_probability(double beta_a, double beta_b, double de_a,
                                double de_b) {
    const double exponent = beta_a * de_a + beta_b * de_b;
    return exponent >= 0.0 ? 1.0 : std::exp(exponent);
}

namespace {

struct Replica {
    SweepState state;
    RngStream rng;
};

void check_monotone(const std::vector<double>& values, const char* what) {
    if (values.empty())
        throw config_error(std::string(what) + " vector must be non-empty");
    for (double v : values)
        if (!std::isfinite(v))
            throw config_error(std::string(what) + " entries must be finite");
    for (std::size_t k = 1; k < values.size(); ++k)
        if (values[k] <= values[k - 1])
            throw config_error(std::string(what) +
                               " vector must be strictly increasing");
}

void check_run_config(const RunConfig& cfg) {
    if (cfg.sweeps_per_swap < 1)
        throw config_error("run: sweeps_per_swap must be >= 1");
    if (cfg.total_sweeps < cfg.sweeps_per_swap)
        throw config_error("run: total_sweeps must be >= sweeps_per_swap");
    if (cfg.threads < 1) throw config_error("run: threads must be >= 1");
}

// Sweep a chunked range of replicas on worker threads. Each replica owns its
// stream and state, so the partition cannot affect results.
template <typename Fn>
void for_each_replica(int n_replicas, int threads, Fn&& body) {
    const int t = std::min(threads, n_replicas);
    if (t <= 1) {
        for (int r = 0; r < n_replicas; ++r) body(r);
        return;
    }
    std::vector<std::thread> workers;
    for (int w = 1; w < t; ++w)
        workers.emplace_back([&, w] {
            for (int r = w; r < n_replicas; r += t) body(r);
        });
    for (int r = 0; r < n_replicas; r += t) body(r);
    for (auto& worker : workers) worker.join();
}

constexpr int kRefreshInterval = 256;  // rounds between cache recomputes

}  // namespace

Trace run_2dpt(const ConstrainedProblem& problem, const Schedule& schedule,
               const RunConfig& cfg) {
    check_monotone(schedule.betas, "beta");
    check_monotone(schedule.penalties, "penalty");
    check_run_config(cfg);

    const int n_rows = static_cast<int>(schedule.betas.size());
    const int n_cols = static_cast<int>(schedule.penalties.size());
    const int n_replicas = n_rows * n_cols;

    std::vector<EffectiveModel> views;
    views.reserve(n_cols);
    for (double p : schedule.penalties)
        views.push_back(build_effective(problem, p));

    std::vector<Replica> replicas;
    replicas.reserve(n_replicas);
    for (int r = 0; r < n_replicas; ++r) {
        RngStream init(derive_seed(cfg.seed, StreamPurpose::init, r));
        replicas.push_back(
            {make_sweep_state(views[r % n_cols],
                              random_state(problem.cost.n_spins(), init)),
             RngStream(derive_seed(cfg.seed, StreamPurpose::replica, r))});
    }
    RngStream swap_rng(derive_seed(cfg.seed, StreamPurpose::swap, 0));

    std::vector<std::int64_t> attempts_p(n_rows * std::max(0, n_cols - 1), 0);
    std::vector<std::int64_t> accepts_p(attempts_p.size(), 0);
    std::vector<std::int64_t> attempts_b(std::max(0, n_rows - 1) * n_cols, 0);
    std::vector<std::int64_t> accepts_b(attempts_b.size(), 0);

    Trace trace;
    trace.betas = schedule.betas;
    trace.penalties = schedule.penalties;
    trace.sweeps_per_swap = cfg.sweeps_per_swap;
    const std::int64_t n_swap = cfg.total_sweeps / cfg.sweeps_per_swap;
    trace.records.reserve(n_swap);

    int direction = 1;
    for (std::int64_t n = 1; n <= n_swap; ++n) {
        const int even_swap = (n % 2 == 0) ? 1 : 0;

        for_each_replica(n_replicas, cfg.threads, [&](int r) {
            Replica& rep = replicas[r];
            const EffectiveModel& view = views[r % n_cols];
            const double beta = schedule.betas[r / n_cols];
            for (std::int64_t s = 0; s < cfg.sweeps_per_swap; ++s)
                metropolis_sweep(view, beta, rep.state, rep.rng);
            if (n % kRefreshInterval == 0) refresh_sweep_state(view, rep.state);
        });

        bool do_p_phase, do_beta_phase;
        if (n_rows == 1 && n_cols == 1) {
            do_p_phase = do_beta_phase = false;
        } else if (n_rows == 1) {
            do_p_phase = true;
            do_beta_phase = false;
        } else if (n_cols == 1) {
            do_p_phase = false;
            do_beta_phase = true;
        } else {
            do_p_phase = direction == 1;
            do_beta_phase = !do_p_phase;
        }

        if (do_p_phase) {
            for (int i = 0; i < n_rows; ++i) {
                for (int p = even_swap; p + 1 < n_cols; p += 2) {
                    Replica& a = replicas[i * n_cols + p];
                    Replica& b = replicas[i * n_cols + p + 1];
                    const double exponent =
                        schedule.betas[i] *
                        (schedule.penalties[p + 1] - schedule.penalties[p]) *
                        (b.state.g - a.state.g);
                    const double u = swap_rng.uniform01();
                    ++attempts_p[i * (n_cols - 1) + p];
                    if (exponent >= 0.0 || u < std::exp(exponent)) {
                        std::swap(a.state, b.state);
                        refresh_sweep_state(views[p], a.state);
                        refresh_sweep_state(views[p + 1], b.state);
                        ++accepts_p[i * (n_cols - 1) + p];
                    }
                }
            }
        }
        if (do_beta_phase) {
            for (int j = 0; j < n_cols; ++j) {
                for (int b = even_swap; b + 1 < n_rows; b += 2) {
                    Replica& lo = replicas[b * n_cols + j];
                    Replica& hi = replicas[(b + 1) * n_cols + j];
                    const double p_j = schedule.penalties[j];
                    const double e_lo = lo.state.f + p_j * lo.state.g;
                    const double e_hi = hi.state.f + p_j * hi.state.g;
                    const double exponent =
                        (schedule.betas[b + 1] - schedule.betas[b]) *
                        (e_hi - e_lo);
                    const double u = swap_rng.uniform01();
                    ++attempts_b[b * n_cols + j];
                    if (exponent >= 0.0 || u < std::exp(exponent)) {
                        std::swap(lo.state, hi.state);
                        ++accepts_b[b * n_cols + j];
                    }
                }
            }
        }

        const SweepState& target = replicas[n_replicas - 1].state;
        TraceRecord record;
        record.round = n;
        record.sweep_count = n * cfg.sweeps_per_swap;
        record.f = target.f;
        record.g = target.g;
        record.feasible = target.g == 0.0;
        record.state = target.spins;
        record.acceptance_rates_p.resize(attempts_p.size());
        for (std::size_t k = 0; k < attempts_p.size(); ++k)
            record.acceptance_rates_p[k] =
                attempts_p[k] == 0
                    ? 0.0
                    : static_cast<double>(accepts_p[k]) / attempts_p[k];
        record.acceptance_rates_beta.resize(attempts_b.size());
        for (std::size_t k = 0; k < attempts_b.size(); ++k)
            record.acceptance_rates_beta[k] =
                attempts_b[k] == 0
                    ? 0.0
                    : static_cast<double>(accepts_b[k]) / attempts_b[k];
        if (!cfg.store_target_only) {
            record.grid.reserve(n_replicas);
            for (const Replica& rep : replicas)
                record.grid.push_back(rep.state.spins);
        }
        trace.records.push_back(std::move(record));

        if (even_swap) direction = -direction;
    }
    return trace;
}

BaselineTrace run_jcolumn_pt(const ConstrainedProblem& problem,
                             const std::vector<double>& betas, double p_fixed,
                             int j_repeats, const RunConfig& cfg) {
    if (p_fixed <= 0.0) throw config_error("baseline: P must be positive");
    if (j_repeats < 1) throw config_error("baseline: repeats must be >= 1");

    BaselineTrace out;
    out.betas = betas;
    out.penalty = p_fixed;
    out.sweeps_per_swap = cfg.sweeps_per_swap;

    Schedule column;
    column.betas = betas;
    column.penalties = {p_fixed};

    std::int64_t feasible_total = 0;
    std::int64_t sample_total = 0;
    for (int rep = 0; rep < j_repeats; ++rep) {
        RunConfig rep_cfg = cfg;
        rep_cfg.seed = derive_seed(cfg.seed, StreamPurpose::repeat, rep);
        rep_cfg.store_target_only = true;
        const Trace trace = run_2dpt(problem, column, rep_cfg);
        if (out.records.empty()) {
            out.records.resize(trace.records.size());
            for (std::size_t k = 0; k < trace.records.size(); ++k) {
                out.records[k].round = trace.records[k].round;
                out.records[k].sweep_count = trace.records[k].sweep_count;
                out.records[k].best_f = std::numeric_limits<double>::quiet_NaN();
            }
        }
        for (std::size_t k = 0; k < trace.records.size(); ++k) {
            const TraceRecord& r = trace.records[k];
            BaselineRecord& merged = out.records[k];
            ++merged.n_total;
            ++sample_total;
            if (r.feasible) {
                ++merged.n_feasible;
                ++feasible_total;
                if (!merged.any_feasible || r.f < merged.best_f)
                    merged.best_f = r.f;
                merged.any_feasible = true;
            }
        }
    }
    out.feasible_fraction =
        sample_total == 0
            ? 0.0
            : static_cast<double>(feasible_total) / static_cast<double>(sample_total);
    return out;
}

std::vector<int> rle_encode(const SpinState& state) {
    std::vector<int> runs;
    for (std::size_t i = 0; i < state.size();) {
        std::size_t j = i;
        while (j < state.size() && state[j] == state[i]) ++j;
        runs.push_back(static_cast<int>(j - i) * (state[i] > 0 ? 1 : -1));
        i = j;
    }
    return runs;
}

SpinState rle_decode(const std::vector<int>& runs) {
    SpinState state;
    for (int run : runs) {
        if (run == 0) throw config_error("trace: zero-length run");
        const Spin value = run > 0 ? Spin{1} : Spin{-1};
        for (int k = 0; k < std::abs(run); ++k) state.push_back(value);
    }
    return state;
}

std::string trace_record_to_json_line(const TraceRecord& record) {
    json j;
    j["round"] = record.round;
    j["sweep_count"] = record.sweep_count;
    j["f"] = record.f;
    j["g"] = record.g;
    j["feasible"] = record.feasible;
    j["state"] = rle_encode(record.state);
    j["acceptance_rates_P"] = record.acceptance_rates_p;
    j["acceptance_rates_beta"] = record.acceptance_rates_beta;
    return j.dump();
}

std::string trace_to_jsonl(const Trace& trace) {
    std::string out;
    for (const auto& record : trace.records) {
        out += trace_record_to_json_line(record);
        out += '\n';
    }
    return out;
}

void save_trace(const Trace& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write trace file: " + path);
    out << trace_to_jsonl(trace);
}

Trace load_trace(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open trace file: " + path);
    Trace trace;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw config_error("trace: malformed JSON line in " + path);
        TraceRecord record;
        try {
            record.round = j.at("round").get<std::int64_t>();
            record.sweep_count = j.at("sweep_count").get<std::int64_t>();
            record.f = j.at("f").get<double>();
            record.g = j.at("g").get<double>();
            record.feasible = j.at("feasible").get<bool>();
            record.state = rle_decode(j.at("state").get<std::vector<int>>());
            record.acceptance_rates_p =
                j.at("acceptance_rates_P").get<std::vector<double>>();
            record.acceptance_rates_beta =
                j.at("acceptance_rates_beta").get<std::vector<double>>();
        } catch (const json::exception& e) {
            throw config_error(std::string("trace: ") + e.what());
        }
        trace.records.push_back(std::move(record));
    }
    if (!trace.records.empty())
        trace.sweeps_per_swap = trace.records.front().sweep_count;
    return trace;
}

}  // namespace tempergrid
