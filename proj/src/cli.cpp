#include "tempergrid/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tempergrid/analysis.hpp"
#include "tempergrid/constraints.hpp"
#include "tempergrid/engine.hpp"
#include "tempergrid/errors.hpp"
#include "tempergrid/instances.hpp"
#include "tempergrid/oracle.hpp"
#include "tempergrid/schedule.hpp"

namespace tempergrid {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw config_error("cannot write " + path.string());
    out << text;
}

std::string read_text(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_meta(const fs::path& dir, json extra) {
    extra["version"] = kVersion;
    extra["timestamp_utc"] = timestamp_utc();
    write_text(dir / "meta.json", extra.dump(2) + "\n");
}

void refuse_overwrite(const fs::path& path, bool force) {
    if (!force && fs::exists(path))
        throw config_error(path.string() +
                           " already exists (pass --force to overwrite)");
}

// Chain constraints implied by a sparsification map.
ConstraintSet constraints_from_map(const SparsificationMap& map) {
    std::vector<std::pair<int, int>> pairs;
    for (const auto& chain : map.copies)
        for (std::size_t k = 0; k + 1 < chain.size(); ++k)
            pairs.emplace_back(chain[k], chain[k + 1]);
    return ConstraintSet(map.n_physical, std::move(pairs));
}

SparsificationMap identity_map(int n) {
    SparsificationMap map;
    map.n_logical = n;
    map.n_physical = n;
    map.copies.resize(n);
    for (int u = 0; u < n; ++u) map.copies[u] = {u};
    return map;
}

struct LoadedProblem {
    ConstrainedProblem problem;
    SparsificationMap map;
};

LoadedProblem load_problem(const std::string& model_path,
                           const std::optional<std::string>& map_path) {
    LoadedProblem out{{load_model(model_path), ConstraintSet{}}, {}};
    if (map_path) {
        out.map = load_map(*map_path);
        if (out.map.n_physical != out.problem.cost.n_spins())
            throw config_error("map does not match model size");
        out.problem.constraints = constraints_from_map(out.map);
    } else {
        out.map = identity_map(out.problem.cost.n_spins());
        out.problem.constraints =
            ConstraintSet(out.problem.cost.n_spins(), {});
    }
    return out;
}

int thread_count(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("TEMPERGRID_THREADS")) {
        const int parsed = std::atoi(env);
        if (parsed > 0) return parsed;
    }
    return 1;
}

void save_planted(const GeneratedInstance& instance, const fs::path& path) {
    json j;
    j["state"] = json::array();
    for (Spin s : instance.planted_state)
        j["state"].push_back(static_cast<int>(s));
    j["energy"] = instance.planted_energy;
    write_text(path, j.dump(2) + "\n");
}

// --- generate ---------------------------------------------------------

int cmd_generate_wishart(int n, double alpha, std::uint64_t seed,
                         const std::string& out_dir, bool force, bool verify) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    refuse_overwrite(dir / "model.json", force);

    WishartSpec spec{n, alpha, seed};
    GeneratedInstance instance = generate_wishart(spec);
    if (verify) {
        for (int attempt = 0;; ++attempt) {
            const GroundState gs = exact_ground_state(instance.model);
            if (gs.energy >= instance.planted_energy - 1e-9) break;
            std::cerr << "seed " << instance.spec.seed
                      << ": planted state is not the global minimum ("
                      << gs.energy << " < " << instance.planted_energy
                      << "), regenerating\n";
            if (attempt >= 16)
                throw config_error("wishart: verification kept failing");
            spec.seed += 1;
            instance = generate_wishart(spec);
        }
    }

    save_model(instance.model, (dir / "model.json").string());
    save_planted(instance, dir / "planted.json");
    write_meta(dir, {{"kind", "wishart"},
                     {"n", instance.spec.n_logical},
                     {"alpha", instance.spec.alpha},
                     {"seed", instance.spec.seed},
                     {"verified", verify}});
    std::cerr << "wrote wishart bundle (n=" << n << ", planted energy "
              << instance.planted_energy << ") to " << out_dir << "\n";
    return 0;
}

int cmd_generate_five_node(const std::optional<std::string>& couplings_file,
                           const std::string& out_dir, bool force) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    refuse_overwrite(dir / "model.json", force);
    const IsingModel model = five_node_complete(couplings_file);
    save_model(model, (dir / "model.json").string());
    write_meta(dir, {{"kind", "five-node"},
                     {"override", couplings_file.value_or("")}});
    std::cerr << "wrote five-node bundle to " << out_dir << "\n";
    return 0;
}

// --- sparsify ----------------------------------------------------------

int cmd_sparsify(const std::string& model_path, int copies, int max_degree,
                 const std::string& out_dir, bool force) {
    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    refuse_overwrite(dir / "physical.json", force);
    const IsingModel logical = load_model(model_path);
    SparsifyResult result = sparsify(logical, copies, max_degree);
    save_model(result.problem.cost, (dir / "physical.json").string());
    save_map(result.map, (dir / "map.json").string());
    write_meta(dir, {{"kind", "sparsify"},
                     {"model", model_path},
                     {"copies", copies},
                     {"max_degree", max_degree},
                     {"n_physical", result.problem.cost.n_spins()},
                     {"n_constraints", result.problem.constraints.count()}});
    std::cerr << "wrote physical model (" << result.problem.cost.n_spins()
              << " spins, " << result.problem.constraints.count()
              << " constraint pairs) to " << out_dir << "\n";
    return 0;
}

// --- schedule ----------------------------------------------------------

int cmd_schedule(const std::string& model_path,
                 const std::optional<std::string>& map_path,
                 const ScheduleConfig& cfg, const std::string& out_file) {
    const LoadedProblem loaded = load_problem(model_path, map_path);
    const Schedule schedule = build_schedule(loaded.problem, cfg);
    save_schedule(schedule, out_file);
    std::cerr << "schedule: " << schedule.betas.size() << " betas x "
              << schedule.penalties.size() << " penalties"
              << (schedule.budget_exhausted ? " (budget exhausted)" : "")
              << " -> " << out_file << "\n";
    return 0;
}

// --- run ----------------------------------------------------------------

json parse_strict_object(const json& j, const char* what,
                         const std::vector<std::string>& allowed) {
    if (!j.is_object()) throw config_error(std::string(what) + ": not an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw config_error(std::string(what) + ": unknown key \"" + key +
                               "\"");
    }
    return j;
}

ScheduleConfig schedule_config_from_json(const json& j, std::uint64_t seed) {
    parse_strict_object(j, "schedule_adaptive",
                        {"beta0", "p0", "i_max", "j_max", "sigma_min",
                         "alpha_beta", "alpha_p", "n_chains",
                         "sweeps_per_probe", "replica_budget", "seed"});
    ScheduleConfig cfg;
    cfg.seed = seed;
    if (j.contains("beta0")) cfg.beta0 = j["beta0"].get<double>();
    if (j.contains("p0")) cfg.p0 = j["p0"].get<double>();
    if (j.contains("i_max")) cfg.i_max = j["i_max"].get<int>();
    if (j.contains("j_max")) cfg.j_max = j["j_max"].get<int>();
    if (j.contains("sigma_min")) cfg.sigma_min = j["sigma_min"].get<double>();
    if (j.contains("alpha_beta")) cfg.alpha_beta = j["alpha_beta"].get<double>();
    if (j.contains("alpha_p")) cfg.alpha_p = j["alpha_p"].get<double>();
    if (j.contains("n_chains")) cfg.n_chains = j["n_chains"].get<int>();
    if (j.contains("sweeps_per_probe"))
        cfg.sweeps_per_probe = j["sweeps_per_probe"].get<int>();
    if (j.contains("replica_budget"))
        cfg.replica_budget = j["replica_budget"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    return cfg;
}

int cmd_run(const std::string& config_path, bool baseline, int threads_flag) {
    json config = json::parse(read_text(config_path), nullptr, false);
    if (config.is_discarded())
        throw config_error("config: malformed JSON in " + config_path);
    parse_strict_object(config, "config",
                        {"version", "model", "map", "sparsify", "schedule",
                         "schedule_file", "schedule_adaptive", "run", "out",
                         "e_gs", "n_logical"});
    if (!config.contains("version") || config["version"].get<int>() != 1)
        throw config_error("config: expected version 1");
    for (const char* key : {"model", "run", "out"})
        if (!config.contains(key))
            throw config_error(std::string("config: missing \"") + key + "\"");

    const fs::path out_dir(config["out"].get<std::string>());
    fs::create_directories(out_dir);

    // Resolve the physical problem.
    LoadedProblem loaded;
    const std::string model_path = config["model"].get<std::string>();
    if (config.contains("sparsify")) {
        if (config.contains("map"))
            throw config_error("config: give either map or sparsify, not both");
        const json sp = parse_strict_object(config["sparsify"], "sparsify",
                                            {"copies", "max_degree"});
        const IsingModel logical = load_model(model_path);
        SparsifyResult result = sparsify(logical, sp.at("copies").get<int>(),
                                         sp.at("max_degree").get<int>());
        loaded.problem = std::move(result.problem);
        loaded.map = std::move(result.map);
        save_model(loaded.problem.cost, (out_dir / "physical.json").string());
        save_map(loaded.map, (out_dir / "map.json").string());
    } else if (config.contains("map")) {
        loaded = load_problem(model_path, config["map"].get<std::string>());
    } else {
        loaded = load_problem(model_path, std::nullopt);
    }

    // Resolve run parameters before the schedule (its seed feeds the probes).
    const json run_json = parse_strict_object(
        config["run"], "run",
        {"total_sweeps", "sweeps_per_swap", "seed", "store_target_only"});
    RunConfig run_cfg;
    run_cfg.total_sweeps = run_json.at("total_sweeps").get<std::int64_t>();
    run_cfg.sweeps_per_swap = run_json.at("sweeps_per_swap").get<std::int64_t>();
    run_cfg.seed = run_json.at("seed").get<std::uint64_t>();
    if (run_json.contains("store_target_only"))
        run_cfg.store_target_only = run_json["store_target_only"].get<bool>();
    run_cfg.threads = thread_count(threads_flag);

    // Resolve the schedule.
    const int given = config.contains("schedule") +
                      config.contains("schedule_file") +
                      config.contains("schedule_adaptive");
    if (given != 1)
        throw config_error(
            "config: give exactly one of schedule, schedule_file, "
            "schedule_adaptive");
    Schedule schedule;
    if (config.contains("schedule")) {
        schedule = schedule_from_json_text(config["schedule"].dump());
    } else if (config.contains("schedule_file")) {
        schedule = load_schedule(config["schedule_file"].get<std::string>());
    } else {
        const ScheduleConfig cfg = schedule_config_from_json(
            config["schedule_adaptive"], run_cfg.seed);
        schedule = build_schedule(loaded.problem, cfg);
    }
    save_schedule(schedule, (out_dir / "schedule.json").string());

    json summary;
    if (baseline) {
        double p_sum = 0.0;
        for (double p : schedule.penalties) p_sum += p;
        const double p_fixed = p_sum / schedule.penalties.size();
        const int repeats = static_cast<int>(schedule.penalties.size());
        const BaselineTrace trace = run_jcolumn_pt(
            loaded.problem, schedule.betas, p_fixed, repeats, run_cfg);
        std::string lines;
        for (const auto& record : trace.records) {
            json j;
            j["round"] = record.round;
            j["sweep_count"] = record.sweep_count;
            j["best_f"] = record.best_f;
            j["n_feasible"] = record.n_feasible;
            j["n_total"] = record.n_total;
            lines += j.dump();
            lines += '\n';
        }
        write_text(out_dir / "baseline.jsonl", lines);
        summary["mode"] = "baseline";
        summary["p_fixed"] = p_fixed;
        summary["repeats"] = repeats;
        summary["feasible_fraction"] = trace.feasible_fraction;
        double best = std::numeric_limits<double>::quiet_NaN();
        for (const auto& record : trace.records)
            if (record.any_feasible &&
                (std::isnan(best) || record.best_f < best))
                best = record.best_f;
        summary["best_feasible_f"] = best;
        if (config.contains("e_gs") && config.contains("n_logical"))
            summary["rho_e_best"] = (best - config["e_gs"].get<double>()) /
                                    config["n_logical"].get<double>();
    } else {
        const Trace trace = run_2dpt(loaded.problem, schedule, run_cfg);
        save_trace(trace, (out_dir / "trace.jsonl").string());
        const SwapRateReport rates = swap_rate_report(trace);
        std::int64_t feasible = 0;
        double best = std::numeric_limits<double>::quiet_NaN();
        for (const auto& record : trace.records) {
            if (!record.feasible) continue;
            ++feasible;
            if (std::isnan(best) || record.f < best) best = record.f;
        }
        summary["mode"] = "2dpt";
        summary["rounds"] = trace.records.size();
        summary["feasible_fraction"] =
            trace.records.empty()
                ? 0.0
                : static_cast<double>(feasible) / trace.records.size();
        summary["best_feasible_f"] = best;
        summary["acceptance_rates_P"] = rates.rates_p;
        summary["acceptance_rates_beta"] = rates.rates_beta;
        if (config.contains("e_gs") && config.contains("n_logical"))
            summary["rho_e_best"] = (best - config["e_gs"].get<double>()) /
                                    config["n_logical"].get<double>();
    }
    write_text(out_dir / "summary.json", summary.dump(2) + "\n");
    write_meta(out_dir, {{"kind", baseline ? "baseline" : "run"},
                         {"config", config_path},
                         {"threads", run_cfg.threads}});
    std::cerr << "run finished -> " << out_dir.string() << "\n";
    return 0;
}

// --- kl ------------------------------------------------------------------

int cmd_kl(const std::string& trace_path, const std::string& model_path,
           const std::optional<std::string>& map_path, double beta,
           bool discard_infeasible, const std::string& out_file) {
    const Trace trace = load_trace(trace_path);
    const IsingModel logical = load_model(model_path);
    SparsificationMap map =
        map_path ? load_map(*map_path) : identity_map(logical.n_spins());
    if (map.n_logical != logical.n_spins())
        throw config_error("kl: map does not match logical model");
    if (!trace.records.empty() &&
        static_cast<int>(trace.records.front().state.size()) != map.n_physical)
        throw config_error("kl: trace states do not match map");
    const auto points = kl_curve(trace, map, logical, beta, discard_infeasible);
    write_text(out_file, kl_curve_to_csv(points));
    std::cerr << "wrote KL curve (" << points.size() << " points) to "
              << out_file << "\n";
    return 0;
}

// --- analyze / collapse ---------------------------------------------------

int cmd_analyze(const std::vector<std::string>& trace_paths,
                const std::vector<double>& e_gs_values,
                const std::string& model_path,
                const std::optional<std::string>& map_path, int n_logical,
                bool strict, const std::string& out_file) {
    if (trace_paths.empty()) throw config_error("analyze: no traces given");
    if (trace_paths.size() != e_gs_values.size())
        throw config_error("analyze: need one --egs per --trace");
    const IsingModel logical = load_model(model_path);
    SparsificationMap map =
        map_path ? load_map(*map_path) : identity_map(logical.n_spins());
    std::vector<Trace> traces;
    traces.reserve(trace_paths.size());
    for (const auto& path : trace_paths) traces.push_back(load_trace(path));
    std::vector<ResidualInput> runs;
    for (std::size_t k = 0; k < traces.size(); ++k)
        runs.push_back({&traces[k], e_gs_values[k], static_cast<int>(k)});
    const ResidualCurve curve =
        residual_curve(runs, map, logical, n_logical, strict);
    write_text(out_file, residual_curve_to_csv(curve));
    std::cerr << "wrote residual curve (" << curve.points.size()
              << " points) to " << out_file << "\n";
    return 0;
}

ResidualCurve curve_from_csv(const std::string& text, int n_logical) {
    ResidualCurve curve;
    curve.n_logical = n_logical;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line.rfind("t,", 0) != 0)
        throw config_error("curve csv: missing header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ResidualPoint point;
        char comma;
        std::istringstream row(line);
        if (!(row >> point.t >> comma >> point.rho_e >> comma >> point.ci95))
            throw config_error("curve csv: malformed row: " + line);
        curve.points.push_back(point);
    }
    return curve;
}

int cmd_collapse(const std::vector<std::string>& curve_files,
                 const std::vector<int>& sizes, double b, double mu_lo,
                 double mu_hi, double mu_step, double t_min, double t_max,
                 const std::string& out_file) {
    if (curve_files.size() != sizes.size())
        throw config_error("collapse: need one --n per --curve");
    std::vector<ResidualCurve> curves;
    for (std::size_t k = 0; k < curve_files.size(); ++k)
        curves.push_back(
            curve_from_csv(read_text(curve_files[k]), sizes[k]));
    const CollapseResult result =
        fss_collapse(curves, b, {mu_lo, mu_hi, mu_step}, t_min, t_max);
    write_text(out_file, collapse_to_json_text(result));
    std::cerr << "collapse: mu=" << result.mu << " objective="
              << result.objective << " -> " << out_file << "\n";
    return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Two-dimensional parallel tempering for constrained Ising "
                 "problems"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Write an instance bundle");
    generate->require_subcommand(1);
    auto* gen_wishart =
        generate->add_subcommand("wishart", "Planted Wishart instance");
    int gw_n = 0;
    double gw_alpha = 0.75;
    std::uint64_t gw_seed = 1;
    std::string gw_out;
    bool gw_force = false, gw_verify = false;
    gen_wishart->add_option("--n", gw_n, "Logical spins")->required();
    gen_wishart->add_option("--alpha", gw_alpha, "Density parameter");
    gen_wishart->add_option("--seed", gw_seed, "Seed");
    gen_wishart->add_option("--out", gw_out, "Output directory")->required();
    gen_wishart->add_flag("--force", gw_force, "Overwrite existing bundle");
    gen_wishart->add_flag("--verify", gw_verify,
                          "Check the planted state by enumeration (n <= 24)");
    auto* gen_five =
        generate->add_subcommand("five-node", "All-to-all 5-node instance");
    std::string gf_out, gf_couplings;
    bool gf_force = false;
    gen_five->add_option("--out", gf_out, "Output directory")->required();
    gen_five->add_option("--couplings", gf_couplings,
                         "Model file overriding the default coefficients");
    gen_five->add_flag("--force", gf_force, "Overwrite existing bundle");

    // sparsify
    auto* sparsify_cmd =
        app.add_subcommand("sparsify", "Spread a model over copy chains");
    std::string sp_model, sp_out;
    int sp_copies = 0, sp_degree = 0;
    bool sp_force = false;
    sparsify_cmd->add_option("--model", sp_model, "Logical model file")
        ->required();
    sparsify_cmd->add_option("--copies", sp_copies, "Copies per node")
        ->required();
    sparsify_cmd->add_option("--max-degree", sp_degree, "Physical degree cap")
        ->required();
    sparsify_cmd->add_option("--out", sp_out, "Output directory")->required();
    sparsify_cmd->add_flag("--force", sp_force, "Overwrite existing output");

    // schedule
    auto* schedule_cmd =
        app.add_subcommand("schedule", "Build an adaptive schedule");
    std::string sc_model, sc_map, sc_out;
    ScheduleConfig sc_cfg;
    schedule_cmd->add_option("--model", sc_model, "Physical model file")
        ->required();
    schedule_cmd->add_option("--map", sc_map, "Sparsification map file");
    schedule_cmd->add_option("--out", sc_out, "Schedule output file")
        ->required();
    schedule_cmd->add_option("--beta0", sc_cfg.beta0, "Initial beta");
    schedule_cmd->add_option("--p0", sc_cfg.p0, "Initial penalty");
    schedule_cmd->add_option("--i-max", sc_cfg.i_max, "Row cap");
    schedule_cmd->add_option("--j-max", sc_cfg.j_max, "Column cap");
    schedule_cmd->add_option("--sigma-min", sc_cfg.sigma_min,
                             "Stop threshold (<= 0 selects 0.5 sqrt(n))");
    schedule_cmd->add_option("--alpha-beta", sc_cfg.alpha_beta,
                             "Beta learning rate");
    schedule_cmd->add_option("--alpha-p", sc_cfg.alpha_p,
                             "Penalty learning rate");
    schedule_cmd->add_option("--chains", sc_cfg.n_chains, "Probe chains");
    schedule_cmd->add_option("--probe-sweeps", sc_cfg.sweeps_per_probe,
                             "Sweeps per probe");
    schedule_cmd->add_option("--budget", sc_cfg.replica_budget,
                             "Replica budget");
    schedule_cmd->add_option("--seed", sc_cfg.seed, "Seed");

    // run
    auto* run_cmd = app.add_subcommand("run", "Execute a run config");
    std::string rn_config;
    bool rn_baseline = false;
    int rn_threads = 0;
    run_cmd->add_option("--config", rn_config, "Config JSON file")->required();
    run_cmd->add_flag("--baseline", rn_baseline,
                      "Replace the grid with J-column PT at the mean penalty");
    run_cmd->add_option("--threads", rn_threads,
                        "Worker threads (default TEMPERGRID_THREADS or 1)");

    // kl
    auto* kl_cmd = app.add_subcommand("kl", "KL-vs-time curve from a trace");
    std::string kl_trace, kl_model, kl_map, kl_out;
    double kl_beta = 1.0;
    bool kl_discard = false;
    kl_cmd->add_option("--trace", kl_trace, "Trace JSONL file")->required();
    kl_cmd->add_option("--model", kl_model, "Logical model file")->required();
    kl_cmd->add_option("--map", kl_map, "Sparsification map file");
    kl_cmd->add_option("--beta", kl_beta, "Target inverse temperature");
    kl_cmd->add_flag("--discard-infeasible", kl_discard,
                     "Skip infeasible samples instead of decoding them");
    kl_cmd->add_option("--out", kl_out, "Output CSV")->required();

    // analyze
    auto* analyze_cmd =
        app.add_subcommand("analyze", "Residual-energy curve from traces");
    std::vector<std::string> an_traces;
    std::vector<double> an_egs;
    std::string an_model, an_map, an_out;
    int an_n = 0;
    bool an_strict = false;
    analyze_cmd->add_option("--trace", an_traces, "Trace JSONL file(s)")
        ->required();
    analyze_cmd->add_option("--egs", an_egs, "Ground-state energy per trace")
        ->required();
    analyze_cmd->add_option("--model", an_model, "Logical model file")
        ->required();
    analyze_cmd->add_option("--map", an_map, "Sparsification map file");
    analyze_cmd->add_option("--n", an_n, "Logical size for rho_E")->required();
    analyze_cmd->add_flag("--strict", an_strict,
                          "Drop infeasible samples instead of decoding");
    analyze_cmd->add_option("--out", an_out, "Output CSV")->required();

    // collapse
    auto* collapse_cmd =
        app.add_subcommand("collapse", "Finite-size scaling collapse");
    std::vector<std::string> co_curves;
    std::vector<int> co_sizes;
    double co_b = 0.0, co_mu_lo = 0.0, co_mu_hi = 15.0, co_mu_step = 0.1;
    double co_tmin = 0.0, co_tmax = 1e18;
    std::string co_out;
    collapse_cmd->add_option("--curve", co_curves, "Residual CSV file(s)")
        ->required();
    collapse_cmd->add_option("--n", co_sizes, "Logical size per curve")
        ->required();
    collapse_cmd->add_option("--b", co_b, "Fixed exponent b");
    collapse_cmd->add_option("--mu-lo", co_mu_lo, "Grid start");
    collapse_cmd->add_option("--mu-hi", co_mu_hi, "Grid end");
    collapse_cmd->add_option("--mu-step", co_mu_step, "Grid step");
    collapse_cmd->add_option("--t-min", co_tmin, "Window lower bound");
    collapse_cmd->add_option("--t-max", co_tmax, "Window upper bound");
    collapse_cmd->add_option("--out", co_out, "Output JSON")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen_wishart->parsed())
            return cmd_generate_wishart(gw_n, gw_alpha, gw_seed, gw_out,
                                        gw_force, gw_verify);
        if (gen_five->parsed())
            return cmd_generate_five_node(
                gf_couplings.empty()
                    ? std::nullopt
                    : std::optional<std::string>(gf_couplings),
                gf_out, gf_force);
        if (sparsify_cmd->parsed())
            return cmd_sparsify(sp_model, sp_copies, sp_degree, sp_out,
                                sp_force);
        if (schedule_cmd->parsed())
            return cmd_schedule(sc_model,
                                sc_map.empty()
                                    ? std::nullopt
                                    : std::optional<std::string>(sc_map),
                                sc_cfg, sc_out);
        if (run_cmd->parsed()) return cmd_run(rn_config, rn_baseline, rn_threads);
        if (kl_cmd->parsed())
            return cmd_kl(kl_trace, kl_model,
                          kl_map.empty() ? std::nullopt
                                         : std::optional<std::string>(kl_map),
                          kl_beta, kl_discard, kl_out);
        if (analyze_cmd->parsed())
            return cmd_analyze(an_traces, an_egs, an_model,
                               an_map.empty()
                                   ? std::nullopt
                                   : std::optional<std::string>(an_map),
                               an_n, an_strict, an_out);
        if (collapse_cmd->parsed())
            return cmd_collapse(co_curves, co_sizes, co_b, co_mu_lo, co_mu_hi,
                                co_mu_step, co_tmin, co_tmax, co_out);
        throw config_error("no subcommand given");
    } catch (const resource_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace tempergrid
