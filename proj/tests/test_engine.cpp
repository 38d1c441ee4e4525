// Replica-grid engine checks. Swap probabilities are frozen against
// high-precision reference values; pair scheduling, phase alternation, and
// marginal preservation are observed through always-accepting degenerate
// systems where every attempted exchange succeeds.

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "tempergrid/analysis.hpp"
#include "tempergrid/engine.hpp"
#include "tempergrid/errors.hpp"
#include "tempergrid/oracle.hpp"
#include "tempergrid/rng.hpp"

using namespace tempergrid;

namespace {

ConstrainedProblem free_spin() {
    return {IsingModel(1, {}, {0.0}), ConstraintSet(1, {})};
}

ConstrainedProblem constrained_pair() {
    IsingModel cost(2, {{0, 1, 0.6}}, {0.3, -0.2});
    return {cost, ConstraintSet(2, {{0, 1}})};
}

Schedule grid_schedule(std::vector<double> betas, std::vector<double> penalties) {
    Schedule s;
    s.betas = std::move(betas);
    s.penalties = std::move(penalties);
    return s;
}

}  // namespace

TEST_SUITE("engine") {

TEST_CASE("penalty-direction swap probabilities match reference values") {
    struct Case {
        double beta, dp, dg, expected;
    };
    const Case cases[] = {
        {1.0, 2.0, 0.0, 1.0},
        {1.0, 2.0, 4.0, 1.0},
        {1.0, 2.0, -4.0, 3.354626279025118e-4},
        {0.5, 1.0, -4.0, 0.1353352832366127},
        {2.0, 0.5, -8.0, 3.354626279025118e-4},
        {1.0, 3.0, 4.0, 1.0},
        {0.1, 10.0, -4.0, 0.018315638888734176},
        {1.5, 2.0, -2.0, 0.0024787521766663585},
        {3.0, 1.0, -1.0, 0.049787068367863944},
        {0.25, 4.0, -3.0, 0.049787068367863944},
    };
    for (const Case& c : cases)
        CHECK(p_swap_probability(c.beta, c.dp, c.dg) ==
              doctest::Approx(c.expected).epsilon(1e-12));
}

TEST_CASE("temperature-direction swap probabilities match reference values") {
    struct Case {
        double dbeta, de, expected;
    };
    const Case cases[] = {
        {0.5, 0.0, 1.0},
        {0.5, 6.0, 1.0},
        {0.5, -6.0, 0.049787068367863944},
        {0.2, -10.0, 0.13533528323661268},
        {1.0, -1.0, 0.36787944117144233},
        {0.05, -40.0, 0.13533528323661268},
        {0.3, 2.5, 1.0},
        {0.7, -0.5, 0.7046880897187135},
        {0.125, -16.0, 0.1353352832366127},
        {2.0, -0.25, 0.6065306597126334},
    };
    for (const Case& c : cases)
        CHECK(beta_swap_probability(c.dbeta, c.de) ==
              doctest::Approx(c.expected).epsilon(1e-12));
}

TEST_CASE("general rule reduces to both special cases") {
    RngStream rng(101);
    for (int rep = 0; rep < 1000; ++rep) {
        // Same-beta pair differing only in penalty: the f parts cancel.
        const double beta = 0.1 + 3.0 * rng.uniform01();
        const double pa = 0.5 + 2.0 * rng.uniform01();
        const double pb = pa + 0.1 + 2.0 * rng.uniform01();
        const double fa = 10.0 * rng.uniform01() - 5.0;
        const double fb = 10.0 * rng.uniform01() - 5.0;
        const double ga = 4.0 * static_cast<double>(rng.below(6));
        const double gb = 4.0 * static_cast<double>(rng.below(6));
        const double de_a = (fa + pa * ga) - (fb + pa * gb);
        const double de_b = (fb + pb * gb) - (fa + pb * ga);
        CHECK(general_swap_probability(beta, beta, de_a, de_b) ==
              doctest::Approx(p_swap_probability(beta, pb - pa, gb - ga))
                  .epsilon(1e-12));

        // Same-penalty pair differing only in beta: one shared landscape.
        const double ba = 0.1 + 2.0 * rng.uniform01();
        const double bb = ba + 0.05 + 2.0 * rng.uniform01();
        const double ea = 10.0 * rng.uniform01() - 5.0;
        const double eb = 10.0 * rng.uniform01() - 5.0;
        CHECK(general_swap_probability(ba, bb, ea - eb, eb - ea) ==
              doctest::Approx(beta_swap_probability(bb - ba, eb - ea))
                  .epsilon(1e-12));

        // Listing the pair in the other order gives the same probability.
        CHECK(general_swap_probability(ba, bb, ea - eb, eb - ea) ==
              doctest::Approx(general_swap_probability(bb, ba, eb - ea, ea - eb))
                  .epsilon(1e-15));
    }
}

TEST_CASE("a 1x1 grid never swaps") {
    RunConfig cfg;
    cfg.total_sweeps = 50;
    cfg.sweeps_per_swap = 5;
    cfg.seed = 3;
    Trace trace = run_2dpt(constrained_pair(), grid_schedule({1.0}, {2.0}), cfg);
    REQUIRE(trace.records.size() == 10);
    for (const TraceRecord& rec : trace.records) {
        CHECK(rec.acceptance_rates_p.empty());
        CHECK(rec.acceptance_rates_beta.empty());
    }
    CHECK(trace.records.back().sweep_count == 50);
}

TEST_CASE("single-row grids attempt penalty pairs with alternating parity") {
    // A free spin has g identically zero, so every attempted exchange is
    // accepted and the cumulative rates expose exactly which pairs ran.
    RunConfig cfg;
    cfg.total_sweeps = 2;
    cfg.sweeps_per_swap = 1;
    Trace trace =
        run_2dpt(free_spin(), grid_schedule({1.0}, {1.0, 2.0, 3.0, 4.0}), cfg);
    REQUIRE(trace.records.size() == 2);
    CHECK(trace.records[0].acceptance_rates_p ==
          std::vector<double>{1.0, 0.0, 1.0});
    CHECK(trace.records[1].acceptance_rates_p ==
          std::vector<double>{1.0, 1.0, 1.0});
    CHECK(trace.records[0].acceptance_rates_beta.empty());
}

TEST_CASE("single-column grids attempt beta pairs with alternating parity") {
    RunConfig cfg;
    cfg.total_sweeps = 2;
    cfg.sweeps_per_swap = 1;
    Trace trace = run_2dpt(free_spin(),
                           grid_schedule({0.5, 1.0, 1.5, 2.0}, {1.0}), cfg);
    REQUIRE(trace.records.size() == 2);
    CHECK(trace.records[0].acceptance_rates_beta ==
          std::vector<double>{1.0, 0.0, 1.0});
    CHECK(trace.records[1].acceptance_rates_beta ==
          std::vector<double>{1.0, 1.0, 1.0});
    CHECK(trace.records[0].acceptance_rates_p.empty());
}

TEST_CASE("full grids alternate the swap direction every two rounds") {
    RunConfig cfg;
    cfg.total_sweeps = 6;
    cfg.sweeps_per_swap = 1;
    Trace trace =
        run_2dpt(free_spin(), grid_schedule({1.0, 2.0}, {1.0, 2.0}), cfg);
    REQUIRE(trace.records.size() == 6);
    // Rounds 1-2 exchange along P (round 2's odd parity finds no pair),
    // rounds 3-4 along beta, round 5 along P again.
    CHECK(trace.records[0].acceptance_rates_p == std::vector<double>{1.0, 1.0});
    CHECK(trace.records[0].acceptance_rates_beta ==
          std::vector<double>{0.0, 0.0});
    CHECK(trace.records[2].acceptance_rates_beta ==
          std::vector<double>{1.0, 1.0});
    // No further P attempts happened between rounds 1 and 4.
    CHECK(trace.records[3].acceptance_rates_p == trace.records[0].acceptance_rates_p);
}

TEST_CASE("every replica preserves its own equilibrium distribution") {
    ConstrainedProblem problem = constrained_pair();
    Schedule schedule = grid_schedule({0.7, 1.2}, {1.0, 3.0});
    RunConfig cfg;
    cfg.total_sweeps = 400000;
    cfg.sweeps_per_swap = 5;
    cfg.seed = 31;
    cfg.store_target_only = false;
    Trace trace = run_2dpt(problem, schedule, cfg);
    REQUIRE(trace.records.size() == 80000);

    const std::size_t burn = 8000;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            std::vector<double> counts(4, 0.0);
            double total = 0.0;
            for (std::size_t r = burn; r < trace.records.size(); ++r) {
                counts[encode_state(trace.records[r].grid[i * 2 + j])] += 1.0;
                total += 1.0;
            }
            EffectiveModel view = build_effective(problem, schedule.penalties[j]);
            ExactDistribution exact =
                enumerate_boltzmann(view, schedule.betas[i]);
            double tv = 0.0;
            for (int k = 0; k < 4; ++k)
                tv += std::abs(counts[k] / total - exact.probabilities[k]);
            tv *= 0.5;
            CAPTURE(i);
            CAPTURE(j);
            CHECK(tv <= 0.02);
        }
    }
}

TEST_CASE("runs are deterministic and thread-count independent") {
    ConstrainedProblem problem = constrained_pair();
    Schedule schedule = grid_schedule({0.5, 1.0}, {1.0, 2.0});
    RunConfig cfg;
    cfg.total_sweeps = 500;
    cfg.sweeps_per_swap = 5;
    cfg.seed = 77;
    const std::string first = trace_to_jsonl(run_2dpt(problem, schedule, cfg));
    const std::string again = trace_to_jsonl(run_2dpt(problem, schedule, cfg));
    CHECK(first == again);
    cfg.threads = 3;
    const std::string threaded = trace_to_jsonl(run_2dpt(problem, schedule, cfg));
    CHECK(first == threaded);
}

TEST_CASE("invalid schedules and run configs are rejected") {
    RunConfig cfg;
    cfg.total_sweeps = 10;
    cfg.sweeps_per_swap = 1;
    CHECK_THROWS_AS(run_2dpt(free_spin(), grid_schedule({}, {1.0}), cfg),
                    config_error);
    CHECK_THROWS_AS(
        run_2dpt(free_spin(), grid_schedule({1.0, 1.0}, {1.0}), cfg),
        config_error);
    CHECK_THROWS_AS(
        run_2dpt(free_spin(), grid_schedule({1.0}, {2.0, 1.0}), cfg),
        config_error);
    RunConfig bad = cfg;
    bad.sweeps_per_swap = 0;
    CHECK_THROWS_AS(run_2dpt(free_spin(), grid_schedule({1.0}, {1.0}), bad),
                    config_error);
    bad = cfg;
    bad.total_sweeps = 0;
    CHECK_THROWS_AS(run_2dpt(free_spin(), grid_schedule({1.0}, {1.0}), bad),
                    config_error);
}

TEST_CASE("baseline merges repeats round by round") {
    ConstrainedProblem problem = constrained_pair();
    RunConfig cfg;
    cfg.total_sweeps = 1000;
    cfg.sweeps_per_swap = 10;
    cfg.seed = 5;
    BaselineTrace base =
        run_jcolumn_pt(problem, {0.5, 1.0}, 2.0, 3, cfg);
    REQUIRE(base.records.size() == 100);
    GroundState gs = exact_ground_state(problem.cost);
    for (const BaselineRecord& rec : base.records) {
        CHECK(rec.n_total == 3);
        CHECK(rec.n_feasible >= 0);
        CHECK(rec.n_feasible <= 3);
        CHECK(rec.any_feasible == (rec.n_feasible > 0));
        if (rec.any_feasible) CHECK(rec.best_f >= gs.energy - 1e-12);
    }
    CHECK(base.feasible_fraction >= 0.0);
    CHECK(base.feasible_fraction <= 1.0);
    CHECK_THROWS_AS(run_jcolumn_pt(problem, {0.5, 1.0}, 0.0, 3, cfg),
                    config_error);
    CHECK_THROWS_AS(run_jcolumn_pt(problem, {0.5, 1.0}, 2.0, 0, cfg),
                    config_error);
}

TEST_CASE("run-length encoding round-trips states") {
    RngStream rng(13);
    for (int rep = 0; rep < 20; ++rep) {
        SpinState s = random_state(40, rng);
        CHECK(rle_decode(rle_encode(s)) == s);
    }
    CHECK(rle_encode(SpinState(8, +1)) == std::vector<int>{8});
    CHECK(rle_encode({-1, -1, +1}) == std::vector<int>{-2, 1});
    CHECK_THROWS_AS(rle_decode({3, 0, 2}), config_error);
}

TEST_CASE("trace jsonl round-trip preserves records exactly") {
    ConstrainedProblem problem = constrained_pair();
    Schedule schedule = grid_schedule({0.5, 1.0}, {1.0, 2.0});
    RunConfig cfg;
    cfg.total_sweeps = 200;
    cfg.sweeps_per_swap = 4;
    cfg.seed = 11;
    Trace trace = run_2dpt(problem, schedule, cfg);

    const std::string path = (std::filesystem::temp_directory_path() /
                              "tempergrid_trace_roundtrip.jsonl")
                                 .string();
    save_trace(trace, path);
    Trace back = load_trace(path);
    std::filesystem::remove(path);

    REQUIRE(back.records.size() == trace.records.size());
    CHECK(back.sweeps_per_swap == trace.sweeps_per_swap);
    for (std::size_t k = 0; k < trace.records.size(); ++k) {
        const TraceRecord& a = trace.records[k];
        const TraceRecord& b = back.records[k];
        CHECK(a.round == b.round);
        CHECK(a.sweep_count == b.sweep_count);
        CHECK(a.f == b.f);
        CHECK(a.g == b.g);
        CHECK(a.feasible == b.feasible);
        CHECK(a.state == b.state);
        CHECK(a.acceptance_rates_p == b.acceptance_rates_p);
        CHECK(a.acceptance_rates_beta == b.acceptance_rates_beta);
    }
}

}  // TEST_SUITE
