// Instance generator checks. The planted construction is verified by exact
// enumeration on sizes small enough to scan: the planted state must attain
// the global minimum.

#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <vector>

#include "tempergrid/errors.hpp"
#include "tempergrid/instances.hpp"
#include "tempergrid/oracle.hpp"

using namespace tempergrid;

TEST_SUITE("instances") {

TEST_CASE("planted energy is the model energy of the planted state") {
    WishartSpec spec;
    spec.n_logical = 14;
    spec.seed = 42;
    GeneratedInstance inst = generate_wishart(spec);
    CHECK(inst.planted_energy ==
          doctest::Approx(energy(inst.model, inst.planted_state))
              .epsilon(1e-14));
    CHECK(inst.model.n_spins() == 14);
    // All-to-all couplings, no fields.
    CHECK(inst.model.couplings().size() == 14 * 13 / 2);
    for (double h : inst.model.fields()) CHECK(h == 0.0);
}

TEST_CASE("generation is deterministic in the spec") {
    WishartSpec spec;
    spec.n_logical = 10;
    spec.seed = 7;
    GeneratedInstance a = generate_wishart(spec);
    GeneratedInstance b = generate_wishart(spec);
    REQUIRE(a.model.couplings().size() == b.model.couplings().size());
    for (size_t k = 0; k < a.model.couplings().size(); ++k)
        CHECK(a.model.couplings()[k].weight == b.model.couplings()[k].weight);
    CHECK(a.planted_state == b.planted_state);

    spec.seed = 8;
    GeneratedInstance c = generate_wishart(spec);
    bool any_different = false;
    for (size_t k = 0; k < a.model.couplings().size(); ++k)
        if (a.model.couplings()[k].weight != c.model.couplings()[k].weight)
            any_different = true;
    CHECK(any_different);
}

TEST_CASE("planted state is a global minimum across seeds") {
    // Exact enumeration over 2^12 states; the construction plants the
    // minimum up to the global spin-flip degeneracy.
    for (std::uint64_t seed : {1ull, 2ull, 3ull, 4ull, 5ull, 11ull, 17ull,
                               23ull, 31ull, 41ull}) {
        WishartSpec spec;
        spec.n_logical = 12;
        spec.alpha = 0.75;
        spec.seed = seed;
        GeneratedInstance inst = generate_wishart(spec);
        GroundState gs = exact_ground_state(inst.model);
        CAPTURE(seed);
        CHECK(gs.energy >= inst.planted_energy - 1e-9);
        CHECK(gs.energy == doctest::Approx(inst.planted_energy).epsilon(1e-9));
        SpinState flipped = inst.planted_state;
        for (Spin& s : flipped) s = static_cast<Spin>(-s);
        CHECK((gs.state == inst.planted_state || gs.state == flipped));
    }
}

TEST_CASE("zero fields make the spectrum flip symmetric") {
    WishartSpec spec;
    spec.n_logical = 9;
    spec.seed = 101;
    GeneratedInstance inst = generate_wishart(spec);
    SpinState flipped = inst.planted_state;
    for (Spin& s : flipped) s = static_cast<Spin>(-s);
    CHECK(energy(inst.model, flipped) ==
          doctest::Approx(inst.planted_energy).epsilon(1e-12));
}

TEST_CASE("planted energy per spin stays bounded across sizes") {
    for (int n : {12, 24, 48}) {
        WishartSpec spec;
        spec.n_logical = n;
        spec.seed = 55;
        GeneratedInstance inst = generate_wishart(spec);
        const double per_spin = inst.planted_energy / n;
        CAPTURE(n);
        CHECK(per_spin < -0.05);
        CHECK(per_spin > -1.5);
    }
}

TEST_CASE("spec validation") {
    WishartSpec spec;
    spec.n_logical = 2;
    CHECK_THROWS_AS(generate_wishart(spec), config_error);
    spec.n_logical = 4;
    spec.alpha = 0.01;  // m rounds to zero
    CHECK_THROWS_AS(generate_wishart(spec), config_error);
}

TEST_CASE("default 5-node instance") {
    IsingModel model = five_node_complete();
    CHECK(model.n_spins() == 5);
    CHECK(model.couplings().size() == 10);
    int nonzero_fields = 0;
    for (double h : model.fields())
        if (h != 0.0) ++nonzero_fields;
    CHECK(nonzero_fields > 0);
    for (const Coupling& c : model.couplings()) {
        const double a = std::abs(c.weight);
        CHECK((a == 1.0 || a == 2.0));
    }
    // Frozen properties this instance was chosen for: a unique ground state
    // with a clean gap, so finite-beta sampling is non-degenerate.
    GroundState gs = exact_ground_state(model);
    CHECK(gs.energy == doctest::Approx(-5.5));
    CHECK(encode_state(gs.state) == 13);
    ExactDistribution d = enumerate_boltzmann(model, 1.0);
    CHECK(d.probabilities[13] == doctest::Approx(0.21449522432110954).epsilon(1e-12));
}

TEST_CASE("file override replaces the default 5-node model") {
    const auto dir = std::filesystem::temp_directory_path();
    const std::string good = (dir / "five_override.json").string();
    {
        std::ofstream out(good);
        out << R"({"n": 5, "couplings": [[0,1,1.0],[0,2,-1.0],[0,3,1.0],)"
            << R"([0,4,-1.0],[1,2,1.0],[1,3,-1.0],[1,4,1.0],[2,3,-1.0],)"
            << R"([2,4,1.0],[3,4,-1.0]], "fields": [0,0,0,0,0]})";
    }
    IsingModel model = five_node_complete(good);
    CHECK(model.couplings()[0].weight == 1.0);
    CHECK(model.fields()[0] == 0.0);
    std::filesystem::remove(good);

    const std::string bad = (dir / "five_override_bad.json").string();
    {
        std::ofstream out(bad);
        out << R"({"n": 4, "couplings": [[0,1,1.0],[0,2,1.0],[0,3,1.0],)"
            << R"([1,2,1.0],[1,3,1.0],[2,3,1.0]], "fields": [0,0,0,0]})";
    }
    CHECK_THROWS_AS(five_node_complete(bad), config_error);
    std::filesystem::remove(bad);
}

}  // TEST_SUITE
