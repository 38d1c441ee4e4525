#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace tempergrid {

namespace detail {

// SplitMix64 finalizer. Bijective on 64-bit words; used to turn structured
// stream coordinates into well-scrambled seeds.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

}  // namespace detail

// Stream purposes keep independent uses of the master seed from colliding.
enum class StreamPurpose : std::uint64_t {
    replica = 1,     // per-replica sweep stream, index = replica id
    swap = 2,        // engine swap decisions, one stream per run
    init = 3,        // initial spin configurations
    probe = 4,       // schedule probe chains
    repeat = 5,      // per-repeat master seeds (J-column baseline)
    sampling = 6,    // i.i.d. sampling experiments
    bootstrap = 7,   // bootstrap resampling
};

// Seed of stream (purpose, index) under a master seed:
//   mix64(mix64(master ^ mix64(purpose)) ^ index).
// Nested finalizers keep (master, purpose, index) triples decorrelated.
inline std::uint64_t derive_seed(std::uint64_t master, StreamPurpose purpose,
                                 std::uint64_t index) {
    const std::uint64_t p = detail::mix64(static_cast<std::uint64_t>(purpose));
    return detail::mix64(detail::mix64(master ^ p) ^ index);
}

// A seeded random stream with portable draw functions. The standard
// distributions are implementation-defined, so everything downstream of the
// raw engine is spelled out here: runs reproduce bit-identically anywhere.
class RngStream {
public:
    RngStream() : gen_(0) {}
    explicit RngStream(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t bits() { return gen_(); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, n), unbiased via rejection.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    // Standard normal via Box-Muller. Uses two uniforms per call, no cache,
    // so consumption is predictable.
    double normal() {
        double u1;
        do {
            u1 = uniform01();
        } while (u1 <= 0.0);
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return r * std::cos(6.283185307179586476925286766559 * u2);
    }

    int spin() { return (gen_() >> 63) ? 1 : -1; }

private:
    std::mt19937_64 gen_;
};

}  // namespace tempergrid
