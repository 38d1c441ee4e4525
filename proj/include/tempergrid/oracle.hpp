#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "tempergrid/constraints.hpp"
#include "tempergrid/ising.hpp"

namespace tempergrid {

// States are numbered by binary encoding: spin +1 <-> bit 1, spin index 0 is
// the least significant bit. Exact enumeration is refused above this size.
inline constexpr int kMaxEnumerationSpins = 24;

std::uint64_t encode_state(const SpinState& state);
SpinState decode_state(int n_spins, std::uint64_t encoding);

// Sample counts over the 2^n state encodings.
struct Histogram {
    int n = 0;
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t total = 0;

    void add(std::uint64_t encoding, std::uint64_t weight = 1) {
        counts[encoding] += weight;
        total += weight;
    }
};

Histogram histogram_from_json_text(const std::string& text);
std::string histogram_to_json_text(const Histogram& hist);
Histogram load_histogram(const std::string& path);
void save_histogram(const Histogram& hist, const std::string& path);

// Boltzmann distribution over all 2^n states, indexed by encoding.
struct ExactDistribution {
    double beta = 0.0;
    std::vector<double> probabilities;
    double log_partition = 0.0;
};

ExactDistribution enumerate_boltzmann(const IsingModel& model, double beta);
ExactDistribution enumerate_boltzmann(const EffectiveModel& view, double beta);

struct GroundState {
    SpinState state;
    double energy = 0.0;
};

// Global minimum of the (total) energy; ties go to the smallest encoding.
GroundState exact_ground_state(const IsingModel& model);
GroundState exact_ground_state(const EffectiveModel& view);

// D(p_hat || p) = sum p_hat log(p_hat / p), natural log, over states with
// nonzero counts. The target must have full support there.
double kl_divergence(const Histogram& empirical, const ExactDistribution& exact);

// Expected small-sample bias of the empirical KL: (k - 1) / (2t) for t
// i.i.d. samples from a k-state distribution.
double expected_kl_bias(std::int64_t k, std::int64_t t);

struct ExactMoments {
    double mean_e = 0.0;
    double var_e = 0.0;
    double mean_g = 0.0;
    double var_g = 0.0;
};

ExactMoments exact_moments(const IsingModel& model, double beta);
ExactMoments exact_moments(const EffectiveModel& view, double beta);

}  // namespace tempergrid
