#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tempergrid/ising.hpp"

namespace tempergrid {

struct WishartSpec {
    int n_logical = 0;
    double alpha = 0.75;
    std::uint64_t seed = 1;
};

struct GeneratedInstance {
    IsingModel model;
    SpinState planted_state;
    double planted_energy = 0.0;
    WishartSpec spec;
};

// Planted zero-field ensemble: J = -(1/n) W W^T (zero diagonal) where W is
// an n x m standard-normal matrix, m = round(alpha * n), with every column
// projected orthogonal to the planted vector t and rescaled by
// sqrt(n / (n - 1)). Then f(s) = ||W^T s||^2 / (2n) - tr(W W^T) / (2n), so t
// attains the global minimum by construction.
GeneratedInstance generate_wishart(const WishartSpec& spec);

// All-to-all 5-node model. Without a file, a fixed default with |J| in
// {1, 2} and nonzero fields whose Boltzmann distribution at beta = 1 is
// non-degenerate. A file override must contain a complete 5-node model.
IsingModel five_node_complete(
    const std::optional<std::string>& couplings_file = std::nullopt);

}  // namespace tempergrid
