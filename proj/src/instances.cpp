#include "tempergrid/instances.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "tempergrid/errors.hpp"
#include "tempergrid/rng.hpp"

namespace tempergrid {

GeneratedInstance generate_wishart(const WishartSpec& spec) {
    const int n = spec.n_logical;
    if (n < 3) throw config_error("wishart: n must be >= 3");
    const int m = static_cast<int>(std::lround(spec.alpha * n));
    if (m < 1) throw config_error("wishart: alpha * n rounds to zero columns");

    RngStream rng(derive_seed(spec.seed, StreamPurpose::init, 0));
    SpinState planted(n);
    for (auto& s : planted) s = rng.spin();

    Eigen::VectorXd t(n);
    for (int i = 0; i < n; ++i) t[i] = planted[i];

    const double rescale = std::sqrt(static_cast<double>(n) / (n - 1.0));
    Eigen::MatrixXd w(n, m);
    for (int c = 0; c < m; ++c) {
        Eigen::VectorXd z(n);
        for (int i = 0; i < n; ++i) z[i] = rng.normal();
        w.col(c) = rescale * (z - (z.dot(t) / n) * t);
    }

    const Eigen::MatrixXd gram = w * w.transpose();
    std::vector<Coupling> couplings;
    couplings.reserve(n * (n - 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            couplings.push_back({i, j, -gram(i, j) / n});

    GeneratedInstance out{IsingModel(n, std::move(couplings),
                                     std::vector<double>(n, 0.0)),
                          std::move(planted), 0.0, spec};
    out.planted_energy = energy(out.model, out.planted_state);
    return out;
}

IsingModel five_node_complete(const std::optional<std::string>& couplings_file) {
    if (couplings_file) {
        IsingModel model = load_model(*couplings_file);
        if (model.n_spins() != 5 || model.couplings().size() != 10)
            throw config_error(
                "five-node override must be a complete 5-node model");
        return model;
    }
    return IsingModel(5,
                      {{0, 1, -1.0},
                       {0, 2, -1.0},
                       {0, 3, -2.0},
                       {0, 4, -2.0},
                       {1, 2, -1.0},
                       {1, 3, -1.0},
                       {1, 4, -2.0},
                       {2, 3, -1.0},
                       {2, 4, -1.0},
                       {3, 4, -2.0}},
                      {0.5, -1.0, 0.5, 0.5, -1.0});
}

}  // namespace tempergrid
