#include "tempergrid/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "tempergrid/errors.hpp"
#include "tempergrid/rng.hpp"

namespace tempergrid {

using nlohmann::json;

namespace {

double decoded_cost(const TraceRecord& record, const SparsificationMap& map,
                    const IsingModel& logical) {
    if (record.feasible) return record.f;
    return energy(logical, decode(map, record.state).logical);
}

double percentile(std::vector<double> values, double q) {
    std::sort(values.begin(), values.end());
    const double pos = q * (values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - lo) * (values[hi] - values[lo]);
}

}  // namespace

ResidualCurve residual_curve(const std::vector<ResidualInput>& runs,
                             const SparsificationMap& map,
                             const IsingModel& logical, int n_logical,
                             bool strict, int bootstrap_resamples,
                             std::uint64_t seed) {
    if (runs.empty()) throw config_error("residual: no runs given");
    const std::size_t n_rounds = runs.front().trace->records.size();
    for (const auto& run : runs)
        if (run.trace->records.size() != n_rounds)
            throw config_error("residual: traces have mismatched lengths");

    // Per run and round: rho, NaN when a strict-mode infeasible is dropped.
    std::vector<std::vector<double>> rho(runs.size(),
                                         std::vector<double>(n_rounds));
    for (std::size_t r = 0; r < runs.size(); ++r) {
        for (std::size_t k = 0; k < n_rounds; ++k) {
            const TraceRecord& record = runs[r].trace->records[k];
            if (strict && !record.feasible) {
                rho[r][k] = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            rho[r][k] = (decoded_cost(record, map, logical) - runs[r].e_gs) /
                        n_logical;
        }
    }

    ResidualCurve curve;
    curve.n_logical = n_logical;
    curve.trials = static_cast<int>(runs.size());
    std::set<int> ids;
    for (const auto& run : runs) ids.insert(run.instance_id);
    curve.instances = static_cast<int>(ids.size());
    curve.degenerate_ci = runs.size() < 2;

    RngStream rng(derive_seed(seed, StreamPurpose::bootstrap, 0));
    curve.points.resize(n_rounds);
    std::vector<double> values, means;
    for (std::size_t k = 0; k < n_rounds; ++k) {
        values.clear();
        for (std::size_t r = 0; r < runs.size(); ++r)
            if (!std::isnan(rho[r][k])) values.push_back(rho[r][k]);
        ResidualPoint& point = curve.points[k];
        point.t = runs.front().trace->records[k].sweep_count;
        if (values.empty()) {
            point.rho_e = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        double sum = 0.0;
        for (double v : values) sum += v;
        point.rho_e = sum / values.size();
        if (curve.degenerate_ci || values.size() < 2) continue;
        means.clear();
        for (int b = 0; b < bootstrap_resamples; ++b) {
            double s = 0.0;
            for (std::size_t r = 0; r < values.size(); ++r)
                s += values[rng.below(values.size())];
            means.push_back(s / values.size());
        }
        point.ci95 =
            0.5 * (percentile(means, 0.975) - percentile(means, 0.025));
    }
    return curve;
}

namespace {

struct LogCurve {
    double n = 0.0;
    std::vector<double> log_x;  // ascending
    std::vector<double> log_y;
};

double interpolate(const LogCurve& curve, double log_x) {
    const auto& xs = curve.log_x;
    auto it = std::lower_bound(xs.begin(), xs.end(), log_x);
    if (it == xs.begin()) return curve.log_y.front();
    if (it == xs.end()) return curve.log_y.back();
    const std::size_t hi = it - xs.begin();
    const std::size_t lo = hi - 1;
    const double w = (log_x - xs[lo]) / (xs[hi] - xs[lo]);
    return curve.log_y[lo] + w * (curve.log_y[hi] - curve.log_y[lo]);
}

}  // namespace

CollapseResult fss_collapse(const std::vector<ResidualCurve>& curves,
                            double b_fixed, const MuGrid& mu_grid,
                            double window_t_min, double window_t_max) {
    std::set<int> sizes;
    for (const auto& curve : curves) sizes.insert(curve.n_logical);
    if (sizes.size() < 3)
        throw config_error("collapse: need at least 3 distinct sizes");
    if (mu_grid.step <= 0.0 || mu_grid.hi < mu_grid.lo)
        throw config_error("collapse: bad mu grid");

    // Windowed positive points per curve, in raw (t, rho * N^b) form.
    struct RawCurve {
        double n;
        std::vector<double> t, y;
    };
    std::vector<RawCurve> raw;
    for (const auto& curve : curves) {
        RawCurve rc;
        rc.n = curve.n_logical;
        for (const auto& point : curve.points) {
            if (point.t < window_t_min || point.t > window_t_max) continue;
            const double y =
                point.rho_e * std::pow(rc.n, b_fixed);
            if (!(y > 0.0) || std::isnan(y)) continue;
            rc.t.push_back(static_cast<double>(point.t));
            rc.y.push_back(y);
        }
        if (rc.t.size() < 2)
            throw config_error("collapse: window leaves a curve empty");
        raw.push_back(std::move(rc));
    }

    CollapseResult best;
    best.b = b_fixed;
    best.t_min = window_t_min;
    best.t_max = window_t_max;
    best.objective = std::numeric_limits<double>::infinity();
    constexpr int kGridPoints = 64;

    const int steps =
        static_cast<int>(std::round((mu_grid.hi - mu_grid.lo) / mu_grid.step));
    for (int s = 0; s <= steps; ++s) {
        const double mu = mu_grid.lo + s * mu_grid.step;
        std::vector<LogCurve> rescaled;
        double lo = -std::numeric_limits<double>::infinity();
        double hi = std::numeric_limits<double>::infinity();
        for (const auto& rc : raw) {
            LogCurve lc;
            lc.n = rc.n;
            const double shift = -mu * std::log(rc.n);
            for (std::size_t k = 0; k < rc.t.size(); ++k) {
                lc.log_x.push_back(std::log(rc.t[k]) + shift);
                lc.log_y.push_back(std::log(rc.y[k]));
            }
            lo = std::max(lo, lc.log_x.front());
            hi = std::min(hi, lc.log_x.back());
            rescaled.push_back(std::move(lc));
        }
        if (!(lo < hi)) continue;  // no overlap at this mu

        double objective = 0.0;
        int terms = 0;
        std::vector<double> column(rescaled.size());
        for (int gp = 0; gp < kGridPoints; ++gp) {
            const double x = lo + (hi - lo) * gp / (kGridPoints - 1);
            for (std::size_t c = 0; c < rescaled.size(); ++c)
                column[c] = interpolate(rescaled[c], x);
            std::vector<double> sorted = column;
            std::sort(sorted.begin(), sorted.end());
            const double median = sorted[(sorted.size() - 1) / 2];
            for (double v : column) {
                objective += (v - median) * (v - median);
                ++terms;
            }
        }
        objective /= terms;
        if (objective < best.objective) {
            best.objective = objective;
            best.mu = mu;
        }
    }
    if (!std::isfinite(best.objective))
        throw config_error("collapse: curves never overlap on the mu grid");
    return best;
}

SwapRateReport swap_rate_report(const Trace& trace) {
    SwapRateReport report;
    if (trace.records.empty()) return report;
    report.rates_p = trace.records.back().acceptance_rates_p;
    report.rates_beta = trace.records.back().acceptance_rates_beta;
    return report;
}

std::vector<KlPoint> kl_curve(const Trace& trace, const SparsificationMap& map,
                              const IsingModel& logical, double beta,
                              bool discard_infeasible) {
    const ExactDistribution exact = enumerate_boltzmann(logical, beta);
    const std::int64_t k_states = std::int64_t{1} << logical.n_spins();
    Histogram hist;
    hist.n = logical.n_spins();
    std::vector<KlPoint> points;
    points.reserve(trace.records.size());
    for (const auto& record : trace.records) {
        const DecodedState decoded = decode(map, record.state);
        if (decoded.feasible || !discard_infeasible)
            hist.add(encode_state(decoded.logical));
        KlPoint point;
        point.t = record.sweep_count;
        point.samples = static_cast<std::int64_t>(hist.total);
        point.kl = hist.total == 0
                       ? std::numeric_limits<double>::quiet_NaN()
                       : kl_divergence(hist, exact);
        point.iid_reference =
            hist.total == 0
                ? std::numeric_limits<double>::quiet_NaN()
                : expected_kl_bias(k_states, point.samples);
        points.push_back(point);
    }
    return points;
}

std::vector<EnergySample> feasible_series(const Trace& trace) {
    std::vector<EnergySample> series;
    series.reserve(trace.records.size());
    for (const auto& record : trace.records)
        series.push_back({record.sweep_count, record.f, record.feasible});
    return series;
}

std::vector<EnergySample> feasible_series(const BaselineTrace& trace) {
    std::vector<EnergySample> series;
    series.reserve(trace.records.size());
    for (const auto& record : trace.records)
        series.push_back({record.sweep_count, record.best_f,
                          record.any_feasible});
    return series;
}

std::optional<std::int64_t> time_to_residual(
    const std::vector<EnergySample>& series, double e_gs, int n_logical,
    double rho_max) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& sample : series) {
        if (!sample.feasible) continue;
        best = std::min(best, sample.f);
        if ((best - e_gs) / n_logical <= rho_max) return sample.t;
    }
    return std::nullopt;
}

double loglog_slope(const std::vector<std::pair<double, double>>& points,
                    double t_lo, double t_hi) {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int n = 0;
    for (const auto& [t, y] : points) {
        if (t < t_lo || t > t_hi || !(y > 0.0)) continue;
        const double x = std::log(t);
        const double ly = std::log(y);
        sx += x;
        sy += ly;
        sxx += x * x;
        sxy += x * ly;
        ++n;
    }
    if (n < 2) throw config_error("slope: fewer than 2 usable points");
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::string residual_curve_to_csv(const ResidualCurve& curve) {
    std::ostringstream out;
    out.precision(17);
    out << "t,rho_E,ci95\n";
    for (const auto& point : curve.points)
        out << point.t << ',' << point.rho_e << ',' << point.ci95 << '\n';
    return out.str();
}

std::string kl_curve_to_csv(const std::vector<KlPoint>& points) {
    std::ostringstream out;
    out.precision(17);
    out << "t,samples,kl,iid_reference\n";
    for (const auto& point : points)
        out << point.t << ',' << point.samples << ',' << point.kl << ','
            << point.iid_reference << '\n';
    return out.str();
}

std::string collapse_to_json_text(const CollapseResult& result) {
    json j;
    j["b"] = result.b;
    j["mu"] = result.mu;
    j["objective"] = result.objective;
    j["window"] = {result.t_min, result.t_max};
    return j.dump(2) + "\n";
}

}  // namespace tempergrid
