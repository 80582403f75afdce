#include "berkson/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "berkson/bandwidth.hpp"
#include "berkson/error.hpp"
#include "berkson/parallel.hpp"

namespace berkson {

namespace {

constexpr Eigen::Index kIsePoints = 2001;

void require_scalar(const BerksonModel& model) {
    if (model.dim() != 1) fail(ErrorKind::UnsupportedDimension, "Monte Carlo runs need p = 1");
}

Vector truth_on(const BerksonModel& model, const Vector& grid) {
    const GaussianMixture fy = model.fy();
    Vector out(grid.size());
    for (Eigen::Index i = 0; i < grid.size(); ++i) out(i) = mixture_pdf(fy, grid(i));
    return out;
}

}  // namespace

double rule_bandwidth(const BerksonModel& model, std::size_t n, BandRule rule, double value) {
    switch (rule) {
        case BandRule::HY:
            return optimal_scalar_bandwidth(model, n, Target::Y).value;
        case BandRule::HX:
            return optimal_scalar_bandwidth(model, n, Target::X).value;
        case BandRule::Zero:
            return 0.0;
        case BandRule::Value:
            if (!(value >= 0.0)) fail(ErrorKind::Domain, "fixed bandwidth must be >= 0");
            return value;
    }
    return 0.0;
}

BandResult quantile_bands(const BerksonModel& model, std::size_t n, std::size_t replicates,
                          const BandOptions& options) {
    require_scalar(model);
    if (replicates < 2) fail(ErrorKind::Domain, "quantile bands need at least two replicates");
    if (!(options.q_lo >= 0.0 && options.q_lo <= options.q_hi && options.q_hi <= 1.0)) {
        fail(ErrorKind::Domain, "quantiles must satisfy 0 <= q_lo <= q_hi <= 1");
    }
    if (n == 0) fail(ErrorKind::Domain, "sample size must be positive");

    BandResult r;
    r.bandwidth = rule_bandwidth(model, n, options.rule, options.value);
    r.grid = model_grid(model, r.bandwidth, options.grid_points);
    r.truth = truth_on(model, r.grid);

    const auto bw = BandwidthSpec::scalar(r.bandwidth);
    const double err = model.error_cov()(0, 0);
    const double kvar = model.kernel_cov()(0, 0);
    std::vector<Vector> curves(replicates);
    parallel_for(replicates, options.threads, [&](std::size_t rep) {
        const SampleMatrix x = sample(model.fx(), n, options.seed, rep);
        curves[rep] = evaluate_estimator(x, err, bw, r.grid, kvar).values;
    });

    const Eigen::Index m = r.grid.size();
    r.lower.resize(m);
    r.upper.resize(m);
    r.median.resize(m);
    std::vector<double> column(replicates);
    for (Eigen::Index g = 0; g < m; ++g) {
        for (std::size_t rep = 0; rep < replicates; ++rep) column[rep] = curves[rep](g);
        std::sort(column.begin(), column.end());
        r.lower(g) = quantile_sorted(column, options.q_lo);
        r.upper(g) = quantile_sorted(column, options.q_hi);
        r.median(g) = quantile_sorted(column, 0.5);
    }
    const std::size_t keep = std::min(options.keep_curves, replicates);
    r.replicate_curves.assign(curves.begin(), curves.begin() + static_cast<std::ptrdiff_t>(keep));
    return r;
}

Vector ise_grid(const BerksonModel& model, double h) {
    require_scalar(model);
    const double added = model.error_cov()(0, 0) + h * h;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : model.fx().components()) {
        const double sd = std::sqrt(c.covariance(0, 0) + added);
        lo = std::min(lo, c.mean(0) - 10.0 * sd);
        hi = std::max(hi, c.mean(0) + 10.0 * sd);
    }
    return Vector::LinSpaced(kIsePoints, lo, hi);
}

IseEstimate monte_carlo_ise(const BerksonModel& model, std::size_t n, std::size_t replicates,
                            double h, std::uint64_t seed, unsigned threads) {
    require_scalar(model);
    if (replicates < 30) fail(ErrorKind::Domain, "Monte Carlo ISE needs at least 30 replicates");
    if (n == 0) fail(ErrorKind::Domain, "sample size must be positive");

    const Vector grid = ise_grid(model, h);
    const Vector truth = truth_on(model, grid);
    const auto bw = BandwidthSpec::scalar(h);
    const double err = model.error_cov()(0, 0);
    const double kvar = model.kernel_cov()(0, 0);

    std::vector<double> ise(replicates);
    parallel_for(replicates, threads, [&](std::size_t rep) {
        const SampleMatrix x = sample(model.fx(), n, seed, rep);
        const Vector diff = evaluate_estimator(x, err, bw, grid, kvar).values - truth;
        ise[rep] = simpson(grid, diff.cwiseAbs2());
    });

    // Two-pass reduction in replicate order.
    const auto count = static_cast<double>(replicates);
    double mean = 0.0;
    for (double v : ise) mean += v;
    mean /= count;
    double ss = 0.0;
    for (double v : ise) ss += (v - mean) * (v - mean);
    IseEstimate out;
    out.mean = mean;
    out.standard_error = std::sqrt(ss / (count - 1.0) / count);
    return out;
}

}  // namespace berkson
