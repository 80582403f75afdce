#include "berkson/experiments.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "berkson/bandwidth.hpp"
#include "berkson/error.hpp"
#include "berkson/parallel.hpp"

namespace berkson {

namespace {

GaussianComponent scalar_component(double weight, double mean, double var) {
    return {weight, Vector::Constant(1, mean), Matrix::Constant(1, 1, var)};
}

GaussianComponent component_3d(double weight, const Vector& mean, const Matrix& cov) {
    return {weight, mean, cov};
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

}  // namespace

std::vector<DensityCatalogEntry> catalog_1d() {
    return {
        {"normal", "Normal", GaussianMixture({scalar_component(1.0, 0.0, 1.0)})},
        {"bimodal1", "Bimodal 1",
         GaussianMixture({scalar_component(0.7, 0.0, 1.0), scalar_component(0.3, 3.0, 1.0)})},
        {"bimodal2", "Bimodal 2",
         GaussianMixture({scalar_component(0.5, -6.0, 1.0), scalar_component(0.5, 6.0, 1.0)})},
        {"trimodal", "Trimodal",
         GaussianMixture({scalar_component(0.4, -4.0, 2.0), scalar_component(0.2, 0.0, 0.3),
                          scalar_component(0.4, 3.0, 1.0)})},
    };
}

Matrix banded_covariance(double sign) {
    Matrix m = Matrix::Identity(3, 3);
    m(0, 1) = m(1, 0) = m(1, 2) = m(2, 1) = sign * 0.64;
    require_spd(m, "banded covariance");
    return m;
}

std::vector<DensityCatalogEntry> catalog_3d() {
    const Matrix id = Matrix::Identity(3, 3);
    const Matrix plus = banded_covariance(1.0);
    const Matrix minus = banded_covariance(-1.0);
    const Vector zero = Vector::Zero(3);
    const Vector ones = Vector::Ones(3);
    Vector shift = Vector::Zero(3);
    shift(0) = 6.0;
    return {
        {"multi_normal", "Multi Normal", GaussianMixture({component_3d(1.0, zero, id)})},
        {"multi_2comp1", "Multi 2-Comp 1",
         GaussianMixture({component_3d(0.7, zero, plus), component_3d(0.3, ones, minus)})},
        {"multi_2comp2", "Multi 2-Comp 2",
         GaussianMixture({component_3d(0.5, shift, id), component_3d(0.5, -shift, id)})},
        {"multi_3comp", "Multi 3-Comp",
         GaussianMixture({component_3d(0.4, zero, plus), component_3d(0.2, ones, minus),
                          component_3d(0.4, zero, minus)})},
    };
}

const DensityCatalogEntry& find_density(const std::string& name) {
    static const std::vector<DensityCatalogEntry> all = [] {
        auto v = catalog_1d();
        for (auto& e : catalog_3d()) v.push_back(std::move(e));
        return v;
    }();
    const std::string wanted = lower(name);
    for (const auto& e : all) {
        if (lower(e.key) == wanted || lower(e.name) == wanted) return e;
    }
    fail(ErrorKind::Config, "unknown density '" + name + "'");
}

RatioCell ratio_cell(const DensityCatalogEntry& density, double sigma_eps2, std::size_t n) {
    if (!(sigma_eps2 > 0.0)) fail(ErrorKind::Domain, "error variance must be positive");
    const Eigen::Index p = density.mixture.dim();
    const BerksonModel model(density.mixture, sigma_eps2 * Matrix::Identity(p, p));

    RatioCell c;
    c.density = density.name;
    c.sigma_eps2 = sigma_eps2;
    c.n = n;
    const BandwidthResult hy = optimal_scalar_bandwidth(model, n, Target::Y);
    const BandwidthResult hx = optimal_scalar_bandwidth(model, n, Target::X);
    c.h_y = hy.value;
    c.h_x = hx.value;
    c.mise_hy = hy.objective;
    c.mise_hx = exact_mise(model, BandwidthSpec::scalar(c.h_x), n);
    c.mise_zero = exact_mise(model, BandwidthSpec::scalar(0.0), n);
    c.ratio_zero = c.mise_zero / c.mise_hy;
    c.ratio_hx = c.mise_hx / c.mise_hy;
    return c;
}

std::vector<RatioCell> ratio_table(const std::vector<DensityCatalogEntry>& densities,
                                   const std::vector<double>& sigma_eps2, std::size_t n,
                                   unsigned threads) {
    const std::size_t per = sigma_eps2.size();
    std::vector<RatioCell> cells(densities.size() * per);
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        cells[i] = ratio_cell(densities[i / per], sigma_eps2[i % per], n);
    });
    return cells;
}

std::vector<std::size_t> log_spaced_sizes(std::size_t lo, std::size_t hi, std::size_t count) {
    if (lo == 0 || hi < lo || count < 2) fail(ErrorKind::Domain, "invalid log-spaced range");
    std::vector<std::size_t> out;
    const double a = std::log(static_cast<double>(lo));
    const double b = std::log(static_cast<double>(hi));
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(count - 1);
        const auto v = static_cast<std::size_t>(std::llround(std::exp(a + t * (b - a))));
        if (out.empty() || out.back() != v) out.push_back(v);
    }
    return out;
}

std::vector<RatioCurve> ratio_curve(const DensityCatalogEntry& density,
                                    const std::vector<double>& sigma_eps2,
                                    const std::vector<std::size_t>& sizes, unsigned threads) {
    if (density.mixture.dim() != 1) {
        fail(ErrorKind::UnsupportedDimension, "ratio curves are one-dimensional");
    }
    std::vector<RatioCurve> curves(sigma_eps2.size());
    const std::size_t per = sizes.size();
    for (std::size_t s = 0; s < sigma_eps2.size(); ++s) {
        curves[s].sigma_eps2 = sigma_eps2[s];
        curves[s].points.resize(per);
    }
    parallel_for(sigma_eps2.size() * per, threads, [&](std::size_t i) {
        const std::size_t s = i / per;
        const BerksonModel model = BerksonModel::scalar(density.mixture, sigma_eps2[s]);
        RatioCurvePoint& pt = curves[s].points[i % per];
        pt.n = sizes[i % per];
        pt.h_y = optimal_scalar_bandwidth(model, pt.n, Target::Y).value;
        pt.h_star = asymptotic_bandwidth(model, pt.n);
        pt.ratio = pt.h_y / pt.h_star;
    });
    return curves;
}

Vector no2_exposure(const Matrix& records) {
    if (records.cols() != 2) fail(ErrorKind::Shape, "NO2 records need two columns (wk, wb)");
    Vector x(records.rows());
    for (Eigen::Index i = 0; i < records.rows(); ++i) {
        const double wk = records(i, 0);
        const double wb = records(i, 1);
        if (!(wk > 0.0) || !(wb > 0.0) || !std::isfinite(wk) || !std::isfinite(wb)) {
            fail(ErrorKind::Domain,
                 "record " + std::to_string(i) + " has a nonpositive concentration");
        }
        x(i) = 1.22 + 0.3 * std::log(wk) + 0.33 * std::log(wb);
    }
    return x;
}

No2Result no2_pipeline(const Matrix& records, double sigma_eps2, Eigen::Index grid_points) {
    if (!(sigma_eps2 > 0.0)) fail(ErrorKind::Domain, "error variance must be positive");
    No2Result r;
    r.x = no2_exposure(records);
    const SampleMatrix x = SampleMatrix::from_values(r.x);
    const auto n = static_cast<std::size_t>(x.size());
    const double var = sample_variance(x);
    r.h_x = silverman_hx(std::sqrt(var), sample_iqr(x), n);
    r.h_y = rule_of_thumb_hy_gaussian(var, sigma_eps2, n);

    const Vector grid = default_grid(x, sigma_eps2, std::max(r.h_x, r.h_y), grid_points);
    r.zero = evaluate_estimator(x, sigma_eps2, BandwidthSpec::scalar(0.0), grid);
    r.hx = evaluate_estimator(x, sigma_eps2, BandwidthSpec::scalar(r.h_x), grid);
    r.hy = evaluate_estimator(x, sigma_eps2, BandwidthSpec::scalar(r.h_y), grid);
    return r;
}

double round_half_away(double value, int digits) {
    const double scale = std::pow(10.0, digits);
    return std::round(value * scale) / scale;
}

}  // namespace berkson
