#include "berkson/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "berkson/error.hpp"

namespace berkson {

namespace {

constexpr double kEnvelopeFloor = 1e-16;
constexpr double kMaxRadius = 1e6;

double envelope(double omega, double value) { return (1.0 + std::pow(omega, 4)) * value; }

// Smallest w with (1 + w^4) exp(-rate w^2) < 1e-16.
double gaussian_radius(double rate) {
    if (!(rate > 0.0)) {
        fail(ErrorKind::Divergence, "spectral integrand has no Gaussian decay");
    }
    const double log_floor = -std::log(kEnvelopeFloor);
    double x = log_floor / rate;
    for (int i = 0; i < 50; ++i) x = (log_floor + std::log1p(x * x)) / rate;
    return std::sqrt(x);
}

double max_mean_gap(const GaussianMixture& mix) {
    double gap = 0.0;
    for (const auto& a : mix.components()) {
        for (const auto& b : mix.components()) gap = std::max(gap, (a.mean - b.mean).norm());
    }
    return gap;
}

double min_component_var(const GaussianMixture& mix) {
    double v = std::numeric_limits<double>::infinity();
    for (const auto& c : mix.components()) v = std::min(v, c.covariance(0, 0));
    return v;
}

void require_scalar(const BerksonModel& model) {
    if (model.dim() != 1) {
        fail(ErrorKind::UnsupportedDimension, "spectral MISE is implemented for p = 1 only");
    }
}

}  // namespace

ErrorCharSq::ErrorCharSq(std::function<double(const Vector&)> fn, Eigen::Index dim,
                         std::optional<double> radius)
    : fn_(std::move(fn)), dim_(dim), radius_(radius) {
    if (dim_ < 1) fail(ErrorKind::Shape, "error spectrum dimension must be positive");
    if (radius_ || dim_ != 1) return;

    double lo = 0.0;
    double hi = 1.0;
    while (envelope(hi, (*this)(hi)) >= kEnvelopeFloor) {
        lo = hi;
        hi *= 2.0;
        if (hi > kMaxRadius) return;  // left empty: truncation_radius() reports divergence
    }
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (envelope(mid, (*this)(mid)) >= kEnvelopeFloor ? lo : hi) = mid;
    }
    radius_ = hi;
}

double ErrorCharSq::operator()(double omega) const {
    return fn_(Vector::Constant(1, omega));
}

double ErrorCharSq::truncation_radius() const {
    if (dim_ != 1) fail(ErrorKind::UnsupportedDimension, "truncation radius is one-dimensional");
    if (!radius_) {
        fail(ErrorKind::Divergence, "error characteristic function is not square integrable");
    }
    return *radius_;
}

ErrorCharSq error_char_sq_gaussian(const Matrix& error_cov) {
    require_psd(error_cov, "error covariance");
    std::optional<double> radius;
    if (error_cov.rows() == 1 && error_cov(0, 0) > 0.0) radius = gaussian_radius(error_cov(0, 0));
    // Zero variance leaves the radius to the automatic search, which finds none.
    auto fn = [cov = error_cov](const Vector& w) { return std::exp(-w.dot(cov * w)); };
    return ErrorCharSq(std::move(fn), error_cov.rows(), radius);
}

ErrorCharSq error_char_sq_gaussian(double error_var) {
    return error_char_sq_gaussian(Matrix::Constant(1, 1, error_var));
}

double integrate_even(const std::function<double(double)>& f, double radius, double max_frequency,
                      const QuadratureOptions& options) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        fail(ErrorKind::Divergence, "invalid truncation radius");
    }
    double width = radius / 8.0;
    if (max_frequency > 0.0) width = std::min(width, std::numbers::pi / (2.0 * max_frequency));
    const auto panels = static_cast<std::size_t>(std::ceil(radius / width));
    width = radius / static_cast<double>(panels);

    using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
    double total = 0.0;
    for (std::size_t i = 0; i < panels; ++i) {
        const double a = width * static_cast<double>(i);
        const double b = i + 1 == panels ? radius : a + width;
        total += Rule::integrate(f, a, b, options.max_depth, options.rel_tol);
    }
    return 2.0 * total;
}

FourierMiseParts fourier_mise_parts(const BerksonModel& model, double h, std::size_t n,
                                    const QuadratureOptions& options) {
    require_scalar(model);
    if (!(h >= 0.0)) fail(ErrorKind::Domain, "bandwidth must be nonnegative");
    if (n == 0) fail(ErrorKind::Domain, "sample size must be positive");

    const double err = model.error_cov()(0, 0);
    const double kvar = model.kernel_cov()(0, 0);
    const GaussianMixture& fx = model.fx();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double smooth = h * h * kvar;

    // Bias part decays with the narrowest f_X component, variance part with the kernel.
    const double rate = err + std::min(smooth, min_component_var(fx));
    const double radius = options.radius_scale * gaussian_radius(rate);
    const double freq = max_mean_gap(fx);

    auto bias = [&](double w) {
        const double one_minus_k = -std::expm1(-0.5 * smooth * w * w);
        return std::exp(-err * w * w) * one_minus_k * one_minus_k * char_fn_sq(fx, w);
    };
    auto variance = [&](double w) {
        const double k = std::exp(-0.5 * smooth * w * w);
        return std::exp(-err * w * w) * k * k * (1.0 - char_fn_sq(fx, w));
    };

    const double scale = 1.0 / (2.0 * std::numbers::pi);
    FourierMiseParts parts;
    parts.bias = h == 0.0 ? 0.0 : scale * integrate_even(bias, radius, freq, options);
    parts.variance = scale * inv_n * integrate_even(variance, radius, freq, options);
    return parts;
}

double fourier_mise(const BerksonModel& model, double h, std::size_t n,
                    const QuadratureOptions& options) {
    const auto parts = fourier_mise_parts(model, h, n, options);
    return parts.bias + parts.variance;
}

SpectralMoments spectral_moments(const ErrorCharSq& error,
                                 const std::function<double(double)>& fx_char_sq,
                                 double kernel_var, double max_frequency,
                                 const QuadratureOptions& options) {
    if (error.dim() != 1) fail(ErrorKind::UnsupportedDimension, "spectral moments need p = 1");
    const double radius = options.radius_scale * error.truncation_radius();

    auto nu0 = [&](double w) { return error(w) * (1.0 - fx_char_sq(w)); };
    auto nu2 = [&](double w) { return kernel_var * w * w * nu0(w); };
    auto mu4 = [&](double w) {
        const double q = kernel_var * w * w;
        return q * q * error(w) * fx_char_sq(w);
    };

    SpectralMoments m;
    m.t0 = integrate_even(nu0, radius, max_frequency, options);
    m.t2 = integrate_even(nu2, radius, max_frequency, options);
    m.t4 = integrate_even(mu4, radius, max_frequency, options);
    return m;
}

SpectralMoments spectral_moments(const BerksonModel& model, const QuadratureOptions& options) {
    require_scalar(model);
    if (!(model.error_cov()(0, 0) > 0.0)) {
        fail(ErrorKind::Divergence, "int dnu diverges when the error variance is zero");
    }
    const GaussianMixture& fx = model.fx();
    return spectral_moments(error_char_sq_gaussian(model.error_cov()),
                            [&fx](double w) { return char_fn_sq(fx, w); },
                            model.kernel_cov()(0, 0), max_mean_gap(fx), options);
}

}  // namespace berkson
