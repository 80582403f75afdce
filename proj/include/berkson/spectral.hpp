#pragma once

#include <functional>
#include <optional>

#include "berkson/model.hpp"

namespace berkson {

/// Controls for the half-line spectral quadrature.
///
/// Integrals are taken over [0, R] and doubled (every integrand is even).
/// R is the smallest radius at which (1 + w^4) |f_eps(w)|^2 < 1e-16, scaled
/// by `radius_scale`. The interval is cut into panels no wider than a quarter
/// period of the fastest mixture oscillation, and each panel is integrated by
/// adaptive Gauss-Kronrod to `rel_tol`.
struct QuadratureOptions {
    double rel_tol = 1e-10;
    double radius_scale = 1.0;
    unsigned max_depth = 12;
};

/// |f_eps(w)|^2 for a known error density.
class ErrorCharSq {
public:
    /// `radius`, when given, overrides the automatic truncation search.
    ErrorCharSq(std::function<double(const Vector&)> fn, Eigen::Index dim,
                std::optional<double> radius = std::nullopt);

    double operator()(const Vector& omega) const { return fn_(omega); }
    double operator()(double omega) const;

    Eigen::Index dim() const noexcept { return dim_; }

    /// Truncation radius for one-dimensional integrals. Throws Divergence when
    /// (1 + w^4)|f_eps(w)|^2 never falls below 1e-16 (error density not square
    /// integrable with the moments the MISE needs).
    double truncation_radius() const;

private:
    std::function<double(const Vector&)> fn_;
    Eigen::Index dim_;
    std::optional<double> radius_;
};

/// exp(-w' Sigma_eps w).
ErrorCharSq error_char_sq_gaussian(const Matrix& error_cov);
ErrorCharSq error_char_sq_gaussian(double error_var);

/// Integrals of the spectral measures
///   dmu = |f_eps|^2 |f_X|^2 dw,   dnu = |f_eps|^2 (1 - |f_X|^2) dw.
struct SpectralMoments {
    double t0 = 0.0;  ///< int dnu
    double t2 = 0.0;  ///< int (w' Sigma_K w) dnu
    double t4 = 0.0;  ///< int (w' Sigma_K w)^2 dmu
};

/// 2 * int_0^radius f, panelled so no panel spans more than a quarter period
/// of `max_frequency`.
double integrate_even(const std::function<double(double)>& f, double radius, double max_frequency,
                      const QuadratureOptions& options = {});

/// MISE from the characteristic-function representation (p = 1 only).
double fourier_mise(const BerksonModel& model, double h, std::size_t n,
                    const QuadratureOptions& options = {});

/// Bias and variance integrals of fourier_mise, already divided by 2 pi.
struct FourierMiseParts {
    double bias = 0.0;
    double variance = 0.0;
};
FourierMiseParts fourier_mise_parts(const BerksonModel& model, double h, std::size_t n,
                                    const QuadratureOptions& options = {});

/// t0, t2, t4 for a one-dimensional model. Throws Divergence for zero error.
SpectralMoments spectral_moments(const BerksonModel& model, const QuadratureOptions& options = {});

/// Generic form: any error spectrum, any |f_X|^2, scalar kernel variance.
SpectralMoments spectral_moments(const ErrorCharSq& error,
                                 const std::function<double(double)>& fx_char_sq,
                                 double kernel_var, double max_frequency,
                                 const QuadratureOptions& options = {});

}  // namespace berkson
