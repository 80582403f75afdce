#pragma once

#include <complex>

#include "berkson/mise_exact.hpp"
#include "berkson/sample.hpp"

namespace berkson {

/// Density values on an increasing one-dimensional grid.
struct DensityCurve {
    Vector grid;
    Vector values;
};

/// f_Y estimate n^{-1} sum_i phi_{S + Sigma_eps}(y - X_i) at each row of
/// `points` (m x p). Throws DegenerateModel when S + Sigma_eps is singular.
Vector estimator_values(const SampleMatrix& sample, const Matrix& error_cov,
                        const BandwidthSpec& bw, const Matrix& points, const Matrix& kernel_cov,
                        unsigned threads = 1);

/// One-dimensional curve on `grid` with kernel variance `kernel_var`.
DensityCurve evaluate_estimator(const SampleMatrix& sample, double error_var,
                                const BandwidthSpec& bw, const Vector& grid,
                                double kernel_var = 1.0, unsigned threads = 1);

/// 512 points over [min - 4 s, max + 4 s], s^2 = sample var + error var + h^2.
Vector default_grid(const SampleMatrix& sample, double error_var, double h,
                    Eigen::Index points = 512);

/// Sample-free grid for a known model: [min mu_j - 4 s, max mu_j + 4 s] with
/// s^2 = Var(X) + error var + h^2.
Vector model_grid(const BerksonModel& model, double h, Eigen::Index points = 512);

/// K(h w) f_eps(w) n^{-1} sum_j exp(i w X_j) for p = 1.
std::complex<double> estimator_char_form(const SampleMatrix& sample, double error_var, double h,
                                         double omega, double kernel_var = 1.0);

/// Composite Simpson rule on an equally spaced grid with an odd point count.
double simpson(const Vector& grid, const Vector& values);

}  // namespace berkson
