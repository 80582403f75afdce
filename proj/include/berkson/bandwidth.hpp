#pragma once

#include <vector>

#include "berkson/mise_exact.hpp"
#include "berkson/spectral.hpp"

namespace berkson {

enum class Target {
    Y,  ///< minimize the MISE of the f_Y estimator
    X,  ///< minimize the MISE of the plain f_X estimator
};

struct BandwidthResult {
    double value = 0.0;
    double objective = 0.0;
    int iterations = 0;       ///< objective evaluations
    double bracket_lo = 0.0;  ///< final refinement bracket
    double bracket_hi = 0.0;
    bool at_boundary = false;  ///< optimum is h = 0 (target Y only)
};

struct OptimizerOptions {
    int grid_points = 400;
    double expand_factor = 4.0;
    /// Search upper bound; 0 means 5 x the error-free Silverman value of f_X.
    double upper = 0.0;
};

/// Upper end of the default search bracket: 5 * 0.9 * sigma_X * n^{-1/5},
/// with sigma_X^2 the largest marginal variance of f_X.
double default_search_upper(const BerksonModel& model, std::size_t n);

/// Exact scalar minimizer of the MISE over h (h >= 0 for target Y, h > 0 for
/// target X). A coarse scan locates the basin, then Brent refines it to about
/// 1e-8. If the scan minimum sits on the upper edge the bracket is widened
/// once; a second edge hit throws BracketExhausted.
BandwidthResult optimal_scalar_bandwidth(const BerksonModel& model, std::size_t n, Target target,
                                         const OptimizerOptions& options = {});

/// h*_Y = sqrt(2 t2 / (n t4)) from the spectral moments (p = 1).
double asymptotic_bandwidth(const BerksonModel& model, std::size_t n,
                            const QuadratureOptions& options = {});

/// Rule-of-thumb h_Y: h*_Y with |f_X|^2 replaced by exp(-sample_var w^2),
/// integrals by quadrature against the given error spectrum.
double rule_of_thumb_hy(double sample_var, const ErrorCharSq& error, std::size_t n,
                        const QuadratureOptions& options = {});

/// Closed form of rule_of_thumb_hy for N(0, error_var) error:
/// sqrt(4/(3n) [(s2 + e2)^{5/2} / e2^{3/2} - (s2 + e2)]).
double rule_of_thumb_hy_gaussian(double sample_var, double error_var, std::size_t n);

/// 0.9 min(IQR / 1.34, sd) / n^{1/5}.
double silverman_hx(double sample_sd, double sample_iqr, std::size_t n);

/// s' B s - n^{-1} s' V over either diag(S) (diagonal case) or vec(S).
struct QuadraticForm {
    Matrix b;
    Vector v;
    double objective(const Vector& s, std::size_t n) const;
};

/// B_ij = 1/4 int w_i^2 w_j^2 dmu, V_i = int w_i^2 dnu, in closed form.
QuadraticForm diagonal_quadratic_form(const BerksonModel& model);

struct DiagonalQpResult {
    Vector constrained;    ///< argmin over s >= 0
    Vector unconstrained;  ///< (2n)^{-1} B^{-1} V
    double objective = 0.0;
    QuadraticForm form;
};

/// Asymptotically optimal squared diagonal bandwidths under s >= 0. Requires
/// Sigma_K = I. The constrained optimum is found by enumerating the 2^p
/// active sets. Throws Conditioning when B is numerically singular.
DiagonalQpResult diagonal_qp(const BerksonModel& model, std::size_t n);

/// B = 1/4 int (w (x) w)(w (x) w)' dmu and V = int (w (x) w) dnu for p = 2.
/// B is singular by construction (the w1 w2 entry appears twice).
QuadraticForm full_bandwidth_matrices(const BerksonModel& model);

/// vec(S)' B vec(S) - n^{-1} vec(S)' V.
double full_bandwidth_objective(const QuadraticForm& form, const Matrix& smoothing_cov,
                                std::size_t n);

/// int w_{i1} ... w_{ik} cos(w' shift) exp(-w' A w / 2) dw for k in {0, 2, 4}.
double gaussian_moment_integral(const Matrix& a, const Vector& shift,
                                const std::vector<int>& indices);

/// Monomial integrals against dmu and dnu for a Gaussian model.
double spectral_mu_moment(const BerksonModel& model, const std::vector<int>& indices);
double spectral_nu_moment(const BerksonModel& model, const std::vector<int>& indices);

}  // namespace berkson
