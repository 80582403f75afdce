#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "berkson/sample.hpp"

namespace berkson {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct GaussianComponent {
    double weight = 1.0;
    Vector mean;
    Matrix covariance;
};

/// Finite mixture of multivariate normals sharing one dimension.
///
/// Construction validates every covariance (symmetric, Cholesky succeeds)
/// and normalizes weights whose sum is within 1e-9 of one; anything further
/// off is rejected. Instances are immutable.
class GaussianMixture {
public:
    explicit GaussianMixture(std::vector<GaussianComponent> components);

    static GaussianMixture normal(const Vector& mean, const Matrix& covariance);

    Eigen::Index dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return components_.size(); }
    const std::vector<GaussianComponent>& components() const noexcept { return components_; }
    const GaussianComponent& operator[](std::size_t j) const { return components_[j]; }

    Vector weights() const;
    Vector mean() const;
    Matrix covariance() const;

    /// Lower Cholesky factor of component j's covariance.
    const Matrix& cholesky(std::size_t j) const { return factors_[j]; }

private:
    std::vector<GaussianComponent> components_;
    std::vector<Matrix> factors_;
    Eigen::Index dim_ = 0;
};

/// Throws InvalidCovariance unless `cov` is symmetric positive definite.
void require_spd(const Matrix& cov, const char* what);

/// Throws Shape unless `cov` is symmetric, InvalidCovariance unless PSD.
void require_psd(const Matrix& cov, const char* what);

/// phi_cov(x - mean).
double normal_pdf(const Vector& x, const Vector& mean, const Matrix& covariance);

/// phi_cov(0) = (2 pi)^{-p/2} det(cov)^{-1/2}.
double normal_pdf_at_zero(const Matrix& covariance);

double mixture_pdf(const GaussianMixture& mix, const Vector& x);

/// Scalar convenience for one-dimensional mixtures.
double mixture_pdf(const GaussianMixture& mix, double x);

/// Distribution of X + Z with Z ~ N(0, added) independent of X.
GaussianMixture convolve_with_normal(const GaussianMixture& mix, const Matrix& added);

/// int phi_a(x - mean_a) phi_b(x - mean_b) dx = phi_{a+b}(mean_a - mean_b).
double gaussian_product_integral(const Matrix& cov_a, const Vector& mean_a, const Matrix& cov_b,
                                 const Vector& mean_b);

/// |characteristic function|^2 of the mixture at frequency omega.
double char_fn_sq(const GaussianMixture& mix, const Vector& omega);
double char_fn_sq(const GaussianMixture& mix, double omega);

/// n i.i.d. draws. Observation i of stream s depends only on (seed, s, i).
SampleMatrix sample(const GaussianMixture& mix, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream = 0);

}  // namespace berkson
