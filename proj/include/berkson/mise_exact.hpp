#pragma once

#include <array>

#include "berkson/model.hpp"

namespace berkson {

/// Kernel bandwidth: a scalar h (H = hI), a diagonal of squared bandwidths
/// s = (h_1^2, ..., h_p^2), or a full PSD matrix H. Zero is allowed.
class BandwidthSpec {
public:
    enum class Kind { Scalar, Diagonal, Full };

    static BandwidthSpec scalar(double h);
    static BandwidthSpec diagonal(Vector squared);
    static BandwidthSpec full(Matrix h);

    Kind kind() const noexcept { return kind_; }
    double h() const noexcept { return h_; }
    const Vector& squared() const noexcept { return squared_; }
    const Matrix& matrix() const noexcept { return full_; }

    /// S = H' Sigma_K H, the covariance the kernel adds to each observation.
    Matrix smoothing_cov(const Matrix& kernel_cov) const;

private:
    BandwidthSpec() = default;
    Kind kind_ = Kind::Scalar;
    double h_ = 0.0;
    Vector squared_;
    Matrix full_;
};

/// Omega_a[j, j'] = phi_{aS + 2 Sigma_eps + Sigma_j + Sigma_j'}(mu_j - mu_j').
struct OmegaMatrices {
    std::array<Matrix, 3> omega;
    const Matrix& operator[](std::size_t a) const { return omega[a]; }
};

OmegaMatrices omega_matrices(const BerksonModel& model, const Matrix& smoothing_cov);

struct IseDecomposition {
    double variance = 0.0;  ///< integrated variance
    double bias = 0.0;      ///< integrated squared bias
    double total() const noexcept { return variance + bias; }
};

/// Closed-form MISE of the Gaussian-kernel estimator of f_Y for a Gaussian
/// mixture f_X and Gaussian error, in any dimension. Throws DegenerateModel
/// when S + Sigma_eps is singular (no error and no smoothing).
double exact_mise(const BerksonModel& model, const BandwidthSpec& bw, std::size_t n);

IseDecomposition exact_ise_decomposition(const BerksonModel& model, const BandwidthSpec& bw,
                                         std::size_t n);

/// MISE of the ordinary kernel estimator of f_X (the error covariance of
/// `model` is ignored). The bandwidth must be strictly positive definite.
double mise_for_fx(const BerksonModel& model, const BandwidthSpec& bw, std::size_t n);

}  // namespace berkson
