#pragma once

#include "berkson/gaussmix.hpp"

namespace berkson {

/// Error-free density f_X, Gaussian Berkson error covariance, and kernel
/// covariance. The observed variable is X; the target is Y = X + eps.
class BerksonModel {
public:
    /// Kernel covariance defaults to the identity.
    BerksonModel(GaussianMixture fx, Matrix error_cov);
    BerksonModel(GaussianMixture fx, Matrix error_cov, Matrix kernel_cov);

    /// One-dimensional model with scalar variances.
    static BerksonModel scalar(GaussianMixture fx, double error_var, double kernel_var = 1.0);

    const GaussianMixture& fx() const noexcept { return fx_; }
    const Matrix& error_cov() const noexcept { return error_cov_; }
    const Matrix& kernel_cov() const noexcept { return kernel_cov_; }
    Eigen::Index dim() const noexcept { return fx_.dim(); }

    /// Same f_X and kernel with a different error covariance.
    BerksonModel with_error(Matrix error_cov) const;

    /// f_Y = f_X convolved with the error density.
    GaussianMixture fy() const;

    bool error_is_zero() const { return error_cov_.isZero(0.0); }

private:
    GaussianMixture fx_;
    Matrix error_cov_;
    Matrix kernel_cov_;
};

}  // namespace berkson
