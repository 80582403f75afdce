#pragma once

#include <span>

#include <Eigen/Dense>

namespace berkson {

/// n x p block of observations, one row per draw. Never empty, always finite.
class SampleMatrix {
public:
    explicit SampleMatrix(Eigen::MatrixXd rows);

    /// One-dimensional sample from a column of values.
    static SampleMatrix from_values(const Eigen::VectorXd& values);

    Eigen::Index size() const noexcept { return rows_.rows(); }
    Eigen::Index dim() const noexcept { return rows_.cols(); }
    const Eigen::MatrixXd& rows() const noexcept { return rows_; }
    auto row(Eigen::Index i) const { return rows_.row(i); }

    /// Column 0 as a vector; only meaningful for p = 1.
    Eigen::VectorXd values() const { return rows_.col(0); }

private:
    Eigen::MatrixXd rows_;
};

/// Quantile of an ascending range, linear between closest ranks.
double quantile_sorted(std::span<const double> sorted, double q);

/// Unbiased sample variance of a one-dimensional sample.
double sample_variance(const SampleMatrix& sample);

/// Interquartile range using linearly interpolated quantiles.
double sample_iqr(const SampleMatrix& sample);

}  // namespace berkson
