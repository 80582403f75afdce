#include "berkson/sample.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "berkson/error.hpp"

namespace berkson {

SampleMatrix::SampleMatrix(Eigen::MatrixXd rows) : rows_(std::move(rows)) {
    if (rows_.rows() == 0 || rows_.cols() == 0) {
        fail(ErrorKind::EmptySample, "sample has no observations");
    }
    for (Eigen::Index i = 0; i < rows_.rows(); ++i) {
        if (!rows_.row(i).allFinite()) {
            fail(ErrorKind::Domain, "non-finite observation at row " + std::to_string(i));
        }
    }
}

SampleMatrix SampleMatrix::from_values(const Eigen::VectorXd& values) {
    return SampleMatrix(Eigen::MatrixXd(values));
}

double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) fail(ErrorKind::EmptySample, "quantile of empty range");
    if (!(q >= 0.0 && q <= 1.0)) fail(ErrorKind::Domain, "quantile level outside [0, 1]");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double sample_variance(const SampleMatrix& sample) {
    const Eigen::VectorXd x = sample.values();
    if (x.size() < 2) fail(ErrorKind::Domain, "variance needs at least two observations");
    const double mean = x.mean();
    return (x.array() - mean).square().sum() / static_cast<double>(x.size() - 1);
}

double sample_iqr(const SampleMatrix& sample) {
    const Eigen::VectorXd x = sample.values();
    std::vector<double> sorted(x.data(), x.data() + x.size());
    std::sort(sorted.begin(), sorted.end());
    return quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);
}

}  // namespace berkson
