#include "berkson/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "berkson/error.hpp"
#include "berkson/parallel.hpp"

namespace berkson {

namespace {

constexpr Eigen::Index kChunk = 64;

double spread_variance(const SampleMatrix& sample) {
    return sample.size() < 2 ? 0.0 : sample_variance(sample);
}

Vector linspace(double lo, double hi, Eigen::Index points) {
    if (points < 2) fail(ErrorKind::Domain, "grid needs at least two points");
    return Vector::LinSpaced(points, lo, hi);
}

}  // namespace

Vector estimator_values(const SampleMatrix& sample, const Matrix& error_cov,
                        const BandwidthSpec& bw, const Matrix& points, const Matrix& kernel_cov,
                        unsigned threads) {
    const Eigen::Index p = sample.dim();
    if (error_cov.rows() != p || kernel_cov.rows() != p || points.cols() != p) {
        fail(ErrorKind::Shape, "estimator inputs disagree on dimension");
    }
    const Matrix cov = bw.smoothing_cov(kernel_cov) + error_cov;
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::DegenerateModel, "S + Sigma_eps is singular; the estimator is degenerate");
    }
    const Matrix l = llt.matrixL();
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) log_det += 2.0 * std::log(l(i, i));
    const double norm = std::exp(-0.5 * (static_cast<double>(p) * std::log(2.0 * std::numbers::pi) +
                                         log_det)) /
                        static_cast<double>(sample.size());

    // Whitened observations, so each term is exp(-|L^{-1}y - L^{-1}X_i|^2 / 2).
    const Matrix white_x = llt.matrixL().solve(sample.rows().transpose());
    const Matrix white_y = llt.matrixL().solve(points.transpose());

    const Eigen::Index m = points.rows();
    Vector out(m);
    const auto chunks = static_cast<std::size_t>((m + kChunk - 1) / kChunk);
    parallel_for(chunks, threads, [&](std::size_t c) {
        const Eigen::Index begin = static_cast<Eigen::Index>(c) * kChunk;
        const Eigen::Index end = std::min(m, begin + kChunk);
        for (Eigen::Index g = begin; g < end; ++g) {
            double sum = 0.0;
            if (p == 1) {
                const double y = white_y(0, g);
                for (Eigen::Index i = 0; i < white_x.cols(); ++i) {
                    const double d = y - white_x(0, i);
                    sum += std::exp(-0.5 * d * d);
                }
            } else {
                for (Eigen::Index i = 0; i < white_x.cols(); ++i) {
                    sum += std::exp(-0.5 * (white_y.col(g) - white_x.col(i)).squaredNorm());
                }
            }
            out(g) = norm * sum;
        }
    });
    return out;
}

DensityCurve evaluate_estimator(const SampleMatrix& sample, double error_var,
                                const BandwidthSpec& bw, const Vector& grid, double kernel_var,
                                unsigned threads) {
    if (sample.dim() != 1) fail(ErrorKind::UnsupportedDimension, "curves are one-dimensional");
    for (Eigen::Index i = 1; i < grid.size(); ++i) {
        if (!(grid(i) > grid(i - 1))) fail(ErrorKind::Domain, "grid must be strictly increasing");
    }
    DensityCurve curve;
    curve.grid = grid;
    curve.values = estimator_values(sample, Matrix::Constant(1, 1, error_var), bw, Matrix(grid),
                                    Matrix::Constant(1, 1, kernel_var), threads);
    return curve;
}

Vector default_grid(const SampleMatrix& sample, double error_var, double h, Eigen::Index points) {
    if (sample.dim() != 1) fail(ErrorKind::UnsupportedDimension, "grids are one-dimensional");
    const Vector x = sample.values();
    const double s = std::sqrt(spread_variance(sample) + error_var + h * h);
    if (!(s > 0.0)) fail(ErrorKind::DegenerateModel, "grid has zero width");
    return linspace(x.minCoeff() - 4.0 * s, x.maxCoeff() + 4.0 * s, points);
}

Vector model_grid(const BerksonModel& model, double h, Eigen::Index points) {
    if (model.dim() != 1) fail(ErrorKind::UnsupportedDimension, "grids are one-dimensional");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (const auto& c : model.fx().components()) {
        lo = std::min(lo, c.mean(0));
        hi = std::max(hi, c.mean(0));
    }
    const double s =
        std::sqrt(model.fx().covariance()(0, 0) + model.error_cov()(0, 0) + h * h);
    return linspace(lo - 4.0 * s, hi + 4.0 * s, points);
}

std::complex<double> estimator_char_form(const SampleMatrix& sample, double error_var, double h,
                                         double omega, double kernel_var) {
    if (sample.dim() != 1) fail(ErrorKind::UnsupportedDimension, "char form needs p = 1");
    const Vector x = sample.values();
    std::complex<double> ecf = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) ecf += std::polar(1.0, omega * x(i));
    ecf /= static_cast<double>(x.size());
    const double damp = std::exp(-0.5 * (h * h * kernel_var + error_var) * omega * omega);
    return damp * ecf;
}

double simpson(const Vector& grid, const Vector& values) {
    const Eigen::Index m = grid.size();
    if (m < 3 || m % 2 == 0 || values.size() != m) {
        fail(ErrorKind::Shape, "Simpson's rule needs an odd number (>= 3) of aligned points");
    }
    const double step = (grid(m - 1) - grid(0)) / static_cast<double>(m - 1);
    double sum = values(0) + values(m - 1);
    for (Eigen::Index i = 1; i < m - 1; ++i) sum += (i % 2 == 1 ? 4.0 : 2.0) * values(i);
    return sum * step / 3.0;
}

}  // namespace berkson
