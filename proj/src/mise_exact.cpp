#include "berkson/mise_exact.hpp"

#include <cmath>

#include "berkson/error.hpp"

namespace berkson {

BandwidthSpec BandwidthSpec::scalar(double h) {
    if (!(h >= 0.0) || !std::isfinite(h)) fail(ErrorKind::Domain, "scalar bandwidth must be >= 0");
    BandwidthSpec bw;
    bw.kind_ = Kind::Scalar;
    bw.h_ = h;
    return bw;
}

BandwidthSpec BandwidthSpec::diagonal(Vector squared) {
    if (squared.size() == 0 || !squared.allFinite() || (squared.array() < 0.0).any()) {
        fail(ErrorKind::Domain, "diagonal squared bandwidths must be finite and >= 0");
    }
    BandwidthSpec bw;
    bw.kind_ = Kind::Diagonal;
    bw.squared_ = std::move(squared);
    return bw;
}

BandwidthSpec BandwidthSpec::full(Matrix h) {
    require_psd(h, "bandwidth matrix");
    BandwidthSpec bw;
    bw.kind_ = Kind::Full;
    bw.full_ = std::move(h);
    return bw;
}

Matrix BandwidthSpec::smoothing_cov(const Matrix& kernel_cov) const {
    const Eigen::Index p = kernel_cov.rows();
    switch (kind_) {
        case Kind::Scalar:
            return h_ * h_ * kernel_cov;
        case Kind::Diagonal: {
            if (squared_.size() != p) fail(ErrorKind::Shape, "diagonal bandwidth length != p");
            const Vector root = squared_.cwiseSqrt();
            return root.asDiagonal() * kernel_cov * root.asDiagonal();
        }
        case Kind::Full: {
            if (full_.rows() != p) fail(ErrorKind::Shape, "bandwidth matrix size != p");
            const Matrix s = full_.transpose() * kernel_cov * full_;
            return 0.5 * (s + s.transpose());
        }
    }
    return {};
}

OmegaMatrices omega_matrices(const BerksonModel& model, const Matrix& smoothing_cov) {
    const auto& cs = model.fx().components();
    const auto m = static_cast<Eigen::Index>(cs.size());
    const Eigen::Index p = model.dim();
    const Matrix twice_err = 2.0 * model.error_cov();

    OmegaMatrices out;
    for (int a = 0; a < 3; ++a) {
        Matrix& om = out.omega[static_cast<std::size_t>(a)];
        om.resize(m, m);
        for (Eigen::Index j = 0; j < m; ++j) {
            for (Eigen::Index k = j; k < m; ++k) {
                const auto& cj = cs[static_cast<std::size_t>(j)];
                const auto& ck = cs[static_cast<std::size_t>(k)];
                const Matrix cov = a * smoothing_cov + twice_err + cj.covariance + ck.covariance;
                om(j, k) = om(k, j) = normal_pdf(cj.mean - ck.mean, Vector::Zero(p), cov);
            }
        }
    }
    return out;
}

IseDecomposition exact_ise_decomposition(const BerksonModel& model, const BandwidthSpec& bw,
                                         std::size_t n) {
    if (n == 0) fail(ErrorKind::Domain, "sample size must be positive");
    const Matrix s = bw.smoothing_cov(model.kernel_cov());
    const Matrix spread = 2.0 * (s + model.error_cov());
    if (Eigen::LLT<Matrix>(spread).info() != Eigen::Success) {
        fail(ErrorKind::DegenerateModel, "S + Sigma_eps is singular; the MISE is infinite");
    }
    const Vector alpha = model.fx().weights();
    const OmegaMatrices om = omega_matrices(model, s);
    const double inv_n = 1.0 / static_cast<double>(n);
    const double q0 = alpha.dot(om[0] * alpha);
    const double q1 = alpha.dot(om[1] * alpha);
    const double q2 = alpha.dot(om[2] * alpha);

    IseDecomposition d;
    d.variance = inv_n * (normal_pdf_at_zero(spread) - q2);
    d.bias = q2 - 2.0 * q1 + q0;
    return d;
}

double exact_mise(const BerksonModel& model, const BandwidthSpec& bw, std::size_t n) {
    return exact_ise_decomposition(model, bw, n).total();
}

double mise_for_fx(const BerksonModel& model, const BandwidthSpec& bw, std::size_t n) {
    const Eigen::Index p = model.dim();
    const BerksonModel error_free = model.with_error(Matrix::Zero(p, p));
    const Matrix s = bw.smoothing_cov(model.kernel_cov());
    if (Eigen::LLT<Matrix>(s).info() != Eigen::Success) {
        fail(ErrorKind::DegenerateModel, "f_X estimation needs a positive definite bandwidth");
    }
    return exact_mise(error_free, bw, n);
}

}  // namespace berkson
