#include "berkson/gaussmix.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "berkson/error.hpp"
#include "berkson/rng.hpp"

namespace berkson {

namespace {

constexpr double kWeightSumTolerance = 1e-9;

bool is_symmetric(const Matrix& m) {
    if (m.rows() != m.cols()) return false;
    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

Eigen::LLT<Matrix> spd_factor(const Matrix& cov, const char* what) {
    if (cov.rows() != cov.cols()) {
        fail(ErrorKind::Shape, std::string(what) + " is not square");
    }
    if (!cov.allFinite() || !is_symmetric(cov)) {
        fail(ErrorKind::InvalidCovariance, std::string(what) + " is not symmetric");
    }
    Eigen::LLT<Matrix> llt(cov);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::InvalidCovariance, std::string(what) + " is not positive definite");
    }
    return llt;
}

double log_normalizer(const Eigen::LLT<Matrix>& llt) {
    const Matrix& l = llt.matrixLLT();
    const auto p = static_cast<double>(l.rows());
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
    return -0.5 * (p * std::log(2.0 * std::numbers::pi) + log_det);
}

}  // namespace

void require_spd(const Matrix& cov, const char* what) { (void)spd_factor(cov, what); }

void require_psd(const Matrix& cov, const char* what) {
    if (cov.rows() != cov.cols() || !is_symmetric(cov)) {
        fail(ErrorKind::Shape, std::string(what) + " is not a symmetric square matrix");
    }
    if (cov.size() == 0) return;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov, Eigen::EigenvaluesOnly);
    const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale) {
        fail(ErrorKind::InvalidCovariance, std::string(what) + " is not positive semidefinite");
    }
}

GaussianMixture::GaussianMixture(std::vector<GaussianComponent> components)
    : components_(std::move(components)) {
    if (components_.empty()) fail(ErrorKind::Shape, "mixture needs at least one component");
    dim_ = components_.front().mean.size();
    if (dim_ == 0) fail(ErrorKind::Shape, "component mean is empty");

    double total = 0.0;
    for (std::size_t j = 0; j < components_.size(); ++j) {
        const auto& c = components_[j];
        if (c.mean.size() != dim_ || c.covariance.rows() != dim_ || c.covariance.cols() != dim_) {
            fail(ErrorKind::Shape, "component " + std::to_string(j) + " has mismatched dimension");
        }
        if (!(c.weight > 0.0 && c.weight <= 1.0 + kWeightSumTolerance)) {
            fail(ErrorKind::Domain, "component " + std::to_string(j) + " weight outside (0, 1]");
        }
        if (!c.mean.allFinite()) fail(ErrorKind::Domain, "non-finite component mean");
        factors_.push_back(spd_factor(c.covariance, "component covariance").matrixL());
        total += c.weight;
    }
    if (std::abs(total - 1.0) > kWeightSumTolerance) {
        fail(ErrorKind::Domain, "mixture weights sum to " + std::to_string(total));
    }
    for (auto& c : components_) c.weight /= total;
}

GaussianMixture GaussianMixture::normal(const Vector& mean, const Matrix& covariance) {
    return GaussianMixture({GaussianComponent{1.0, mean, covariance}});
}

Vector GaussianMixture::weights() const {
    Vector w(static_cast<Eigen::Index>(components_.size()));
    for (std::size_t j = 0; j < components_.size(); ++j) {
        w(static_cast<Eigen::Index>(j)) = components_[j].weight;
    }
    return w;
}

Vector GaussianMixture::mean() const {
    Vector m = Vector::Zero(dim_);
    for (const auto& c : components_) m += c.weight * c.mean;
    return m;
}

Matrix GaussianMixture::covariance() const {
    const Vector m = mean();
    Matrix second = Matrix::Zero(dim_, dim_);
    for (const auto& c : components_) {
        second += c.weight * (c.covariance + c.mean * c.mean.transpose());
    }
    return second - m * m.transpose();
}

double normal_pdf(const Vector& x, const Vector& mean, const Matrix& covariance) {
    if (x.size() != mean.size() || covariance.rows() != x.size()) {
        fail(ErrorKind::Shape, "normal_pdf dimensions disagree");
    }
    const auto llt = spd_factor(covariance, "covariance");
    const Vector z = llt.matrixL().solve(x - mean);
    return std::exp(log_normalizer(llt) - 0.5 * z.squaredNorm());
}

double normal_pdf_at_zero(const Matrix& covariance) {
    return std::exp(log_normalizer(spd_factor(covariance, "covariance")));
}

double mixture_pdf(const GaussianMixture& mix, const Vector& x) {
    if (x.size() != mix.dim()) fail(ErrorKind::Shape, "point dimension differs from mixture");
    double total = 0.0;
    for (const auto& c : mix.components()) total += c.weight * normal_pdf(x, c.mean, c.covariance);
    return total;
}

double mixture_pdf(const GaussianMixture& mix, double x) {
    return mixture_pdf(mix, Vector::Constant(1, x));
}

GaussianMixture convolve_with_normal(const GaussianMixture& mix, const Matrix& added) {
    if (added.rows() != mix.dim() || added.cols() != mix.dim()) {
        fail(ErrorKind::Shape, "added covariance dimension differs from mixture");
    }
    require_psd(added, "added covariance");
    std::vector<GaussianComponent> out = mix.components();
    for (auto& c : out) c.covariance += added;
    return GaussianMixture(std::move(out));
}

double gaussian_product_integral(const Matrix& cov_a, const Vector& mean_a, const Matrix& cov_b,
                                 const Vector& mean_b) {
    if (cov_a.rows() != cov_b.rows() || mean_a.size() != mean_b.size()) {
        fail(ErrorKind::Shape, "product integral dimensions disagree");
    }
    return normal_pdf(mean_a - mean_b, Vector::Zero(mean_a.size()), cov_a + cov_b);
}

double char_fn_sq(const GaussianMixture& mix, const Vector& omega) {
    if (omega.size() != mix.dim()) fail(ErrorKind::Shape, "frequency dimension differs");
    const auto& cs = mix.components();
    double total = 0.0;
    for (std::size_t j = 0; j < cs.size(); ++j) {
        const double qj = omega.dot(cs[j].covariance * omega);
        total += cs[j].weight * cs[j].weight * std::exp(-qj);
        for (std::size_t k = j + 1; k < cs.size(); ++k) {
            const double qk = omega.dot(cs[k].covariance * omega);
            const double phase = omega.dot(cs[j].mean - cs[k].mean);
            total += 2.0 * cs[j].weight * cs[k].weight * std::cos(phase) *
                     std::exp(-0.5 * (qj + qk));
        }
    }
    return total;
}

double char_fn_sq(const GaussianMixture& mix, double omega) {
    return char_fn_sq(mix, Vector::Constant(1, omega));
}

SampleMatrix sample(const GaussianMixture& mix, std::size_t n, std::uint64_t seed,
                    std::uint64_t stream) {
    if (n == 0) fail(ErrorKind::EmptySample, "requested zero draws");
    const CounterRng rng(seed, stream);
    const Eigen::Index p = mix.dim();
    const std::uint64_t blocks_per_draw = 1 + static_cast<std::uint64_t>((p + 1) / 2);

    std::vector<double> cumulative;
    double acc = 0.0;
    for (const auto& c : mix.components()) cumulative.push_back(acc += c.weight);

    Matrix out(static_cast<Eigen::Index>(n), p);
    Vector z(p);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t base = static_cast<std::uint64_t>(i) * blocks_per_draw;
        const double u = rng.uniform(base, 0) * acc;
        std::size_t j = 0;
        while (j + 1 < cumulative.size() && u > cumulative[j]) ++j;

        for (Eigen::Index d = 0; d < p; d += 2) {
            const auto pair = rng.normal_pair(base + 1 + static_cast<std::uint64_t>(d / 2));
            z(d) = pair[0];
            if (d + 1 < p) z(d + 1) = pair[1];
        }
        out.row(static_cast<Eigen::Index>(i)) = (mix[j].mean + mix.cholesky(j) * z).transpose();
    }
    return SampleMatrix(std::move(out));
}

}  // namespace berkson
