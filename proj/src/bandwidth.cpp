#include "berkson/bandwidth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/tools/minima.hpp>

#include "berkson/error.hpp"

namespace berkson {

namespace {

void require_positive_n(std::size_t n) {
    if (n == 0) fail(ErrorKind::Domain, "sample size must be positive");
}

struct ScanResult {
    std::vector<double> grid;
    std::vector<double> values;
    std::size_t best = 0;
};

template <class F>
ScanResult scan(F&& objective, double lo, double hi, int points) {
    ScanResult r;
    r.grid.resize(static_cast<std::size_t>(points));
    r.values.resize(r.grid.size());
    for (std::size_t i = 0; i < r.grid.size(); ++i) {
        r.grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
        r.values[i] = objective(r.grid[i]);
        if (r.values[i] < r.values[r.best]) r.best = i;
    }
    return r;
}

}  // namespace

double default_search_upper(const BerksonModel& model, std::size_t n) {
    require_positive_n(n);
    const double sigma = std::sqrt(model.fx().covariance().diagonal().maxCoeff());
    return 5.0 * 0.9 * sigma * std::pow(static_cast<double>(n), -0.2);
}

BandwidthResult optimal_scalar_bandwidth(const BerksonModel& model, std::size_t n, Target target,
                                         const OptimizerOptions& options) {
    require_positive_n(n);
    if (options.grid_points < 3) fail(ErrorKind::Domain, "optimizer grid needs >= 3 points");

    int evaluations = 0;
    auto objective = [&](double h) {
        ++evaluations;
        const auto bw = BandwidthSpec::scalar(h);
        return target == Target::Y ? exact_mise(model, bw, n) : mise_for_fx(model, bw, n);
    };

    double hi = options.upper > 0.0 ? options.upper : default_search_upper(model, n);
    const int points = options.grid_points;
    auto lower_for = [&](double upper) { return target == Target::Y ? 0.0 : upper / points; };

    ScanResult s = scan(objective, lower_for(hi), hi, points);
    if (s.best + 1 == s.grid.size()) {
        hi *= options.expand_factor;
        s = scan(objective, lower_for(hi), hi, points);
        if (s.best + 1 == s.grid.size()) {
            fail(ErrorKind::BracketExhausted,
                 "MISE still decreasing at h = " + std::to_string(hi) + " after expansion");
        }
    }

    const double a = s.grid[s.best == 0 ? 0 : s.best - 1];
    const double b = s.grid[s.best + 1];
    constexpr int bits = std::numeric_limits<double>::digits / 2;
    std::uintmax_t max_iter = 200;
    const auto [h_min, f_min] = boost::math::tools::brent_find_minima(objective, a, b, bits, max_iter);

    BandwidthResult r;
    r.bracket_lo = a;
    r.bracket_hi = b;
    if (f_min <= s.values[s.best]) {
        r.value = h_min;
        r.objective = f_min;
    } else {
        r.value = s.grid[s.best];
        r.objective = s.values[s.best];
    }
    if (target == Target::Y && s.values.front() <= r.objective) {
        r.value = 0.0;
        r.objective = s.values.front();
        r.at_boundary = true;
    }
    r.iterations = evaluations;
    return r;
}

double asymptotic_bandwidth(const BerksonModel& model, std::size_t n,
                            const QuadratureOptions& options) {
    require_positive_n(n);
    if (model.dim() != 1) fail(ErrorKind::UnsupportedDimension, "h*_Y is computed for p = 1");
    if (!(model.error_cov()(0, 0) > 0.0)) {
        fail(ErrorKind::Divergence, "h*_Y diverges as the error variance goes to zero");
    }
    const SpectralMoments m = spectral_moments(model, options);
    return std::sqrt(2.0 * m.t2 / (static_cast<double>(n) * m.t4));
}

double rule_of_thumb_hy(double sample_var, const ErrorCharSq& error, std::size_t n,
                        const QuadratureOptions& options) {
    require_positive_n(n);
    if (!(sample_var > 0.0)) fail(ErrorKind::Domain, "sample variance must be positive");
    const SpectralMoments m = spectral_moments(
        error, [sample_var](double w) { return std::exp(-sample_var * w * w); }, 1.0, 0.0, options);
    return std::sqrt(2.0 * m.t2 / (static_cast<double>(n) * m.t4));
}

double rule_of_thumb_hy_gaussian(double sample_var, double error_var, std::size_t n) {
    require_positive_n(n);
    if (!(sample_var > 0.0)) fail(ErrorKind::Domain, "sample variance must be positive");
    if (!(error_var > 0.0)) {
        fail(ErrorKind::Divergence, "rule-of-thumb h_Y diverges for zero error variance");
    }
    const double total = sample_var + error_var;
    const double radicand = std::pow(total, 2.5) / std::pow(error_var, 1.5) - total;
    return std::sqrt(4.0 / (3.0 * static_cast<double>(n)) * radicand);
}

double silverman_hx(double sample_sd, double sample_iqr, std::size_t n) {
    require_positive_n(n);
    if (!(sample_sd > 0.0) || !(sample_iqr > 0.0)) {
        fail(ErrorKind::Domain, "Silverman's rule needs positive spread estimates");
    }
    return 0.9 * std::min(sample_iqr / 1.34, sample_sd) / std::pow(static_cast<double>(n), 0.2);
}

// ---------------------------------------------------------------------------
// Closed-form Gaussian moment integrals.
//
// With C = A^{-1} and v = C * shift, completing the square gives
//   int g(w) cos(w' shift) exp(-w'Aw/2) dw
//     = (2 pi)^{p/2} det(A)^{-1/2} exp(-shift' C shift / 2) Re E[g(Z + i v)],
// Z ~ N(0, C). For monomials of degree <= 4, Re E[.] follows from Isserlis.

double gaussian_moment_integral(const Matrix& a, const Vector& shift,
                                const std::vector<int>& idx) {
    const Eigen::Index p = a.rows();
    Eigen::LLT<Matrix> llt(a);
    if (llt.info() != Eigen::Success) {
        fail(ErrorKind::Divergence, "moment integral needs a positive definite decay matrix");
    }
    const Matrix c = llt.solve(Matrix::Identity(p, p));
    const Vector v = c * shift;
    double log_det = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) log_det += 2.0 * std::log(llt.matrixLLT()(i, i));
    const double scale =
        std::exp(0.5 * static_cast<double>(p) * std::log(2.0 * std::numbers::pi) - 0.5 * log_det -
                 0.5 * shift.dot(v));

    double moment = 0.0;
    switch (idx.size()) {
        case 0:
            moment = 1.0;
            break;
        case 2:
            moment = c(idx[0], idx[1]) - v(idx[0]) * v(idx[1]);
            break;
        case 4: {
            const int i = idx[0], j = idx[1], k = idx[2], l = idx[3];
            moment = c(i, j) * c(k, l) + c(i, k) * c(j, l) + c(i, l) * c(j, k);
            moment -= c(i, j) * v(k) * v(l) + c(i, k) * v(j) * v(l) + c(i, l) * v(j) * v(k) +
                      c(j, k) * v(i) * v(l) + c(j, l) * v(i) * v(k) + c(k, l) * v(i) * v(j);
            moment += v(i) * v(j) * v(k) * v(l);
            break;
        }
        default:
            fail(ErrorKind::Domain, "moment integrals are implemented for degree 0, 2, 4");
    }
    return scale * moment;
}

double spectral_mu_moment(const BerksonModel& model, const std::vector<int>& indices) {
    const auto& cs = model.fx().components();
    const Matrix twice_err = 2.0 * model.error_cov();
    double total = 0.0;
    for (const auto& cj : cs) {
        for (const auto& ck : cs) {
            total += cj.weight * ck.weight *
                     gaussian_moment_integral(twice_err + cj.covariance + ck.covariance,
                                              cj.mean - ck.mean, indices);
        }
    }
    return total;
}

double spectral_nu_moment(const BerksonModel& model, const std::vector<int>& indices) {
    const Eigen::Index p = model.dim();
    const double error_part =
        gaussian_moment_integral(2.0 * model.error_cov(), Vector::Zero(p), indices);
    return error_part - spectral_mu_moment(model, indices);
}

double QuadraticForm::objective(const Vector& s, std::size_t n) const {
    return s.dot(b * s) - s.dot(v) / static_cast<double>(n);
}

QuadraticForm diagonal_quadratic_form(const BerksonModel& model) {
    const Eigen::Index p = model.dim();
    if (!model.kernel_cov().isIdentity(1e-12)) {
        fail(ErrorKind::Domain, "diagonal bandwidth analysis assumes Sigma_K = I");
    }
    if (Eigen::LLT<Matrix>(model.error_cov()).info() != Eigen::Success) {
        fail(ErrorKind::Divergence, "int w^2 dnu diverges unless the error covariance is PD");
    }
    QuadraticForm f;
    f.b.resize(p, p);
    f.v.resize(p);
    for (int i = 0; i < p; ++i) {
        f.v(i) = spectral_nu_moment(model, {i, i});
        for (int j = i; j < p; ++j) {
            f.b(i, j) = f.b(j, i) = 0.25 * spectral_mu_moment(model, {i, i, j, j});
        }
    }
    return f;
}

DiagonalQpResult diagonal_qp(const BerksonModel& model, std::size_t n) {
    require_positive_n(n);
    const Eigen::Index p = model.dim();
    if (p > 16) fail(ErrorKind::UnsupportedDimension, "active-set enumeration needs small p");

    DiagonalQpResult r;
    r.form = diagonal_quadratic_form(model);
    const Matrix& b = r.form.b;
    const Vector rhs = r.form.v / (2.0 * static_cast<double>(n));

    Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
    const double largest = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * largest)) {
        fail(ErrorKind::Conditioning, "B is numerically singular");
    }
    r.unconstrained = b.ldlt().solve(rhs);

    // Each subset of free coordinates: solve the reduced system with the rest
    // pinned to zero and keep the best feasible candidate.
    r.constrained = Vector::Zero(p);
    r.objective = 0.0;
    for (unsigned mask = 1; mask < (1u << p); ++mask) {
        std::vector<Eigen::Index> free;
        for (Eigen::Index i = 0; i < p; ++i) {
            if (mask & (1u << i)) free.push_back(i);
        }
        const auto k = static_cast<Eigen::Index>(free.size());
        Matrix bf(k, k);
        Vector rf(k);
        for (Eigen::Index i = 0; i < k; ++i) {
            rf(i) = rhs(free[static_cast<std::size_t>(i)]);
            for (Eigen::Index j = 0; j < k; ++j) {
                bf(i, j) = b(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
            }
        }
        const Vector sf = bf.ldlt().solve(rf);
        if ((sf.array() < 0.0).any()) continue;
        Vector s = Vector::Zero(p);
        for (Eigen::Index i = 0; i < k; ++i) s(free[static_cast<std::size_t>(i)]) = sf(i);
        const double value = r.form.objective(s, n);
        if (value < r.objective) {
            r.objective = value;
            r.constrained = s;
        }
    }
    return r;
}

QuadraticForm full_bandwidth_matrices(const BerksonModel& model) {
    const Eigen::Index p = model.dim();
    if (p != 2) fail(ErrorKind::UnsupportedDimension, "full bandwidth analysis is for p = 2");
    if (Eigen::LLT<Matrix>(model.error_cov()).info() != Eigen::Success) {
        fail(ErrorKind::Divergence, "int (w (x) w) dnu diverges unless the error covariance is PD");
    }
    const Eigen::Index k = p * p;
    QuadraticForm f;
    f.b.resize(k, k);
    f.v.resize(k);
    // (w (x) w)_{i p + j} = w_i w_j.
    for (int r = 0; r < k; ++r) {
        const int i = r / static_cast<int>(p), j = r % static_cast<int>(p);
        f.v(r) = spectral_nu_moment(model, {i, j});
        for (int c = r; c < k; ++c) {
            const int a = c / static_cast<int>(p), b = c % static_cast<int>(p);
            f.b(r, c) = f.b(c, r) = 0.25 * spectral_mu_moment(model, {i, j, a, b});
        }
    }
    return f;
}

double full_bandwidth_objective(const QuadraticForm& form, const Matrix& smoothing_cov,
                                std::size_t n) {
    const Eigen::Map<const Vector> vec(smoothing_cov.data(), smoothing_cov.size());
    if (vec.size() != form.v.size()) fail(ErrorKind::Shape, "vec(S) length differs from V");
    return form.objective(vec, n);
}

}  // namespace berkson
