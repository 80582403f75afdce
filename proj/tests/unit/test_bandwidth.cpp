#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "berkson/bandwidth.hpp"
#include "berkson/error.hpp"
#include "berkson/experiments.hpp"
#include "berkson/rng.hpp"

using namespace berkson;

namespace {

const std::vector<double> kSigmas = {2.0, 1.0, 0.5, 0.25, 0.125};

BerksonModel normal_model(double err) {
    return BerksonModel::scalar(find_density("normal").mixture, err);
}

struct ScanMin {
    double h;
    double value;
};

// Brute-force minimizer: a dense scan, then repeated local rescans.
ScanMin nested_scan(const std::function<double(double)>& f, double lo, double hi) {
    int points = 2001;
    ScanMin best{lo, f(lo)};
    while (hi - lo > 1e-10) {
        const double step = (hi - lo) / (points - 1);
        for (int i = 0; i < points; ++i) {
            const double h = lo + step * i;
            const double v = f(h);
            if (v < best.value) best = {h, v};
        }
        lo = std::max(lo, best.h - step);
        hi = best.h + step;
        points = 201;
    }
    return best;
}

}  // namespace

TEST_CASE("exact optimal bandwidths for the normal model") {
    const BerksonModel model = normal_model(2.0);
    const auto hy = optimal_scalar_bandwidth(model, 50, Target::Y);
    const auto hx = optimal_scalar_bandwidth(model, 50, Target::X);
    CHECK(hy.value == doctest::Approx(0.26).epsilon(0.005 / 0.26));
    CHECK(hx.value == doctest::Approx(0.52).epsilon(0.005 / 0.52));
    CHECK_FALSE(hy.at_boundary);
    CHECK(hy.bracket_lo <= hy.value);
    CHECK(hy.value <= hy.bracket_hi);
    const double at_lo = exact_mise(model, BandwidthSpec::scalar(hy.bracket_lo), 50);
    const double at_hi = exact_mise(model, BandwidthSpec::scalar(hy.bracket_hi), 50);
    CHECK(hy.objective <= at_lo);
    CHECK(hy.objective <= at_hi);
    CHECK(hy.iterations > 0);
}

TEST_CASE("optimizer agrees with a brute-force scan on all table cells") {
    for (std::size_t n : {50u, 100u}) {
        for (const auto& d : catalog_1d()) {
            for (double err : kSigmas) {
                const BerksonModel model = BerksonModel::scalar(d.mixture, err);
                const double hi = default_search_upper(model, n);
                for (Target t : {Target::Y, Target::X}) {
                    auto f = [&](double h) {
                        const auto bw = BandwidthSpec::scalar(h);
                        return t == Target::Y ? exact_mise(model, bw, n) : mise_for_fx(model, bw, n);
                    };
                    const ScanMin oracle = nested_scan(f, t == Target::Y ? 0.0 : hi / 2000, hi);
                    const auto r = optimal_scalar_bandwidth(model, n, t);
                    INFO(d.name, " sigma_eps2=", err, " n=", n, " target=", int(t));
                    CHECK(std::abs(r.value - oracle.h) <= 1e-6);
                    CHECK(r.objective <= oracle.value * (1.0 + 1e-12));
                }
            }
        }
    }
}

TEST_CASE("MISE ratio at h = 0 grows as the error shrinks") {
    for (const auto& d : catalog_1d()) {
        double prev = 0.0;
        for (double err : kSigmas) {
            const BerksonModel model = BerksonModel::scalar(d.mixture, err);
            const auto hy = optimal_scalar_bandwidth(model, 50, Target::Y);
            const double ratio = exact_mise(model, BandwidthSpec::scalar(0.0), 50) / hy.objective;
            CHECK(ratio >= prev);
            prev = ratio;
        }
    }
}

TEST_CASE("bracket exhaustion") {
    OptimizerOptions tight;
    tight.upper = 0.01;
    try {
        optimal_scalar_bandwidth(normal_model(2.0), 50, Target::Y, tight);
        FAIL("expected bracket exhaustion");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BracketExhausted);
    }
    // One expansion by 4 is enough when the optimum sits just past the edge.
    tight.upper = 0.2;
    CHECK(optimal_scalar_bandwidth(normal_model(2.0), 50, Target::Y, tight).value ==
          doctest::Approx(0.255311).epsilon(1e-5));
}

TEST_CASE("asymptotic bandwidth") {
    const BerksonModel model = normal_model(1.0);
    CHECK(asymptotic_bandwidth(model, 50) == doctest::Approx(0.312276).epsilon(1e-6));
    CHECK(asymptotic_bandwidth(model, 200) == doctest::Approx(asymptotic_bandwidth(model, 50) / 2.0).epsilon(1e-14));
    try {
        asymptotic_bandwidth(normal_model(0.0), 50);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergence);
    }
    for (double err : {2.0, 1.0, 0.5}) {
        const BerksonModel m = normal_model(err);
        const double ratio = optimal_scalar_bandwidth(m, 100, Target::Y).value / asymptotic_bandwidth(m, 100);
        CHECK(std::abs(ratio - 1.0) <= 0.10);
    }
}

TEST_CASE("rule-of-thumb bandwidths") {
    CHECK(rule_of_thumb_hy(1.0, error_char_sq_gaussian(1.0), 50) == doctest::Approx(0.312276).epsilon(1e-6));
    CHECK(rule_of_thumb_hy_gaussian(1.0, 1.0, 50) == doctest::Approx(0.312276).epsilon(1e-6));
    for (double err : {0.006, 0.06, 0.6, 1.0, 2.0}) {
        for (double var : {0.3, 1.0, 4.0}) {
            const double quad = rule_of_thumb_hy(var, error_char_sq_gaussian(err), 77);
            CHECK(quad == doctest::Approx(rule_of_thumb_hy_gaussian(var, err, 77)).epsilon(1e-6));
        }
    }
    CHECK(rule_of_thumb_hy_gaussian(1.0, 0.5, 400) ==
          doctest::Approx(rule_of_thumb_hy_gaussian(1.0, 0.5, 100) / 2.0).epsilon(1e-14));
    CHECK(rule_of_thumb_hy(1.0, error_char_sq_gaussian(0.5), 400) ==
          doctest::Approx(rule_of_thumb_hy(1.0, error_char_sq_gaussian(0.5), 100) / 2.0).epsilon(1e-14));
    CHECK(rule_of_thumb_hy_gaussian(1.0, 1e-6, 50) > 10.0);
    for (double var : {1e-4, 0.1, 1.0, 10.0, 1e4}) {
        for (double err : {1e-4, 0.1, 1.0, 10.0}) CHECK(rule_of_thumb_hy_gaussian(var, err, 10) > 0.0);
    }
    try {
        rule_of_thumb_hy_gaussian(1.0, 0.0, 50);
        FAIL("expected divergence");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Divergence);
    }
    CHECK_THROWS_AS(rule_of_thumb_hy(1.0, error_char_sq_gaussian(0.0), 50), Error);

    // With the true variance of a single normal, all three coincide.
    for (double err : {0.25, 1.0, 3.0}) {
        const BerksonModel m = normal_model(err);
        const double star = asymptotic_bandwidth(m, 120);
        CHECK(rule_of_thumb_hy(1.0, error_char_sq_gaussian(err), 120) == doctest::Approx(star).epsilon(1e-6));
        CHECK(rule_of_thumb_hy_gaussian(1.0, err, 120) == doctest::Approx(star).epsilon(1e-6));
    }
}

TEST_CASE("Silverman's rule") {
    CHECK(silverman_hx(1.0, 1.34, 50) == doctest::Approx(0.411574).epsilon(1e-6));
    CHECK(silverman_hx(1.0, 0.67, 50) == doctest::Approx(0.9 * 0.5 / std::pow(50.0, 0.2)));
    CHECK(silverman_hx(1.0, 1.34, 32 * 50) == doctest::Approx(silverman_hx(1.0, 1.34, 50) / 2.0));
    CHECK_THROWS_AS(silverman_hx(0.0, 1.0, 10), Error);
    CHECK_THROWS_AS(silverman_hx(1.0, 0.0, 10), Error);
}

TEST_CASE("moment integrals match quadrature") {
    using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double a = 1.7, d = 0.9;
    Matrix am = Matrix::Constant(1, 1, a);
    Vector dv = Vector::Constant(1, d);
    for (int k : {0, 2, 4}) {
        const double numeric = Rule::integrate(
            [&](double w) { return std::pow(w, k) * std::cos(w * d) * std::exp(-0.5 * a * w * w); },
            -40.0, 40.0, 15, 1e-14);
        const std::vector<int> idx(static_cast<std::size_t>(k), 0);
        CHECK(gaussian_moment_integral(am, dv, idx) == doctest::Approx(numeric).epsilon(1e-10));
    }

    // Two dimensions with a correlated decay matrix, by nested quadrature.
    Matrix a2(2, 2);
    a2 << 1.3, 0.4, 0.4, 0.8;
    const Vector d2 = Eigen::Vector2d(0.5, -1.1);
    const std::vector<std::vector<int>> cases = {{}, {0, 1}, {1, 1}, {0, 0, 1, 1}, {0, 1, 1, 1}};
    for (const auto& idx : cases) {
        auto inner = [&](double w0) {
            return Rule::integrate(
                [&](double w1) {
                    const double w[2] = {w0, w1};
                    double mono = 1.0;
                    for (int i : idx) mono *= w[i];
                    const double q = a2(0, 0) * w0 * w0 + 2 * a2(0, 1) * w0 * w1 + a2(1, 1) * w1 * w1;
                    return mono * std::cos(w0 * d2(0) + w1 * d2(1)) * std::exp(-0.5 * q);
                },
                -30.0, 30.0, 15, 1e-13);
        };
        const double numeric = Rule::integrate(inner, -30.0, 30.0, 15, 1e-12);
        CHECK(gaussian_moment_integral(a2, d2, idx) == doctest::Approx(numeric).epsilon(1e-8));
    }
}

TEST_CASE("diagonal QP reduces to h* in one dimension") {
    const BerksonModel model = normal_model(1.0);
    const auto qp = diagonal_qp(model, 50);
    const double star = asymptotic_bandwidth(model, 50);
    CHECK(qp.constrained(0) == doctest::Approx(star * star).epsilon(1e-10));
    CHECK(qp.unconstrained(0) == doctest::Approx(star * star).epsilon(1e-10));

    const BerksonModel b2 = BerksonModel::scalar(find_density("bimodal2").mixture, 0.5);
    const auto q2 = diagonal_qp(b2, 80);
    const double h2 = asymptotic_bandwidth(b2, 80);
    CHECK(q2.constrained(0) == doctest::Approx(h2 * h2).epsilon(1e-8));
}

TEST_CASE("diagonal QP for separable models") {
    const GaussianMixture fx = GaussianMixture::normal(Vector::Zero(3), Vector(Eigen::Vector3d(1.0, 2.0, 0.5)).asDiagonal());
    const BerksonModel model(fx, Vector(Eigen::Vector3d(0.3, 1.0, 0.7)).asDiagonal());
    const auto qp = diagonal_qp(model, 200);
    const auto& f = qp.form;
    CHECK((f.b - f.b.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(Eigen::LLT<Matrix>(f.b).info() == Eigen::Success);
    for (int i = 0; i < 3; ++i) CHECK(qp.constrained(i) >= 0.0);

    // Coordinate-wise optimality: projecting the unconstrained point never wins.
    const Vector projected = qp.unconstrained.cwiseMax(0.0);
    CHECK(qp.objective <= f.objective(projected, 200) + 1e-15);
}

TEST_CASE("diagonal QP forces a zero bandwidth") {
    const GaussianMixture fx = GaussianMixture::normal(Vector::Zero(2), Matrix::Identity(2, 2));
    const BerksonModel model(fx, Vector(Eigen::Vector2d(1.0, 0.01)).asDiagonal());
    const auto qp = diagonal_qp(model, 100);
    CHECK(qp.unconstrained(0) < 0.0);
    CHECK(qp.constrained(0) == 0.0);
    CHECK(qp.constrained(1) > 0.0);
    const Vector projected = qp.unconstrained.cwiseMax(0.0);
    CHECK(qp.objective <= qp.form.objective(projected, 100));

    // Separable form: B' diagonal entries and the one-dimensional answer for s_2.
    const double s2 = qp.form.v(1) / (2.0 * 100 * qp.form.b(1, 1));
    CHECK(qp.constrained(1) == doctest::Approx(s2).epsilon(1e-12));

    try {
        diagonal_qp(BerksonModel(fx, Matrix::Identity(2, 2), 2.0 * Matrix::Identity(2, 2)), 10);
        FAIL("expected a kernel covariance error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Domain);
    }
}

TEST_CASE("full bandwidth matrices") {
    const GaussianMixture fx = GaussianMixture::normal(Vector::Zero(2), Matrix::Identity(2, 2));
    const BerksonModel model(fx, Vector(Eigen::Vector2d(1.0, 0.25)).asDiagonal());
    const QuadraticForm form = full_bandwidth_matrices(model);
    CHECK(form.b.rows() == 4);
    CHECK(form.b.row(1) == form.b.row(2));
    const Eigen::JacobiSVD<Matrix> svd(form.b);
    CHECK(svd.singularValues()(3) <= 1e-12 * svd.singularValues()(0));
    CHECK((form.b - form.b.transpose()).cwiseAbs().maxCoeff() == 0.0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(form.b);
    CHECK(eig.eigenvalues().minCoeff() >= -1e-14 * eig.eigenvalues().maxCoeff());

    // The full objective restricted to diagonal S is the diagonal QP.
    const auto qp = diagonal_qp(model, 60);
    const Matrix s_opt = qp.constrained.asDiagonal();
    const double best = full_bandwidth_objective(form, s_opt, 60);
    CHECK(best == doctest::Approx(qp.objective).epsilon(1e-12));

    const CounterRng rng(31);
    const Vector root = qp.constrained.cwiseSqrt();
    for (std::uint64_t k = 0; k < 50; ++k) {
        Matrix h = root.asDiagonal();
        h(0, 1) = (rng.uniform(k, 0) - 0.5) * root.maxCoeff();
        h(1, 0) = (rng.uniform(k, 1) - 0.5) * root.maxCoeff();
        const Matrix s = h.transpose() * h;
        CHECK(full_bandwidth_objective(form, s, 60) >= best - 1e-15);
    }

    const BerksonModel three(find_density("multi_normal").mixture, Matrix::Identity(3, 3));
    try {
        full_bandwidth_matrices(three);
        FAIL("expected unsupported dimension");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::UnsupportedDimension);
    }
}
