#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "berkson/error.hpp"
#include "berkson/estimator.hpp"
#include "berkson/experiments.hpp"

using namespace berkson;

namespace {

SampleMatrix draw(const char* density, std::size_t n, std::uint64_t seed) {
    return sample(find_density(density).mixture, n, seed);
}

double trapezoid(const Vector& x, const Vector& y) {
    double s = 0.0;
    for (Eigen::Index i = 1; i < x.size(); ++i) s += 0.5 * (x(i) - x(i - 1)) * (y(i) + y(i - 1));
    return s;
}

}  // namespace

TEST_CASE("single observation gives a normal density") {
    const SampleMatrix one = SampleMatrix::from_values(Vector::Zero(1));
    const Vector grid = Vector::LinSpaced(41, -4.0, 4.0);
    const DensityCurve c = evaluate_estimator(one, 1.0, BandwidthSpec::scalar(0.0), grid);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        CHECK(c.values(i) == doctest::Approx(std::exp(-0.5 * grid(i) * grid(i)) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-14));
    }

    const SampleMatrix at(Matrix::Constant(1, 1, 1.5));
    const DensityCurve smoothed = evaluate_estimator(at, 0.4, BandwidthSpec::scalar(0.5), grid);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        CHECK(smoothed.values(i) == doctest::Approx(normal_pdf(Vector::Constant(1, grid(i)), Vector::Constant(1, 1.5), Matrix::Constant(1, 1, 0.65))).epsilon(1e-13));
    }
}

TEST_CASE("kernel-free form and dependence on S + Sigma_eps only") {
    const SampleMatrix x = draw("bimodal1", 40, 2);
    const Vector grid = default_grid(x, 0.3, 0.0);
    const DensityCurve zero = evaluate_estimator(x, 0.3, BandwidthSpec::scalar(0.0), grid);
    for (Eigen::Index g = 0; g < grid.size(); g += 37) {
        double direct = 0.0;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            const double d = grid(g) - x.rows()(i, 0);
            direct += std::exp(-d * d / 0.6) / std::sqrt(2.0 * std::numbers::pi * 0.3);
        }
        CHECK(zero.values(g) == doctest::Approx(direct / x.size()).epsilon(1e-13));
    }

    const DensityCurve a = evaluate_estimator(x, 0.3, BandwidthSpec::scalar(0.4), grid);
    const DensityCurve b = evaluate_estimator(x, 0.3 + 0.16, BandwidthSpec::scalar(0.0), grid);
    CHECK((a.values - b.values).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("curves integrate to one") {
    for (const char* d : {"normal", "bimodal2", "trimodal"}) {
        const SampleMatrix x = draw(d, 60, 4);
        for (double h : {0.0, 0.3}) {
            const double sd = std::sqrt(sample_variance(x) + 0.125 + h * h);
            const Vector grid = Vector::LinSpaced(4001, x.values().minCoeff() - 8 * sd,
                                                  x.values().maxCoeff() + 8 * sd);
            const DensityCurve c = evaluate_estimator(x, 0.125, BandwidthSpec::scalar(h), grid);
            CHECK(c.values.minCoeff() >= 0.0);
            CHECK(simpson(c.grid, c.values) == doctest::Approx(1.0).epsilon(1e-4));
        }
        const Vector def = default_grid(x, 0.125, 0.3);
        CHECK(def.size() == 512);
        const DensityCurve c = evaluate_estimator(x, 0.125, BandwidthSpec::scalar(0.3), def);
        CHECK(trapezoid(c.grid, c.values) == doctest::Approx(1.0).epsilon(1e-4));
    }
}

TEST_CASE("more smoothing lowers the peak") {
    for (std::uint64_t trial = 0; trial < 20; ++trial) {
        const SampleMatrix x = draw("trimodal", 30, 100 + trial);
        const Vector grid = default_grid(x, 0.1, 1.0, 1001);
        const double p1 = evaluate_estimator(x, 0.1, BandwidthSpec::scalar(0.2), grid).values.maxCoeff();
        const double p2 = evaluate_estimator(x, 0.1, BandwidthSpec::scalar(0.5), grid).values.maxCoeff();
        CHECK(p2 <= p1);
    }
}

TEST_CASE("estimator is linear in the sample") {
    const SampleMatrix a = draw("normal", 20, 8);
    const SampleMatrix b = draw("bimodal1", 30, 9);
    Matrix both(50, 1);
    both << a.rows(), b.rows();
    const Vector grid = Vector::LinSpaced(101, -6.0, 8.0);
    const auto bw = BandwidthSpec::scalar(0.3);
    const Vector fa = evaluate_estimator(a, 0.2, bw, grid).values;
    const Vector fb = evaluate_estimator(b, 0.2, bw, grid).values;
    const Vector fab = evaluate_estimator(SampleMatrix(both), 0.2, bw, grid).values;
    CHECK((fab - (20.0 * fa + 30.0 * fb) / 50.0).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("multivariate evaluation") {
    const auto& m = find_density("multi_2comp1").mixture;
    const SampleMatrix one(Matrix(m[0].mean.transpose()));
    const Matrix err = 0.5 * Matrix::Identity(3, 3);
    Matrix pts(3, 3);
    pts << 0.0, 0.0, 0.0, 0.5, -0.2, 1.0, -1.0, 1.0, 0.3;
    const Vector v = estimator_values(one, err, BandwidthSpec::scalar(0.4), pts, Matrix::Identity(3, 3), 2);
    for (int i = 0; i < 3; ++i) {
        CHECK(v(i) == doctest::Approx(normal_pdf(pts.row(i).transpose(), m[0].mean, err + 0.16 * Matrix::Identity(3, 3))).epsilon(1e-13));
    }
}

TEST_CASE("thread count does not change values") {
    const SampleMatrix x = draw("bimodal2", 200, 5);
    const Vector grid = default_grid(x, 0.2, 0.1, 2000);
    const Vector one = evaluate_estimator(x, 0.2, BandwidthSpec::scalar(0.1), grid, 1.0, 1).values;
    const Vector four = evaluate_estimator(x, 0.2, BandwidthSpec::scalar(0.1), grid, 1.0, 4).values;
    CHECK(one == four);
}

TEST_CASE("degenerate estimator") {
    const SampleMatrix x = draw("normal", 10, 1);
    try {
        evaluate_estimator(x, 0.0, BandwidthSpec::scalar(0.0), Vector::LinSpaced(5, -1, 1));
        FAIL("expected degenerate error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateModel);
    }
    CHECK_THROWS_AS(evaluate_estimator(x, 1.0, BandwidthSpec::scalar(0.0), Vector::LinSpaced(5, 1, -1)), Error);
}

TEST_CASE("characteristic function form") {
    const SampleMatrix x = draw("bimodal1", 25, 12);
    CHECK(estimator_char_form(x, 0.5, 0.3, 0.0) == std::complex<double>(1.0, 0.0));
    for (int k = 0; k < 100; ++k) {
        const double w = -10.0 + 0.2 * k;
        CHECK(std::abs(estimator_char_form(x, 0.5, 0.3, w)) <= std::exp(-0.25 * w * w) + 1e-15);
    }

    // Fourier inversion: f(y) = (1/2pi) int Re(e^{-iwy} phi(w)) dw.
    using Rule = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double y = 0.7;
    const double inv = Rule::integrate(
                           [&](double w) {
                               return (std::polar(1.0, -w * y) * estimator_char_form(x, 0.5, 0.3, w)).real();
                           },
                           -25.0, 25.0, 20, 1e-12) /
                       (2.0 * std::numbers::pi);
    const Vector g = Vector::Constant(1, y);
    const double direct = evaluate_estimator(x, 0.5, BandwidthSpec::scalar(0.3), g).values(0);
    CHECK(std::abs(inv - direct) <= 1e-6);
}

TEST_CASE("simpson rule") {
    const Vector x = Vector::LinSpaced(11, 0.0, 2.0);
    CHECK(simpson(x, x.array().cube().matrix()) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK_THROWS_AS(simpson(Vector::LinSpaced(10, 0, 1), Vector::Zero(10)), Error);
}
