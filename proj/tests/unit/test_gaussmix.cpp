#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "berkson/error.hpp"
#include "berkson/estimator.hpp"
#include "berkson/experiments.hpp"
#include "berkson/gaussmix.hpp"
#include "berkson/rng.hpp"

using namespace berkson;

namespace {

Matrix m1(double v) { return Matrix::Constant(1, 1, v); }
Vector v1(double v) { return Vector::Constant(1, v); }

double quad(const std::function<double(double)>& f, double a, double b) {
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

}  // namespace

TEST_CASE("normal_pdf at the origin") {
    CHECK(normal_pdf(v1(0), v1(0), m1(1)) == doctest::Approx(0.3989422804).epsilon(1e-10));
    CHECK(normal_pdf(v1(0), v1(0), m1(2)) == doctest::Approx(0.2820947918).epsilon(1e-10));
    CHECK(normal_pdf(Vector::Zero(3), Vector::Zero(3), Matrix::Identity(3, 3)) ==
          doctest::Approx(0.0634936359).epsilon(1e-9));
    CHECK(normal_pdf_at_zero(2.0 * Matrix::Identity(3, 3)) ==
          doctest::Approx(std::pow(4.0 * std::numbers::pi, -1.5)).epsilon(1e-14));
}

TEST_CASE("invalid covariances are rejected") {
    Matrix bad(2, 2);
    bad << 1.0, 2.0, 2.0, 1.0;
    CHECK_THROWS_AS(normal_pdf(Vector::Zero(2), Vector::Zero(2), bad), Error);
    try {
        GaussianMixture::normal(Vector::Zero(2), bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidCovariance);
    }
    Matrix asym(2, 2);
    asym << 1.0, 0.1, 0.0, 1.0;
    try {
        convolve_with_normal(GaussianMixture::normal(Vector::Zero(2), Matrix::Identity(2, 2)), asym);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Shape);
    }
    CHECK_THROWS_AS(normal_pdf(Vector::Zero(2), Vector::Zero(3), Matrix::Identity(2, 2)), Error);
}

TEST_CASE("mixture weights") {
    CHECK_NOTHROW(GaussianMixture({{0.3 + 1e-10, v1(0), m1(1)}, {0.7, v1(1), m1(1)}}));
    CHECK_THROWS_AS(GaussianMixture({{0.3, v1(0), m1(1)}, {0.6, v1(1), m1(1)}}), Error);
    CHECK_THROWS_AS(GaussianMixture({{0.0, v1(0), m1(1)}, {1.0, v1(1), m1(1)}}), Error);
    const GaussianMixture mix({{0.3 + 1e-10, v1(0), m1(1)}, {0.7, v1(1), m1(1)}});
    CHECK(mix.weights().sum() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("catalog densities") {
    CHECK(mixture_pdf(find_density("normal").mixture, 0.0) ==
          doctest::Approx(0.3989422804).epsilon(1e-10));
    const auto& b2 = find_density("bimodal2").mixture;
    CHECK(mixture_pdf(b2, 0.0) == doctest::Approx(6.0758828e-9).epsilon(1e-6));
    for (double x : {0.5, 2.0, 6.0, 9.0}) CHECK(mixture_pdf(b2, x) == mixture_pdf(b2, -x));

    for (const auto& e : catalog_1d()) {
        const auto& c = e.mixture.components();
        double lo = 1e9, hi = -1e9, sd = 0.0;
        for (const auto& comp : c) {
            lo = std::min(lo, comp.mean(0));
            hi = std::max(hi, comp.mean(0));
            sd = std::max(sd, std::sqrt(comp.covariance(0, 0)));
        }
        const Vector grid = Vector::LinSpaced(4001, lo - 10 * sd, hi + 10 * sd);
        Vector f(grid.size());
        for (Eigen::Index i = 0; i < grid.size(); ++i) f(i) = mixture_pdf(e.mixture, grid(i));
        CHECK(simpson(grid, f) == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("convolution is parameter arithmetic") {
    const auto& normal = find_density("normal").mixture;
    const auto y = convolve_with_normal(normal, m1(1.0));
    CHECK(y.size() == 1);
    CHECK(y[0].covariance(0, 0) == 2.0);

    const auto same = convolve_with_normal(normal, m1(0.0));
    CHECK(same[0].covariance(0, 0) == 1.0);

    const auto b1 = convolve_with_normal(find_density("bimodal1").mixture, m1(0.125));
    CHECK(b1[0].weight == doctest::Approx(0.7));
    CHECK(b1[1].mean(0) == 3.0);
    CHECK(b1[0].covariance(0, 0) == 1.125);
    CHECK(b1[1].covariance(0, 0) == 1.125);

    const auto& multi = find_density("multi_3comp").mixture;
    const Matrix a = 0.25 * Matrix::Identity(3, 3);
    const Matrix b = 0.5 * Matrix::Identity(3, 3);
    const auto twice = convolve_with_normal(convolve_with_normal(multi, a), b);
    const auto once = convolve_with_normal(multi, a + b);
    for (std::size_t j = 0; j < multi.size(); ++j) {
        CHECK(twice[j].covariance == once[j].covariance);
        CHECK(twice[j].mean == once[j].mean);
    }
}

TEST_CASE("gaussian product integral") {
    CHECK(gaussian_product_integral(m1(1), v1(0), m1(1), v1(0)) ==
          doctest::Approx(0.2820947918).epsilon(1e-10));
    CHECK(gaussian_product_integral(m1(1), v1(2), m1(3), v1(0)) ==
          doctest::Approx(0.1209853623).epsilon(1e-9));
    CHECK(gaussian_product_integral(m1(3), v1(0), m1(1), v1(2)) ==
          gaussian_product_integral(m1(1), v1(2), m1(3), v1(0)));

    const CounterRng rng(11);
    for (std::uint64_t k = 0; k < 20; ++k) {
        const double sa = 0.2 + 2.0 * rng.uniform(k, 0);
        const double sb = 0.2 + 2.0 * rng.uniform(k, 1);
        const double ma = -3.0 + 6.0 * rng.uniform(k + 100, 0);
        const double mb = -3.0 + 6.0 * rng.uniform(k + 100, 1);
        const double numeric = quad(
            [&](double x) {
                return normal_pdf(v1(x), v1(ma), m1(sa)) * normal_pdf(v1(x), v1(mb), m1(sb));
            },
            -30.0, 30.0);
        CHECK(std::abs(gaussian_product_integral(m1(sa), v1(ma), m1(sb), v1(mb)) - numeric) <= 1e-9);
    }
}

TEST_CASE("characteristic function modulus") {
    for (const auto& e : catalog_1d()) CHECK(char_fn_sq(e.mixture, 0.0) == doctest::Approx(1.0));
    CHECK(char_fn_sq(find_density("normal").mixture, 1.0) ==
          doctest::Approx(0.3678794412).epsilon(1e-10));
    for (const auto& e : catalog_1d()) {
        for (double w : {0.3, 1.1, 2.7}) {
            const double v = char_fn_sq(e.mixture, w);
            CHECK(v == char_fn_sq(e.mixture, -w));
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    }

    // Numeric Fourier transform of Bimodal 2 at w = pi / 6.
    const auto& b2 = find_density("bimodal2").mixture;
    const double w = std::numbers::pi / 6.0;
    const double re = quad([&](double x) { return std::cos(w * x) * mixture_pdf(b2, x); }, -15, 15);
    const double im = quad([&](double x) { return std::sin(w * x) * mixture_pdf(b2, x); }, -15, 15);
    CHECK(char_fn_sq(b2, w) == doctest::Approx(re * re + im * im).epsilon(1e-9));

    const auto& m3 = find_density("multi_3comp").mixture;
    Vector omega(3);
    omega << 0.4, -0.2, 0.7;
    CHECK(char_fn_sq(m3, omega) == doctest::Approx(char_fn_sq(m3, Vector(-omega))));
}

TEST_CASE("sampling") {
    const auto& normal = find_density("normal").mixture;
    const SampleMatrix a = sample(normal, 1000, 5);
    const SampleMatrix b = sample(normal, 1000, 5);
    CHECK(a.rows() == b.rows());
    CHECK(sample(normal, 10, 5, 1).rows() != sample(normal, 10, 5, 2).rows());
    CHECK_THROWS_AS(sample(normal, 0, 5), Error);

    constexpr std::size_t n = 1000000;
    const SampleMatrix big = sample(normal, n, 17);
    CHECK(std::abs(big.values().mean()) < 4.0 / std::sqrt(double(n)));

    const SampleMatrix two = sample(find_density("bimodal2").mixture, n, 19);
    const double frac = (two.values().array() > 0.0).cast<double>().mean();
    CHECK(std::abs(frac - 0.5) < 0.002);

    // Multivariate draws reproduce the component covariance.
    const auto plus = GaussianMixture::normal(Vector::Zero(3), banded_covariance(1.0));
    const SampleMatrix m = sample(plus, 200000, 23);
    const Matrix centered = m.rows().rowwise() - m.rows().colwise().mean();
    const Matrix cov = centered.transpose() * centered / double(m.size() - 1);
    CHECK((cov - banded_covariance(1.0)).cwiseAbs().maxCoeff() < 0.02);
}
