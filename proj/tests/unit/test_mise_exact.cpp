#include <doctest.h>

#include <cmath>
#include <numbers>

#include "berkson/error.hpp"
#include "berkson/experiments.hpp"
#include "berkson/mise_exact.hpp"
#include "berkson/rng.hpp"

using namespace berkson;

TEST_CASE("exact MISE at h = 0") {
    const BerksonModel model = BerksonModel::scalar(find_density("normal").mixture, 1.0);
    const double phi2 = 1.0 / std::sqrt(4.0 * std::numbers::pi);
    const double phi4 = 1.0 / std::sqrt(8.0 * std::numbers::pi);
    const double expected = (phi2 - phi4) / 50.0;
    CHECK(exact_mise(model, BandwidthSpec::scalar(0.0), 50) == doctest::Approx(expected).epsilon(1e-14));
    CHECK(exact_mise(model, BandwidthSpec::scalar(0.0), 50) == doctest::Approx(0.00165248).epsilon(1e-5));

    // p = 3 Multi Normal with 2I error: everything factorizes over coordinates.
    const BerksonModel multi(find_density("multi_normal").mixture, 2.0 * Matrix::Identity(3, 3));
    const double a = std::pow(2.0 * std::numbers::pi * 4.0, -1.5);  // phi_{4I}(0)
    const double b = std::pow(2.0 * std::numbers::pi * 6.0, -1.5);  // phi_{6I}(0)
    CHECK(exact_mise(multi, BandwidthSpec::scalar(0.0), 100) ==
          doctest::Approx((a - b) / 100.0).epsilon(1e-13));
}

TEST_CASE("decomposition properties") {
    const CounterRng rng(3);
    for (std::uint64_t k = 0; k < 100; ++k) {
        std::uint64_t c = 0;
        auto u = [&] { return rng.uniform(k * 32 + c++, 1); };
        const DensityCatalogEntry entry = k % 2 ? catalog_1d()[k % 4] : catalog_3d()[k % 4];
        const Eigen::Index p = entry.mixture.dim();
        const BerksonModel model(entry.mixture, (0.05 + 2.0 * u()) * Matrix::Identity(p, p));
        const auto bw = BandwidthSpec::scalar(u());
        const auto n = static_cast<std::size_t>(5 + 500 * u());
        const IseDecomposition d = exact_ise_decomposition(model, bw, n);
        CHECK(d.bias >= 0.0);
        CHECK(d.variance > 0.0);
        CHECK(d.total() == exact_mise(model, bw, n));
        CHECK(exact_ise_decomposition(model, bw, 2 * n).variance < d.variance);
    }
    const BerksonModel model = BerksonModel::scalar(find_density("trimodal").mixture, 0.3);
    CHECK(exact_ise_decomposition(model, BandwidthSpec::scalar(0.0), 40).bias == 0.0);
}

TEST_CASE("component order does not matter") {
    const auto& tri = find_density("trimodal").mixture;
    auto comps = tri.components();
    std::swap(comps[0], comps[2]);
    const BerksonModel a = BerksonModel::scalar(tri, 0.5);
    const BerksonModel b = BerksonModel::scalar(GaussianMixture(comps), 0.5);
    for (double h : {0.0, 0.2, 0.7}) {
        CHECK(exact_mise(a, BandwidthSpec::scalar(h), 60) ==
              doctest::Approx(exact_mise(b, BandwidthSpec::scalar(h), 60)).epsilon(1e-14));
    }
}

TEST_CASE("bandwidth kinds agree") {
    const BerksonModel model(find_density("multi_2comp1").mixture, 0.4 * Matrix::Identity(3, 3));
    const double h = 0.35;
    const double scalar = exact_mise(model, BandwidthSpec::scalar(h), 80);
    const double diagonal = exact_mise(model, BandwidthSpec::diagonal(Vector::Constant(3, h * h)), 80);
    const double full = exact_mise(model, BandwidthSpec::full(h * Matrix::Identity(3, 3)), 80);
    CHECK(diagonal == doctest::Approx(scalar).epsilon(1e-13));
    CHECK(full == doctest::Approx(scalar).epsilon(1e-13));
    CHECK_THROWS_AS(BandwidthSpec::scalar(-0.1), Error);
    CHECK_THROWS_AS(BandwidthSpec::diagonal(Vector::Constant(2, -1.0)), Error);
}

TEST_CASE("f_X MISE") {
    const BerksonModel model = BerksonModel::scalar(find_density("normal").mixture, 2.0);
    const BerksonModel free = model.with_error(Matrix::Zero(1, 1));
    CHECK(mise_for_fx(model, BandwidthSpec::scalar(0.52), 50) ==
          exact_mise(free, BandwidthSpec::scalar(0.52), 50));
    // Around h = 0.52 the f_X MISE has its minimum.
    const double mid = mise_for_fx(model, BandwidthSpec::scalar(0.52), 50);
    CHECK(mid < mise_for_fx(model, BandwidthSpec::scalar(0.45), 50));
    CHECK(mid < mise_for_fx(model, BandwidthSpec::scalar(0.60), 50));
    // Large n leaves the bias.
    const auto bw = BandwidthSpec::scalar(0.4);
    CHECK(mise_for_fx(model, bw, 100000000) ==
          doctest::Approx(exact_ise_decomposition(free, bw, 1).bias).epsilon(1e-6));
}

TEST_CASE("degenerate configurations") {
    const BerksonModel model = BerksonModel::scalar(find_density("normal").mixture, 0.0);
    try {
        exact_mise(model, BandwidthSpec::scalar(0.0), 10);
        FAIL("expected degenerate model");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateModel);
        CHECK(e.is_numeric());
    }
    CHECK_THROWS_AS(mise_for_fx(BerksonModel::scalar(find_density("normal").mixture, 1.0),
                                BandwidthSpec::scalar(0.0), 10),
                    Error);
    CHECK_THROWS_AS(exact_mise(model, BandwidthSpec::scalar(0.3), 0), Error);
}
