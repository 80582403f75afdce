#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "berkson/bandwidth.hpp"
#include "berkson/error.hpp"
#include "berkson/estimator.hpp"
#include "berkson/experiments.hpp"
#include "berkson/montecarlo.hpp"
#include "berkson/parallel.hpp"
#include "berkson/spectral.hpp"

namespace py = pybind11;
using namespace berkson;

namespace {

// A density is a catalog name or a dict with weights, means and covariances.
GaussianMixture to_mixture(const py::object& density) {
    if (py::isinstance<py::str>(density)) return find_density(density.cast<std::string>()).mixture;
    const auto d = density.cast<py::dict>();
    const auto weights = d["weights"].cast<std::vector<double>>();
    const auto means = d["means"].cast<std::vector<std::vector<double>>>();
    const auto covs = d["covariances"].cast<std::vector<Matrix>>();
    if (means.size() != weights.size() || covs.size() != weights.size()) {
        fail(ErrorKind::Shape, "weights, means and covariances differ in length");
    }
    std::vector<GaussianComponent> comps;
    for (std::size_t j = 0; j < weights.size(); ++j) {
        comps.push_back({weights[j], Eigen::Map<const Vector>(means[j].data(), means[j].size()), covs[j]});
    }
    return GaussianMixture(std::move(comps));
}

// Error covariance: a scalar variance (times I) or a p x p matrix.
Matrix to_cov(const py::object& value, Eigen::Index p) {
    if (py::isinstance<py::float_>(value) || py::isinstance<py::int_>(value)) {
        return value.cast<double>() * Matrix::Identity(p, p);
    }
    return value.cast<Matrix>();
}

BerksonModel to_model(const py::object& density, const py::object& error) {
    GaussianMixture fx = to_mixture(density);
    const Eigen::Index p = fx.dim();
    return BerksonModel(std::move(fx), to_cov(error, p));
}

// Scalar h, a 1-D array of squared diagonal bandwidths, or a full H matrix.
BandwidthSpec to_bandwidth(const py::object& h) {
    if (py::isinstance<py::float_>(h) || py::isinstance<py::int_>(h)) {
        return BandwidthSpec::scalar(h.cast<double>());
    }
    const auto arr = py::array_t<double>::ensure(h);
    if (arr && arr.ndim() == 1) return BandwidthSpec::diagonal(h.cast<Vector>());
    return BandwidthSpec::full(h.cast<Matrix>());
}

SampleMatrix to_sample(const Eigen::Ref<const Matrix>& x) {
    // Accept (n,) arrays, which arrive as n x 1.
    return SampleMatrix(Matrix(x));
}

Target to_target(const std::string& t) {
    if (t == "y") return Target::Y;
    if (t == "x") return Target::X;
    fail(ErrorKind::Config, "target must be 'y' or 'x'");
}

py::dict cell_dict(const RatioCell& c) {
    py::dict d;
    d["density"] = c.density;
    d["sigma_eps2"] = c.sigma_eps2;
    d["n"] = c.n;
    d["h_y"] = c.h_y;
    d["h_x"] = c.h_x;
    d["mise_hy"] = c.mise_hy;
    d["mise_hx"] = c.mise_hx;
    d["mise_zero"] = c.mise_zero;
    d["ratio_zero"] = c.ratio_zero;
    d["ratio_hx"] = c.ratio_hx;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Kernel density estimation under Berkson measurement error";

    py::register_exception<Error>(m, "BerksonError", PyExc_ValueError);

    m.def("catalog", [] {
        std::vector<std::string> keys;
        for (const auto& e : catalog_1d()) keys.push_back(e.key);
        for (const auto& e : catalog_3d()) keys.push_back(e.key);
        return keys;
    }, "Keys of the built-in densities.");

    m.def("sample", [](const py::object& density, std::size_t n, std::uint64_t seed, std::uint64_t stream) {
        return sample(to_mixture(density), n, seed, stream).rows();
    }, py::arg("density"), py::arg("n"), py::arg("seed") = 1, py::arg("stream") = 0,
       "n x p draws from the density.");

    m.def("exact_mise", [](const py::object& density, const py::object& error, const py::object& h, std::size_t n) {
        return exact_mise(to_model(density, error), to_bandwidth(h), n);
    }, py::arg("density"), py::arg("error"), py::arg("h"), py::arg("n"));

    m.def("ise_decomposition", [](const py::object& density, const py::object& error, const py::object& h, std::size_t n) {
        const auto d = exact_ise_decomposition(to_model(density, error), to_bandwidth(h), n);
        py::dict out;
        out["variance"] = d.variance;
        out["bias"] = d.bias;
        out["total"] = d.total();
        return out;
    }, py::arg("density"), py::arg("error"), py::arg("h"), py::arg("n"));

    m.def("fourier_mise", [](const py::object& density, double error_var, double h, std::size_t n) {
        return fourier_mise(BerksonModel::scalar(to_mixture(density), error_var), h, n);
    }, py::arg("density"), py::arg("error_var"), py::arg("h"), py::arg("n"),
       "MISE by frequency-domain quadrature (one dimension).");

    m.def("optimal_bandwidth", [](const py::object& density, const py::object& error, std::size_t n, const std::string& target) {
        const auto r = optimal_scalar_bandwidth(to_model(density, error), n, to_target(target));
        py::dict out;
        out["h"] = r.value;
        out["mise"] = r.objective;
        out["at_boundary"] = r.at_boundary;
        return out;
    }, py::arg("density"), py::arg("error"), py::arg("n"), py::arg("target") = "y");

    m.def("asymptotic_bandwidth", [](const py::object& density, double error_var, std::size_t n) {
        return asymptotic_bandwidth(BerksonModel::scalar(to_mixture(density), error_var), n);
    }, py::arg("density"), py::arg("error_var"), py::arg("n"));

    m.def("rule_of_thumb_hy", &rule_of_thumb_hy_gaussian, py::arg("sample_var"), py::arg("error_var"), py::arg("n"));
    m.def("silverman_hx", &silverman_hx, py::arg("sample_sd"), py::arg("sample_iqr"), py::arg("n"));

    m.def("default_grid", [](const Eigen::Ref<const Matrix>& x, double error_var, double h, Eigen::Index points) {
        return default_grid(to_sample(x), error_var, h, points);
    }, py::arg("sample"), py::arg("error_var"), py::arg("h"), py::arg("points") = 512);

    m.def("estimate", [](const Eigen::Ref<const Matrix>& x, const py::object& error, const py::object& h,
                         const Eigen::Ref<const Matrix>& points, unsigned threads) {
        const SampleMatrix s = to_sample(x);
        const Eigen::Index p = s.dim();
        const Matrix cov = to_cov(error, p);
        const BandwidthSpec bw = to_bandwidth(h);
        const Matrix pts(points);
        py::gil_scoped_release release;
        return estimator_values(s, cov, bw, pts, Matrix::Identity(p, p), resolve_threads(threads));
    }, py::arg("sample"), py::arg("error"), py::arg("h"), py::arg("points"), py::arg("threads") = 1,
       "Estimate of f_Y at each row of points.");

    m.def("monte_carlo_ise", [](const py::object& density, double error_var, std::size_t n, std::size_t replicates,
                                double h, std::uint64_t seed, unsigned threads) {
        const BerksonModel model = BerksonModel::scalar(to_mixture(density), error_var);
        IseEstimate r;
        {
            py::gil_scoped_release release;
            r = monte_carlo_ise(model, n, replicates, h, seed, resolve_threads(threads));
        }
        py::dict out;
        out["mean"] = r.mean;
        out["standard_error"] = r.standard_error;
        return out;
    }, py::arg("density"), py::arg("error_var"), py::arg("n"), py::arg("replicates"), py::arg("h"),
       py::arg("seed") = 1, py::arg("threads") = 1);

    m.def("ratio_table", [](const std::vector<std::string>& densities, const std::vector<double>& sigma_eps2,
                            std::size_t n, unsigned threads) {
        std::vector<DensityCatalogEntry> entries;
        for (const auto& d : densities) entries.push_back(find_density(d));
        std::vector<RatioCell> cells;
        {
            py::gil_scoped_release release;
            cells = ratio_table(entries, sigma_eps2, n, resolve_threads(threads));
        }
        py::list out;
        for (const auto& c : cells) out.append(cell_dict(c));
        return out;
    }, py::arg("densities"), py::arg("sigma_eps2"), py::arg("n"), py::arg("threads") = 0);

    m.def("diagonal_qp", [](const py::object& density, const py::object& error, std::size_t n) {
        const auto r = diagonal_qp(to_model(density, error), n);
        py::dict out;
        out["constrained"] = r.constrained;
        out["unconstrained"] = r.unconstrained;
        out["objective"] = r.objective;
        out["b"] = r.form.b;
        out["v"] = r.form.v;
        return out;
    }, py::arg("density"), py::arg("error"), py::arg("n"),
       "Asymptotically optimal squared diagonal bandwidths.");
}
