#pragma once

#include <string>
#include <vector>

#include "berkson/estimator.hpp"

namespace berkson {

struct DensityCatalogEntry {
    std::string key;   ///< command-line name, e.g. "bimodal1"
    std::string name;  ///< display name, e.g. "Bimodal 1"
    GaussianMixture mixture;
};

/// Normal, Bimodal 1, Bimodal 2 and Trimodal.
std::vector<DensityCatalogEntry> catalog_1d();

/// Multi Normal, Multi 2-Comp 1, Multi 2-Comp 2 and Multi 3-Comp.
std::vector<DensityCatalogEntry> catalog_3d();

/// The 3 x 3 covariance with +-0.64 on the first off-diagonals.
Matrix banded_covariance(double sign);

/// Looks up a key or display name (case-insensitive) in both catalogs.
const DensityCatalogEntry& find_density(const std::string& name);

struct RatioCell {
    std::string density;
    double sigma_eps2 = 0.0;
    std::size_t n = 0;
    double h_y = 0.0;
    double h_x = 0.0;
    double mise_hy = 0.0;
    double mise_hx = 0.0;
    double mise_zero = 0.0;
    double ratio_zero = 0.0;  ///< MISE(0) / MISE(h_Y)
    double ratio_hx = 0.0;    ///< MISE(h_X) / MISE(h_Y)
};

/// One cell: exact h_Y and h_X for error sigma_eps2 I, then the three MISEs.
RatioCell ratio_cell(const DensityCatalogEntry& density, double sigma_eps2, std::size_t n);

/// Cells in (density, sigma_eps2) order; computed on up to `threads` workers.
std::vector<RatioCell> ratio_table(const std::vector<DensityCatalogEntry>& densities,
                                   const std::vector<double>& sigma_eps2, std::size_t n,
                                   unsigned threads = 1);

struct RatioCurvePoint {
    std::size_t n = 0;
    double h_y = 0.0;
    double h_star = 0.0;
    double ratio = 0.0;  ///< h_Y / h*_Y
};

struct RatioCurve {
    double sigma_eps2 = 0.0;
    std::vector<RatioCurvePoint> points;
};

/// `count` log-spaced sample sizes from lo to hi, rounded and deduplicated.
std::vector<std::size_t> log_spaced_sizes(std::size_t lo, std::size_t hi, std::size_t count);

/// h_Y / h*_Y over the sample sizes for each error variance (p = 1).
std::vector<RatioCurve> ratio_curve(const DensityCatalogEntry& density,
                                    const std::vector<double>& sigma_eps2,
                                    const std::vector<std::size_t>& sizes, unsigned threads = 1);

/// X = 1.22 + 0.3 ln W_k + 0.33 ln W_b for each (W_k, W_b) row.
Vector no2_exposure(const Matrix& records);

struct No2Result {
    Vector x;
    double h_x = 0.0;  ///< Silverman bandwidth from the X sample
    double h_y = 0.0;  ///< Gaussian rule-of-thumb h_Y
    DensityCurve zero;
    DensityCurve hx;
    DensityCurve hy;
};

/// Three f_Y estimates of the exposure: no smoothing, Silverman h_X, and
/// rule-of-thumb h_Y, all on one grid.
No2Result no2_pipeline(const Matrix& records, double sigma_eps2, Eigen::Index grid_points = 512);

/// Round half away from zero to `digits` decimals.
double round_half_away(double value, int digits);

}  // namespace berkson
