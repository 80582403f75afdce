#pragma once

#include <cstdint>
#include <vector>

#include "berkson/estimator.hpp"

namespace berkson {

enum class BandRule { HY, HX, Zero, Value };

struct BandOptions {
    BandRule rule = BandRule::HY;
    double value = 0.0;  ///< bandwidth used by BandRule::Value
    double q_lo = 0.1;
    double q_hi = 0.9;
    std::uint64_t seed = 0;
    unsigned threads = 1;
    Eigen::Index grid_points = 512;
    std::size_t keep_curves = 0;  ///< number of replicate curves to retain
};

struct BandResult {
    Vector grid;
    Vector lower;
    Vector upper;
    Vector median;
    Vector truth;  ///< f_Y on the grid
    double bandwidth = 0.0;
    std::vector<Vector> replicate_curves;
};

/// Pointwise quantile bands of the f_Y estimate over `replicates` samples of
/// size n. The bandwidth is fixed once from the model. Replicate r draws from
/// stream r of `seed`, so the result does not depend on the thread count.
BandResult quantile_bands(const BerksonModel& model, std::size_t n, std::size_t replicates,
                          const BandOptions& options);

/// Bandwidth a rule selects for the model (h_Y, h_X, 0 or the fixed value).
double rule_bandwidth(const BerksonModel& model, std::size_t n, BandRule rule, double value);

struct IseEstimate {
    double mean = 0.0;
    double standard_error = 0.0;
};

/// Fine integration grid for the ISE: f_Y components out to 10 sd, 2001 points.
Vector ise_grid(const BerksonModel& model, double h);

/// Mean and standard error of the ISE over `replicates` samples (p = 1).
IseEstimate monte_carlo_ise(const BerksonModel& model, std::size_t n, std::size_t replicates,
                            double h, std::uint64_t seed, unsigned threads = 1);

}  // namespace berkson
