#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "berkson/experiments.hpp"

namespace berkson {

/// Settings shared by the subcommands. Flags override fields read from a
/// JSON config file.
struct RunConfig {
    std::vector<DensityCatalogEntry> densities;
    std::vector<double> error_variances;
    std::vector<std::size_t> sample_sizes;
    std::uint64_t seed = 1;
    double q_lo = 0.1;
    double q_hi = 0.9;
    std::size_t replicates = 100;
    std::optional<unsigned> threads;  ///< unset or 0 means all cores
};

/// Parses a config document. Densities may be catalog names or inline
/// mixtures {"name", "components": [{"weight", "mean", "covariance"}]}.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

/// Thread count from the flag, then BERKSON_THREADS, then the config.
unsigned effective_threads(std::optional<unsigned> flag, const RunConfig& config);

/// Entry point. Returns 0 on success, 1 on configuration or usage errors and
/// 2 on numerical failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace berkson
