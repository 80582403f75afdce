#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

namespace berkson {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

struct AcceptanceOptions {
    unsigned threads = 1;
    std::set<int> only;  ///< empty runs every criterion
};

/// Runs the acceptance criteria in order and prints one PASS/FAIL line per
/// criterion to `out` as each finishes.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options, std::ostream& out);

}  // namespace berkson
