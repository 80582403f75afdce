#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "berkson/estimator.hpp"
#include "berkson/experiments.hpp"

namespace berkson {

struct CsvTable {
    std::vector<std::string> header;
    Matrix data;
};

/// Header line plus rows of decimal floats. Ragged rows and unparsable or
/// non-finite fields raise Parse errors naming the 1-based line.
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::string& path);

/// Sample file: header x1..xp, one observation per row.
SampleMatrix read_sample_csv(const std::string& path);

/// 17 significant digits, so values round-trip exactly.
std::string format_double(double value);

void write_table_csv(std::ostream& out, const std::vector<RatioCell>& cells);

/// y,value[,lower,upper,truth]; optional columns are skipped when empty.
void write_curve_csv(std::ostream& out, const Vector& grid, const Vector& value,
                     const Vector& lower = {}, const Vector& upper = {}, const Vector& truth = {});

void write_ratio_curve_csv(std::ostream& out, const std::vector<RatioCurve>& curves);

/// Writes `contents` to `path`, raising a Config error on failure.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace berkson
