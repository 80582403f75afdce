#include "berkson/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "berkson/error.hpp"

namespace berkson {

namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_field(const std::string& text, std::size_t line) {
    const std::string s = trim(text);
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
        fail(ErrorKind::Parse, "line " + std::to_string(line) + ": '" + s + "' is not a number");
    }
    if (!std::isfinite(value)) {
        fail(ErrorKind::Parse, "line " + std::to_string(line) + ": non-finite value");
    }
    return value;
}

}  // namespace

CsvTable parse_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (t.header.empty()) {
            for (const auto& f : fields) t.header.push_back(trim(f));
            continue;
        }
        if (fields.size() != t.header.size()) {
            fail(ErrorKind::Parse, "line " + std::to_string(line_no) + ": expected " +
                                       std::to_string(t.header.size()) + " fields, found " +
                                       std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_field(f, line_no));
        rows.push_back(std::move(row));
    }
    if (t.header.empty()) fail(ErrorKind::Parse, "missing header line");
    t.data.resize(static_cast<Eigen::Index>(rows.size()),
                  static_cast<Eigen::Index>(t.header.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            t.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return t;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open '" + path + "'");
    return parse_csv(in);
}

SampleMatrix read_sample_csv(const std::string& path) {
    CsvTable t = read_csv(path);
    if (t.data.rows() == 0) fail(ErrorKind::EmptySample, "'" + path + "' has no data rows");
    return SampleMatrix(std::move(t.data));
}

std::string format_double(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

void write_table_csv(std::ostream& out, const std::vector<RatioCell>& cells) {
    out << "density,sigma_eps2,n,h_y,h_x,mise_hy,mise_hx,mise_zero,ratio_zero,ratio_hx,"
           "ratio_zero_2dp,ratio_hx_2dp\n";
    char rounded[64];
    for (const auto& c : cells) {
        std::snprintf(rounded, sizeof rounded, "%.2f,%.2f", round_half_away(c.ratio_zero, 2),
                      round_half_away(c.ratio_hx, 2));
        out << c.density << ',' << format_double(c.sigma_eps2) << ',' << c.n << ','
            << format_double(c.h_y) << ',' << format_double(c.h_x) << ','
            << format_double(c.mise_hy) << ',' << format_double(c.mise_hx) << ','
            << format_double(c.mise_zero) << ',' << format_double(c.ratio_zero) << ','
            << format_double(c.ratio_hx) << ',' << rounded << '\n';
    }
}

void write_curve_csv(std::ostream& out, const Vector& grid, const Vector& value,
                     const Vector& lower, const Vector& upper, const Vector& truth) {
    const bool bands = lower.size() > 0 && upper.size() > 0;
    const bool has_truth = truth.size() > 0;
    out << "y,value";
    if (bands) out << ",lower,upper";
    if (has_truth) out << ",truth";
    out << '\n';
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
        out << format_double(grid(i)) << ',' << format_double(value(i));
        if (bands) out << ',' << format_double(lower(i)) << ',' << format_double(upper(i));
        if (has_truth) out << ',' << format_double(truth(i));
        out << '\n';
    }
}

void write_ratio_curve_csv(std::ostream& out, const std::vector<RatioCurve>& curves) {
    out << "sigma_eps2,n,h_y,h_star,ratio\n";
    for (const auto& c : curves) {
        for (const auto& p : c.points) {
            out << format_double(c.sigma_eps2) << ',' << p.n << ',' << format_double(p.h_y) << ','
                << format_double(p.h_star) << ',' << format_double(p.ratio) << '\n';
        }
    }
}

void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(ErrorKind::Config, "cannot write '" + path + "'");
    out << contents;
    if (!out) fail(ErrorKind::Config, "write to '" + path + "' failed");
}

}  // namespace berkson
