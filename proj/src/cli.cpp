#include "berkson/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "berkson/acceptance.hpp"
#include "berkson/bandwidth.hpp"
#include "berkson/error.hpp"
#include "berkson/io.hpp"
#include "berkson/montecarlo.hpp"
#include "berkson/parallel.hpp"

namespace berkson {

namespace {

using nlohmann::json;

const std::vector<double> kDefaultSigmas = {2.0, 1.0, 0.5, 0.25, 0.125};

Vector json_vector(const json& j) {
    if (j.is_number()) return Vector::Constant(1, j.get<double>());
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix json_matrix(const json& j, Eigen::Index p) {
    if (j.is_number()) return Matrix::Constant(1, 1, j.get<double>());
    const auto rows = j.get<std::vector<std::vector<double>>>();
    Matrix m(p, p);
    if (static_cast<Eigen::Index>(rows.size()) != p) {
        fail(ErrorKind::Config, "covariance must be " + std::to_string(p) + " x " + std::to_string(p));
    }
    for (Eigen::Index i = 0; i < p; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(row.size()) != p) {
            fail(ErrorKind::Config, "covariance rows must have length " + std::to_string(p));
        }
        for (Eigen::Index k = 0; k < p; ++k) m(i, k) = row[static_cast<std::size_t>(k)];
    }
    return m;
}

DensityCatalogEntry parse_density(const json& j) {
    if (j.is_string()) return find_density(j.get<std::string>());
    if (!j.is_object() || !j.contains("components")) {
        fail(ErrorKind::Config, "density must be a catalog name or an object with components");
    }
    std::vector<GaussianComponent> comps;
    for (const auto& c : j.at("components")) {
        Vector mean = json_vector(c.at("mean"));
        Matrix cov = json_matrix(c.at("covariance"), mean.size());
        comps.push_back({c.value("weight", 1.0), std::move(mean), std::move(cov)});
    }
    const std::string name = j.value("name", std::string("custom"));
    return {name, name, GaussianMixture(std::move(comps))};
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_file(path, text);
    }
}

std::optional<unsigned> env_threads() {
    const char* env = std::getenv("BERKSON_THREADS");
    if (!env || !*env) return std::nullopt;
    try {
        std::size_t used = 0;
        const long v = std::stol(env, &used);
        if (used != std::char_traits<char>::length(env) || v < 0) throw std::invalid_argument(env);
        return static_cast<unsigned>(v);
    } catch (const std::exception&) {
        fail(ErrorKind::Config, std::string("BERKSON_THREADS must be a nonnegative integer, got '") +
                                    env + "'");
    }
}

std::vector<DensityCatalogEntry> resolve_densities(const std::vector<std::string>& names) {
    std::vector<DensityCatalogEntry> out;
    for (const auto& n : names) out.push_back(find_density(n));
    return out;
}

BandRule parse_band_rule(const std::string& s) {
    if (s == "hy") return BandRule::HY;
    if (s == "hx") return BandRule::HX;
    if (s == "zero") return BandRule::Zero;
    if (s == "value") return BandRule::Value;
    fail(ErrorKind::Config, "unknown rule '" + s + "'");
}

void require_positive(const std::vector<double>& v, const char* what) {
    for (double x : v) {
        if (!(x > 0.0)) fail(ErrorKind::Config, std::string(what) + " must be positive");
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    RunConfig c;
    try {
        const json j = json::parse(json_text);
        if (!j.is_object()) fail(ErrorKind::Config, "config must be a JSON object");
        if (j.contains("densities")) {
            for (const auto& d : j.at("densities")) c.densities.push_back(parse_density(d));
        }
        if (j.contains("error_variances")) {
            c.error_variances = j.at("error_variances").get<std::vector<double>>();
            require_positive(c.error_variances, "error variances");
        }
        if (j.contains("sample_sizes")) {
            c.sample_sizes = j.at("sample_sizes").get<std::vector<std::size_t>>();
        }
        c.seed = j.value("seed", c.seed);
        if (j.contains("quantiles")) {
            const auto q = j.at("quantiles").get<std::vector<double>>();
            if (q.size() != 2) fail(ErrorKind::Config, "quantiles must be [lo, hi]");
            c.q_lo = q[0];
            c.q_hi = q[1];
        }
        c.replicates = j.value("replicates", c.replicates);
        if (c.replicates < 1) fail(ErrorKind::Config, "replicates must be >= 1");
        if (j.contains("threads")) {
            const auto& t = j.at("threads");
            if (t.is_string() && t.get<std::string>() == "auto") {
                c.threads = 0u;
            } else {
                c.threads = t.get<unsigned>();
            }
        }
    } catch (const json::exception& e) {
        fail(ErrorKind::Config, std::string("invalid config: ") + e.what());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Config) throw;
        fail(ErrorKind::Config, std::string("invalid config: ") + e.what());
    }
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

unsigned effective_threads(std::optional<unsigned> flag, const RunConfig& config) {
    if (flag) return resolve_threads(*flag);
    if (const auto env = env_threads()) return resolve_threads(*env);
    return resolve_threads(config.threads.value_or(0));
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Kernel density estimation under Berkson error"};
    app.require_subcommand(1);

    std::string config_path;
    unsigned threads_flag = 0;
    app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    auto* threads_opt = app.add_option("--threads", threads_flag, "Worker threads (0 = all cores)");

    // tables
    auto* tables = app.add_subcommand("tables", "MISE ratio tables");
    std::vector<std::string> t_densities;
    std::vector<double> t_sigmas;
    std::vector<std::size_t> t_sizes;
    int t_dim = 1;
    std::string t_out;
    auto* t_dens_opt = tables->add_option("--densities", t_densities, "Density names");
    auto* t_sig_opt = tables->add_option("--sigma-eps2", t_sigmas, "Error variances");
    auto* t_n_opt = tables->add_option("--n", t_sizes, "Sample sizes");
    tables->add_option("--dim", t_dim, "Catalog used when no densities are given")
        ->check(CLI::IsMember({1, 3}));
    tables->add_option("--out", t_out, "Output CSV (stdout if omitted)");

    // bandwidth
    auto* bandwidth = app.add_subcommand("bandwidth", "Bandwidth for one configuration");
    std::string b_density = "normal";
    double b_sigma = 1.0;
    std::size_t b_n = 50;
    std::string b_target = "y";
    std::string b_out;
    bandwidth->add_option("--density", b_density, "Density name");
    bandwidth->add_option("--sigma-eps2", b_sigma, "Error variance")->check(CLI::PositiveNumber);
    bandwidth->add_option("--n", b_n, "Sample size")->check(CLI::PositiveNumber);
    bandwidth->add_option("--target", b_target, "y, x, asymptotic or rot")
        ->check(CLI::IsMember({"y", "x", "asymptotic", "rot"}));
    bandwidth->add_option("--out", b_out, "Output CSV (stdout if omitted)");

    // ratio-curve
    auto* curve = app.add_subcommand("ratio-curve", "h_Y / h*_Y against n");
    std::string c_density = "normal";
    std::vector<double> c_sigmas;
    std::size_t c_lo = 10, c_hi = 100000, c_count = 25;
    std::string c_out;
    curve->add_option("--density", c_density, "Density name");
    auto* c_sig_opt = curve->add_option("--sigma-eps2", c_sigmas, "Error variances");
    curve->add_option("--n-min", c_lo, "Smallest n")->check(CLI::PositiveNumber);
    curve->add_option("--n-max", c_hi, "Largest n")->check(CLI::PositiveNumber);
    curve->add_option("--count", c_count, "Number of log-spaced sizes")->check(CLI::Range(2, 1000));
    curve->add_option("--out", c_out, "Output CSV (stdout if omitted)");

    // bands
    auto* bands = app.add_subcommand("bands", "Pointwise quantile bands of replicate estimates");
    std::string q_density = "normal";
    double q_sigma = 2.0;
    std::size_t q_n = 50;
    std::size_t q_reps = 100;
    std::string q_rule = "hy";
    double q_h = 0.0;
    std::vector<double> q_quant;
    std::uint64_t q_seed = 1;
    Eigen::Index q_points = 512;
    std::string q_out;
    bands->add_option("--density", q_density, "Density name");
    bands->add_option("--sigma-eps2", q_sigma, "Error variance")->check(CLI::PositiveNumber);
    bands->add_option("--n", q_n, "Sample size")->check(CLI::PositiveNumber);
    auto* q_reps_opt = bands->add_option("--replicates", q_reps, "Replicates");
    bands->add_option("--rule", q_rule, "hy, hx, zero or value")
        ->check(CLI::IsMember({"hy", "hx", "zero", "value"}));
    bands->add_option("--value", q_h, "Bandwidth for --rule value")->check(CLI::NonNegativeNumber);
    auto* q_quant_opt = bands->add_option("--quantiles", q_quant, "Lower and upper quantile")
                            ->expected(2);
    auto* q_seed_opt = bands->add_option("--seed", q_seed, "Random seed");
    bands->add_option("--grid-points", q_points, "Grid size")->check(CLI::Range(2, 1 << 20));
    bands->add_option("--out", q_out, "Output CSV (stdout if omitted)");

    // estimate
    auto* estimate = app.add_subcommand("estimate", "Estimate f_Y from a sample file");
    std::string e_sample;
    double e_sigma = 1.0;
    std::string e_rule = "hy-rot";
    double e_h = 0.0;
    Eigen::Index e_points = 512;
    std::string e_out;
    estimate->add_option("--sample", e_sample, "Sample CSV")->required()->check(CLI::ExistingFile);
    estimate->add_option("--sigma-eps2", e_sigma, "Error variance")->check(CLI::PositiveNumber);
    estimate->add_option("--rule", e_rule, "hy-rot, hx-silverman, zero or value")
        ->check(CLI::IsMember({"hy-rot", "hx-silverman", "zero", "value"}));
    estimate->add_option("--value", e_h, "Bandwidth for --rule value")->check(CLI::NonNegativeNumber);
    estimate->add_option("--grid-points", e_points, "Grid size")->check(CLI::Range(2, 1 << 20));
    estimate->add_option("--out", e_out, "Output CSV (stdout if omitted)");

    // no2
    auto* no2 = app.add_subcommand("no2", "Exposure density from (wk, wb) records");
    std::string n_records;
    double n_sigma = 0.06;
    std::string n_prefix = "no2";
    Eigen::Index n_points = 512;
    no2->add_option("--records", n_records, "CSV with columns wk,wb")
        ->required()
        ->check(CLI::ExistingFile);
    no2->add_option("--sigma-eps2", n_sigma, "Error variance")->check(CLI::PositiveNumber);
    no2->add_option("--prefix", n_prefix, "Output prefix for _zero/_hx/_hy CSVs");
    no2->add_option("--grid-points", n_points, "Grid size")->check(CLI::Range(2, 1 << 20));

    // selftest
    auto* selftest = app.add_subcommand("selftest", "Run the acceptance checks");
    std::vector<int> s_only;
    selftest->add_option("--only", s_only, "Criterion numbers to run");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig config;
        if (!config_path.empty()) config = load_config(config_path);
        const unsigned threads = effective_threads(
            threads_opt->count() ? std::optional<unsigned>(threads_flag) : std::nullopt, config);

        if (*tables) {
            auto densities = t_dens_opt->count() ? resolve_densities(t_densities) : config.densities;
            if (densities.empty()) densities = t_dim == 3 ? catalog_3d() : catalog_1d();
            auto sigmas = t_sig_opt->count() ? t_sigmas : config.error_variances;
            if (sigmas.empty()) sigmas = kDefaultSigmas;
            require_positive(sigmas, "error variances");
            auto sizes = t_n_opt->count() ? t_sizes : config.sample_sizes;
            if (sizes.empty()) sizes = {50};
            std::vector<RatioCell> cells;
            for (std::size_t n : sizes) {
                if (n == 0) fail(ErrorKind::Config, "sample sizes must be positive");
                auto part = ratio_table(densities, sigmas, n, threads);
                cells.insert(cells.end(), part.begin(), part.end());
            }
            std::ostringstream csv;
            write_table_csv(csv, cells);
            write_output(t_out, csv.str(), out);
        } else if (*bandwidth) {
            const auto& d = find_density(b_density);
            const Eigen::Index p = d.mixture.dim();
            const BerksonModel model(d.mixture, b_sigma * Matrix::Identity(p, p));
            double h = 0.0;
            double objective = 0.0;
            if (b_target == "y" || b_target == "x") {
                const auto r = optimal_scalar_bandwidth(model, b_n, b_target == "y" ? Target::Y : Target::X);
                h = r.value;
                objective = r.objective;
            } else {
                h = b_target == "asymptotic"
                        ? asymptotic_bandwidth(model, b_n)
                        : rule_of_thumb_hy_gaussian(d.mixture.covariance()(0, 0), b_sigma, b_n);
                objective = exact_mise(model, BandwidthSpec::scalar(h), b_n);
            }
            std::ostringstream csv;
            csv << "density,sigma_eps2,n,target,h,mise\n"
                << d.name << ',' << format_double(b_sigma) << ',' << b_n << ',' << b_target << ','
                << format_double(h) << ',' << format_double(objective) << '\n';
            write_output(b_out, csv.str(), out);
        } else if (*curve) {
            auto sigmas = c_sig_opt->count() ? c_sigmas : config.error_variances;
            if (sigmas.empty()) sigmas = kDefaultSigmas;
            require_positive(sigmas, "error variances");
            const auto sizes = log_spaced_sizes(c_lo, c_hi, c_count);
            std::ostringstream csv;
            write_ratio_curve_csv(csv, ratio_curve(find_density(c_density), sigmas, sizes, threads));
            write_output(c_out, csv.str(), out);
        } else if (*bands) {
            BandOptions opts;
            opts.rule = parse_band_rule(q_rule);
            opts.value = q_h;
            opts.q_lo = q_quant_opt->count() ? q_quant[0] : config.q_lo;
            opts.q_hi = q_quant_opt->count() ? q_quant[1] : config.q_hi;
            opts.seed = q_seed_opt->count() ? q_seed : config.seed;
            opts.threads = threads;
            opts.grid_points = q_points;
            const std::size_t reps = q_reps_opt->count() || config_path.empty() ? q_reps : config.replicates;
            const BerksonModel model = BerksonModel::scalar(find_density(q_density).mixture, q_sigma);
            const BandResult r = quantile_bands(model, q_n, reps, opts);
            std::ostringstream csv;
            write_curve_csv(csv, r.grid, r.median, r.lower, r.upper, r.truth);
            write_output(q_out, csv.str(), out);
        } else if (*estimate) {
            const SampleMatrix x = read_sample_csv(e_sample);
            if (x.dim() != 1) fail(ErrorKind::Config, "estimate expects a single-column sample");
            const auto n = static_cast<std::size_t>(x.size());
            double h = e_h;
            if (e_rule == "hy-rot") {
                h = rule_of_thumb_hy_gaussian(sample_variance(x), e_sigma, n);
            } else if (e_rule == "hx-silverman") {
                h = silverman_hx(std::sqrt(sample_variance(x)), sample_iqr(x), n);
            } else if (e_rule == "zero") {
                h = 0.0;
            }
            const Vector grid = default_grid(x, e_sigma, h, e_points);
            const DensityCurve c = evaluate_estimator(x, e_sigma, BandwidthSpec::scalar(h), grid, 1.0, threads);
            std::ostringstream csv;
            write_curve_csv(csv, c.grid, c.values);
            write_output(e_out, csv.str(), out);
        } else if (*no2) {
            const CsvTable t = read_csv(n_records);
            if (t.data.rows() == 0) fail(ErrorKind::EmptySample, "'" + n_records + "' has no records");
            const No2Result r = no2_pipeline(t.data, n_sigma, n_points);
            const std::pair<const char*, const DensityCurve*> parts[] = {
                {"zero", &r.zero}, {"hx", &r.hx}, {"hy", &r.hy}};
            for (const auto& [suffix, c] : parts) {
                std::ostringstream csv;
                write_curve_csv(csv, c->grid, c->values);
                write_text_file(n_prefix + "_" + suffix + ".csv", csv.str());
            }
            out << "h_x," << format_double(r.h_x) << "\nh_y," << format_double(r.h_y) << '\n';
        } else if (*selftest) {
            AcceptanceOptions opts;
            opts.threads = threads;
            opts.only.insert(s_only.begin(), s_only.end());
            const auto results = run_acceptance(opts, out);
            std::size_t passed = 0;
            for (const auto& r : results) passed += r.passed ? 1 : 0;
            out << passed << "/" << results.size() << " criteria passed\n";
            return passed == results.size() ? 0 : 2;
        }
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.is_numeric() ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace berkson
