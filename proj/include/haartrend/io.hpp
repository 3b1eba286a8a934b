#pragma once

// File formats: two-column series CSV, coefficient dumps, CSV/JSON reports,
// and flat key=value run configuration.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "haartrend/errors.hpp"
#include "haartrend/grid_basis.hpp"
#include "haartrend/transform.hpp"

namespace haartrend {

/// A series in file order. Labels are opaque ordinals (dates are never parsed):
/// the row order is the time order.
struct SeriesFile {
    std::vector<std::string> labels;
    Eigen::VectorXd values;

    Index size() const noexcept { return values.size(); }
    SampleGrid grid() const { return SampleGrid(values); }
};

/// Reads `label,value` rows with an optional header. Throws ParseError (with the
/// line number) on malformed rows or non-finite values, DataError on duplicate or
/// decreasing numeric labels and on fewer than 2 rows, IoError if unreadable.
SeriesFile load_series(const std::string& path);
SeriesFile parse_series(std::istream& in);

void write_series(const SeriesFile& series, const std::string& path);

/// 17 significant digits, which reads back to the same double.
std::string format_real(double v);

enum class ReportFormat { csv, json };

ReportFormat report_format_from_name(std::string_view name);
std::string_view to_string(ReportFormat f);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row);
};

/// CSV: header plus one line per row. JSON: {"columns": [...], "rows": [{...}, ...]}
/// with keys in column order. Output is a pure function of the table.
std::string render(const Table& table, ReportFormat format);
nlohmann::ordered_json to_json(const Table& table);

void write_report(const Table& table, const std::string& path, ReportFormat format);
void write_json(const nlohmann::ordered_json& doc, const std::string& path);
void write_text(const std::string& text, const std::string& path);

/// Coefficient dump: header `j,k,beta`, the row `-1,0,alpha0`, then every
/// (j,k) in scale-major order.
std::string render_coefficients(const CoefficientSet<double>& coeffs);
void write_coefficients(const CoefficientSet<double>& coeffs, const std::string& path);

/// The sample size is the number of rows; throws StructuralError if the keys do not
/// form the index set of that size and ParseError on malformed rows.
CoefficientSet<double> parse_coefficients(std::istream& in);
CoefficientSet<double> read_coefficients(const std::string& path);

using KeyValues = std::map<std::string, std::string>;

/// Flat `key = value` lines; `#` starts a comment. Throws ConfigError on malformed lines.
KeyValues parse_config(std::istream& in);
KeyValues load_config(const std::string& path);

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "HAARTREND_CONFIG";

struct RunConfig {
    std::string subcommand;
    std::uint64_t seed = 20240801;

    // denoise / fit-plm / diagnose
    std::string input;
    std::string output;  // empty: standard output
    std::string format = "csv";
    std::string rule = "soft";
    double K = 0.1;
    Index period = 12;  // 0 in diagnose: no parametric part
    std::string sidecar;
    std::string coeffs_out;
    double gamma = 4.0;

    // simulate
    std::string scenario = "f";
    std::string truth;  // series file when scenario = file
    Index n = 1000;
    Index reps = 200;
    double ar = 0.7;
    double sigma2 = 0.01;
    std::vector<std::string> estimators{"wavelet_soft", "nw_rectangular", "nw_epanechnikov",
                                        "nw_rectangular_scott", "nw_epanechnikov_scott"};
    bool grid_search = false;
    double bandwidth = 0.0;  // 0: rule-of-thumb bandwidth when not grid searching
    std::vector<double> K_grid;
    std::vector<double> b_grid;
    std::string out_dir = ".";

    // oracle
    double epsilon = 1.0;
    double q = 0.125;
    Index N = 100000;
    std::string estimator = "bayes";
    std::string noise = "three_point";

    /// Parses and range-checks one value; throws ConfigError on unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    /// Built-in defaults of a subcommand.
    static RunConfig defaults(const std::string& subcommand);
    static const std::vector<std::string>& keys();
};

/// Built-in defaults, overridden by the config file, overridden by command-line values.
RunConfig resolve_config(const std::string& subcommand, const KeyValues& file, const KeyValues& cli);

/// `lo:hi:count` for a log-spaced grid, or a comma-separated list.
std::vector<double> parse_grid(std::string_view text);

}  // namespace haartrend
