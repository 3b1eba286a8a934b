#include "haartrend/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "haartrend/sim_bench.hpp"
#include "haartrend/sparse_oracle.hpp"

namespace haartrend {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string_view unquote(std::string_view s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

// Whole-field parse; nullopt if the text is not a number at all.
std::optional<double> parse_real(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    Int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return in;
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const std::string& expected) {
    throw ConfigError("invalid value '" + value + "' for " + key + " (expected " + expected + ")");
}

double real_in(const std::string& key, const std::string& value, bool (*ok)(double), const std::string& expected) {
    const auto v = parse_real(trim(value));
    if (!v || !std::isfinite(*v) || !ok(*v)) bad_value(key, value, expected);
    return *v;
}

Index int_at_least(const std::string& key, const std::string& value, Index lo) {
    const auto v = parse_int<long long>(trim(value));
    if (!v || *v < lo) bad_value(key, value, "an integer >= " + std::to_string(lo));
    return static_cast<Index>(*v);
}

std::string one_of(const std::string& key, const std::string& value, std::initializer_list<const char*> allowed) {
    std::string expected;
    for (const char* a : allowed) {
        if (value == a) return value;
        expected += (expected.empty() ? "" : "|") + std::string(a);
    }
    bad_value(key, value, expected);
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
    if (value == "false" || value == "0" || value == "no" || value == "off") return false;
    bad_value(key, value, "true|false");
}

const std::set<std::string>& known_estimators() {
    static const std::set<std::string> ids{"wavelet_soft",         "wavelet_hard",         "nw_rectangular",
                                           "nw_epanechnikov",      "nw_rectangular_scott", "nw_epanechnikov_scott",
                                           "identity"};
    return ids;
}

}  // namespace

SeriesFile parse_series(std::istream& in) {
    SeriesFile s;
    std::vector<double> values;
    std::set<std::string> seen;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    bool numeric_labels = true;
    double last_numeric = 0.0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto fields = split(body, ',');
        if (fields.size() != 2) {
            throw ParseError("expected 2 columns, found " + std::to_string(fields.size()), line_no);
        }
        const auto label = std::string(unquote(fields[0]));
        const auto value = parse_real(unquote(fields[1]));
        if (first) {
            first = false;
            if (!value) continue;  // header
        }
        if (!value) throw ParseError("value '" + std::string(fields[1]) + "' is not a number", line_no);
        if (!std::isfinite(*value)) throw ParseError("value '" + std::string(fields[1]) + "' is not finite", line_no);
        if (label.empty()) throw ParseError("empty label", line_no);
        if (!seen.insert(label).second) {
            throw DataError("duplicate label '" + label + "' at line " + std::to_string(line_no));
        }
        const auto as_number = parse_real(label);
        if (numeric_labels && as_number) {
            if (!s.labels.empty() && !(*as_number > last_numeric)) {
                throw DataError("labels must be increasing: '" + label + "' at line " + std::to_string(line_no));
            }
            last_numeric = *as_number;
        } else {
            numeric_labels = false;
        }
        s.labels.push_back(label);
        values.push_back(*value);
    }
    if (values.size() < 2) {
        throw DataError("series needs at least 2 observations, found " + std::to_string(values.size()));
    }
    s.values = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Index>(values.size()));
    return s;
}

SeriesFile load_series(const std::string& path) {
    auto in = open_input(path);
    return parse_series(in);
}

void write_series(const SeriesFile& series, const std::string& path) {
    Table t{{"label", "value"}, {}};
    for (Index i = 0; i < series.size(); ++i) t.add_row({series.labels[static_cast<std::size_t>(i)], series.values(i)});
    write_report(t, path, ReportFormat::csv);
}

std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

ReportFormat report_format_from_name(std::string_view name) {
    if (name == "csv") return ReportFormat::csv;
    if (name == "json") return ReportFormat::json;
    throw ConfigError("unknown report format '" + std::string(name) + "' (expected csv or json)");
}

std::string_view to_string(ReportFormat f) { return f == ReportFormat::csv ? "csv" : "json"; }

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) {
        throw InputError("row has " + std::to_string(row.size()) + " cells, table has " +
                         std::to_string(columns.size()) + " columns");
    }
    rows.push_back(std::move(row));
}

nlohmann::ordered_json to_json(const Table& table) {
    nlohmann::ordered_json doc;
    doc["columns"] = table.columns;
    doc["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t c = 0; c < row.size(); ++c) {
            std::visit([&](const auto& v) { obj[table.columns[c]] = v; }, row[c]);
        }
        doc["rows"].push_back(std::move(obj));
    }
    return doc;
}

std::string render(const Table& table, ReportFormat format) {
    if (format == ReportFormat::json) return to_json(table).dump(2) + "\n";
    std::string out;
    for (std::size_t c = 0; c < table.columns.size(); ++c) out += (c ? "," : "") + csv_field(table.columns[c]);
    out += '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            if (const auto* i = std::get_if<std::int64_t>(&row[c])) out += std::to_string(*i);
            else if (const auto* d = std::get_if<double>(&row[c])) out += format_real(*d);
            else out += csv_field(std::get<std::string>(row[c]));
        }
        out += '\n';
    }
    return out;
}

void write_text(const std::string& text, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("write to '" + path + "' failed");
}

void write_report(const Table& table, const std::string& path, ReportFormat format) {
    write_text(render(table, format), path);
}

void write_json(const nlohmann::ordered_json& doc, const std::string& path) { write_text(doc.dump(2) + "\n", path); }

std::string render_coefficients(const CoefficientSet<double>& coeffs) {
    if (!coeffs.index) throw StructuralError("coefficient set has no index");
    std::string out = "j,k,beta\n-1,0," + format_real(coeffs.alpha0) + "\n";
    const IndexSet& idx = *coeffs.index;
    for (Index p = 0; p < idx.size(); ++p) {
        out += std::to_string(idx[p].j) + "," + std::to_string(idx[p].k) + "," + format_real(coeffs.betas(p)) + "\n";
    }
    return out;
}

void write_coefficients(const CoefficientSet<double>& coeffs, const std::string& path) {
    write_text(render_coefficients(coeffs), path);
}

CoefficientSet<double> parse_coefficients(std::istream& in) {
    std::vector<std::tuple<int, Index, double>> rows;
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) continue;
        const auto f = split(body, ',');
        if (f.size() != 3) throw ParseError("expected 3 columns (j,k,beta)", line_no);
        const auto j = parse_int<int>(f[0]);
        const auto k = parse_int<long long>(f[1]);
        const auto b = parse_real(f[2]);
        if (first) {
            first = false;
            if (!j && !k && !b) continue;  // header
        }
        if (!j || !k || !b) throw ParseError("malformed coefficient row", line_no);
        if (!std::isfinite(*b)) throw ParseError("coefficient is not finite", line_no);
        rows.emplace_back(*j, static_cast<Index>(*k), *b);
    }
    const auto n = static_cast<Index>(rows.size());
    if (n < 2) throw StructuralError("coefficient dump needs the scaling row and at least one wavelet row");
    const auto [j0, k0, alpha0] = rows.front();
    if (j0 != -1 || k0 != 0) throw StructuralError("first coefficient row must be the scaling term -1,0");
    rows.erase(rows.begin());
    for (const auto& r : rows) {
        if (std::get<0>(r) < 0) throw StructuralError("scaling term appears more than once");
    }
    return CoefficientSet<double>::from_entries(n, alpha0, rows);
}

CoefficientSet<double> read_coefficients(const std::string& path) {
    auto in = open_input(path);
    return parse_coefficients(in);
}

KeyValues parse_config(std::istream& in) {
    KeyValues kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view body = line;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        }
        const auto key = trim(body.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        kv[std::string(key)] = std::string(trim(body.substr(eq + 1)));
    }
    return kv;
}

KeyValues load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    return parse_config(in);
}

const std::vector<std::string>& RunConfig::keys() {
    static const std::vector<std::string> k{
        "seed",   "input",      "output",  "format",      "rule",       "K",         "period",   "sidecar",
        "coeffs-out", "gamma",  "scenario", "truth",      "n",          "reps",      "ar",       "sigma2",
        "estimators", "grid-search", "bandwidth", "K-grid", "b-grid",  "out-dir",   "epsilon",  "q",
        "N",      "estimator",  "noise"};
    return k;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
    const std::string value(trim(raw));
    auto positive = [](double v) { return v > 0.0; };
    if (key == "seed") {
        const auto v = parse_int<std::uint64_t>(value);
        if (!v) bad_value(key, value, "a non-negative integer");
        seed = *v;
    } else if (key == "input") {
        input = value;
    } else if (key == "output") {
        output = value;
    } else if (key == "format") {
        format = one_of(key, value, {"csv", "json"});
    } else if (key == "rule") {
        rule = one_of(key, value, {"soft", "hard"});
    } else if (key == "K") {
        K = real_in(key, value, +positive, "a positive number");
    } else if (key == "period") {
        period = int_at_least(key, value, 0);
    } else if (key == "sidecar") {
        sidecar = value;
    } else if (key == "coeffs-out") {
        coeffs_out = value;
    } else if (key == "gamma") {
        gamma = real_in(key, value, +positive, "a positive number");
    } else if (key == "scenario") {
        scenario = one_of(key, value, {"f", "g", "file"});
    } else if (key == "truth") {
        truth = value;
    } else if (key == "n") {
        n = int_at_least(key, value, 2);
    } else if (key == "reps") {
        reps = int_at_least(key, value, 2);
    } else if (key == "ar") {
        ar = real_in(key, value, [](double v) { return std::abs(v) < 1.0; }, "a number in (-1, 1)");
    } else if (key == "sigma2") {
        sigma2 = real_in(key, value, [](double v) { return v >= 0.0; }, "a non-negative number");
    } else if (key == "estimators") {
        std::vector<std::string> ids;
        for (const auto id : split(value, ',')) {
            if (!known_estimators().count(std::string(id))) {
                bad_value(key, value, "a comma-separated list of wavelet_soft, wavelet_hard, nw_rectangular, "
                                      "nw_epanechnikov, nw_rectangular_scott, nw_epanechnikov_scott, identity");
            }
            ids.emplace_back(id);
        }
        estimators = std::move(ids);
    } else if (key == "grid-search") {
        grid_search = parse_bool(key, value);
    } else if (key == "bandwidth") {
        bandwidth = real_in(key, value, [](double v) { return v >= 0.0; }, "a non-negative number");
    } else if (key == "K-grid") {
        K_grid = parse_grid(value);
    } else if (key == "b-grid") {
        b_grid = parse_grid(value);
    } else if (key == "out-dir") {
        out_dir = value;
    } else if (key == "epsilon") {
        epsilon = real_in(key, value, +positive, "a positive number");
    } else if (key == "q") {
        q = real_in(key, value, [](double v) { return v > 0.0 && v < 1.0; }, "a number in (0, 1)");
    } else if (key == "N") {
        N = int_at_least(key, value, 1);
    } else if (key == "estimator") {
        estimator = one_of(key, value, {"bayes", "soft", "hard", "half"});
    } else if (key == "noise") {
        noise = std::string(to_string(noise_family_from_name(value)));
    } else {
        throw ConfigError("unknown configuration key '" + key + "'");
    }
}

RunConfig RunConfig::defaults(const std::string& subcommand) {
    RunConfig c;
    c.subcommand = subcommand;
    c.K_grid = log_grid(0.005, 1.0, 40);
    c.b_grid = log_grid(0.003, 0.3, 40);
    if (subcommand == "oracle") {
        c.K = 1.0;
        c.reps = 50;
    } else if (subcommand == "diagnose") {
        c.period = 0;
        c.reps = 2000;
    }
    return c;
}

RunConfig resolve_config(const std::string& subcommand, const KeyValues& file, const KeyValues& cli) {
    RunConfig c = RunConfig::defaults(subcommand);
    for (const auto& [k, v] : file) c.set(k, v);
    for (const auto& [k, v] : cli) c.set(k, v);
    return c;
}

std::vector<double> parse_grid(std::string_view text) {
    text = trim(text);
    const auto colon = split(text, ':');
    if (colon.size() == 3) {
        const auto lo = parse_real(colon[0]);
        const auto hi = parse_real(colon[1]);
        const auto count = parse_int<long long>(colon[2]);
        if (!lo || !hi || !count || *count < 1) throw ConfigError("malformed grid '" + std::string(text) + "'");
        return log_grid(*lo, *hi, static_cast<std::size_t>(*count));
    }
    std::vector<double> out;
    for (const auto item : split(text, ',')) {
        const auto v = parse_real(item);
        if (!v || !std::isfinite(*v) || *v <= 0.0) throw ConfigError("malformed grid '" + std::string(text) + "'");
        out.push_back(*v);
    }
    return out;
}

}  // namespace haartrend
