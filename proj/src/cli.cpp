#include "haartrend/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "haartrend/io.hpp"
#include "haartrend/partial_linear.hpp"
#include "haartrend/shrinkage.hpp"
#include "haartrend/sim_bench.hpp"
#include "haartrend/sparse_oracle.hpp"
#include "haartrend/transform.hpp"

namespace haartrend {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

struct Subcommand {
    CLI::App* app = nullptr;
    std::map<std::string, std::string> values;
    std::map<std::string, CLI::Option*> options;
    std::string config_path;
    bool grid_search = false;
    CLI::Option* grid_flag = nullptr;

    void add(const std::string& key, const std::string& help) {
        options[key] = app->add_option("--" + key, values[key], help);
    }

    KeyValues given() const {
        KeyValues kv;
        for (const auto& [key, opt] : options) {
            if (opt->count() > 0) kv[key] = values.at(key);
        }
        if (grid_flag != nullptr && grid_flag->count() > 0) kv["grid-search"] = grid_search ? "true" : "false";
        return kv;
    }
};

const char* const kSeedHelp = "master seed for every random draw";
const char* const kConfigHelp = "flat key=value config file (default: $HAARTREND_CONFIG)";

void add_common(Subcommand& s) {
    s.add("seed", kSeedHelp);
    s.app->add_option("--config", s.config_path, kConfigHelp);
}

void add_fit_options(Subcommand& s) {
    s.add("input", "two-column CSV series (label,value); required");
    s.add("output", "report path (default: standard output)");
    s.add("format", "report format: csv|json (default csv)");
    s.add("rule", "thresholding rule: soft|hard (default soft)");
    s.add("K", "threshold constant K > 0 in t = K n^{-2/3} 2^{j/2} (default 0.1)");
}

KeyValues config_file(const Subcommand& s) {
    if (!s.config_path.empty()) return load_config(s.config_path);
    if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') return load_config(env);
    return {};
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
    if (path.empty()) out << text;
    else write_text(text, path);
}

const SeriesFile load_input(const RunConfig& cfg) {
    if (cfg.input.empty()) throw UsageError("--input is required");
    return load_series(cfg.input);
}

ThresholdPolicy make_policy(const RunConfig& cfg, Index n) {
    return ThresholdPolicy(ShrinkageRule::from_name(cfg.rule, cfg.K), n);
}

json policy_json(const ThresholdPolicy& policy) {
    return json{{"rule", policy.rule().name()},
                {"K", policy.rule().K()},
                {"critical_scale", policy.critical_scale()},
                {"finest_scale", policy.finest_scale()},
                {"thresholds", policy.schedule()}};
}

struct ResidualStats {
    double variance = 0.0;
    double lag1 = 0.0;
};

ResidualStats residual_stats(const Eigen::VectorXd& r) {
    const Eigen::ArrayXd c = r.array() - r.mean();
    const double ss = c.square().sum();
    ResidualStats s;
    s.variance = ss / static_cast<double>(r.size());
    if (ss > 0.0) s.lag1 = (c.head(c.size() - 1) * c.tail(c.size() - 1)).sum() / ss;
    return s;
}

Index kept_count(const CoefficientSet<double>& shrunk, const ThresholdPolicy& policy) {
    const IndexSet& idx = *shrunk.index;
    Index kept = 0;
    for (int j = policy.critical_scale(); j <= idx.finest_scale(); ++j) {
        for (Index p = idx.scale_begin(j); p < idx.scale_end(j); ++p) kept += shrunk.betas(p) != 0.0;
    }
    return kept;
}

int run_denoise(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_input(cfg);
    const Index n = series.size();
    const auto policy = make_policy(cfg, n);
    const HaarTransform tr(n);
    const auto coeffs = apply_policy(tr.analyze(series.values), policy);
    const Eigen::VectorXd fitted = tr.synthesize(coeffs);

    Table t{{"t", "y", "fitted"}, {}};
    for (Index i = 0; i < n; ++i) t.add_row({series.labels[static_cast<std::size_t>(i)], series.values(i), fitted(i)});
    emit(render(t, report_format_from_name(cfg.format)), cfg.output, out);
    if (!cfg.coeffs_out.empty()) write_coefficients(coeffs, cfg.coeffs_out);
    return exit_ok;
}

int run_fit_plm(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_input(cfg);
    const Index n = series.size();
    if (cfg.period < 1) throw ConfigError("--period must be at least 1");
    const auto policy = make_policy(cfg, n);
    const PLMFit fit = fit_plm(series.values, cfg.period, policy);
    const Eigen::VectorXd fitted = fit.fitted();

    Table t{{"t", "y", "linear_seasonal", "m_hat", "fitted"}, {}};
    for (Index i = 0; i < n; ++i) {
        t.add_row({series.labels[static_cast<std::size_t>(i)], series.values(i), fit.linear_seasonal(i), fit.m_hat(i),
                   fitted(i)});
    }
    emit(render(t, report_format_from_name(cfg.format)), cfg.output, out);

    std::string sidecar = cfg.sidecar;
    if (sidecar.empty() && !cfg.output.empty()) sidecar = cfg.output + ".json";
    if (sidecar.empty()) return exit_ok;

    const auto res = residual_stats(series.values - fitted);
    const Eigen::VectorXd seasonal = fit.gamma_hat.tail(cfg.period);
    Index jump_at = 1;
    double jump = 0.0;
    for (Index i = 1; i < n; ++i) {
        const double d = std::abs(fit.m_hat(i) - fit.m_hat(i - 1));
        if (d > jump) jump = d, jump_at = i;
    }
    json doc{{"n", n},
             {"period", cfg.period},
             {"gamma_hat", json{{"trend", fit.gamma_hat(0)},
                                {"seasonal", std::vector<double>(seasonal.data(), seasonal.data() + seasonal.size())}}},
             {"policy", policy_json(policy)},
             {"diagnostics", json{{"kept_coefficients", kept_count(fit.residual_coeffs, policy)},
                                  {"residual_variance", res.variance},
                                  {"residual_lag1_autocorrelation", res.lag1},
                                  {"largest_trend_jump",
                                   json{{"from", series.labels[static_cast<std::size_t>(jump_at - 1)]},
                                        {"to", series.labels[static_cast<std::size_t>(jump_at)]},
                                        {"size", jump}}}}}};
    write_json(doc, sidecar);
    return exit_ok;
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
    ScenarioSpec sc;
    sc.function = scenario_from_name(cfg.scenario);
    if (sc.function == ScenarioFunction::custom) {
        if (cfg.truth.empty()) throw UsageError("--truth is required with --scenario file");
        sc.custom_truth = load_series(cfg.truth).values;
    }
    sc.n = cfg.n;
    sc.ar_coefficient = cfg.ar;
    sc.innovation_variance = cfg.sigma2;
    sc.seed = cfg.seed;
    sc.validate();
    const Eigen::VectorXd x = sc.design();

    Table curves{{"estimator", "param", "mean_mse", "std_error"}, {}};
    std::vector<TunedEstimator> tuned;
    for (const auto& id : cfg.estimators) {
        EstimatorFamily fam;
        double tuning = 0.0;
        const std::vector<double>* grid = nullptr;
        if (id == "wavelet_soft" || id == "wavelet_hard") {
            fam = wavelet_family(id == "wavelet_soft" ? RuleKind::soft : RuleKind::hard);
            tuning = cfg.K;
            grid = &cfg.K_grid;
        } else if (id == "identity") {
            fam = identity_family();
        } else {
            const auto kind = id.find("rectangular") != std::string::npos ? KernelKind::rectangular
                                                                          : KernelKind::epanechnikov;
            fam = nw_family(kind);
            const bool scott = id.ends_with("_scott");
            tuning = !scott && cfg.bandwidth > 0.0 ? cfg.bandwidth : scott_bandwidth(x, kind);
            if (!scott) grid = &cfg.b_grid;
        }
        if (cfg.grid_search && grid != nullptr) {
            const auto g = grid_search_mse(fam, sc, *grid, cfg.reps);
            tuning = g.best_param;
            for (const auto& p : g.curve) curves.add_row({id, p.param, p.mean_mse, p.std_error});
        }
        tuned.push_back({id, tuning, fam.fit});
    }
    const RiskTable table = monte_carlo_compare(sc, tuned, cfg.reps);

    Table risk{{"estimator", "tuning", "replicates", "mean_mse", "std_error", "median_mse", "q1_mse", "q3_mse"}, {}};
    Table box{{"estimator", "replicate", "mse"}, {}};
    for (const auto& row : table.rows) {
        risk.add_row({row.id, row.tuning, std::int64_t{table.replicates}, row.mean, row.std_error, row.median, row.q1,
                      row.q3});
        for (std::size_t r = 0; r < row.mse.size(); ++r) {
            box.add_row({row.id, static_cast<std::int64_t>(r + 1), row.mse[r]});
        }
    }
    const std::filesystem::path dir(cfg.out_dir);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory '" + cfg.out_dir + "': " + ec.message());
    write_report(risk, (dir / "risk_table.csv").string(), ReportFormat::csv);
    write_report(box, (dir / "boxplot_data.csv").string(), ReportFormat::csv);
    write_report(curves, (dir / "curves.csv").string(), ReportFormat::csv);
    out << render(risk, ReportFormat::csv);
    return exit_ok;
}

int run_oracle(const RunConfig& cfg, std::ostream& out) {
    const SparseModelSpec spec(cfg.epsilon, cfg.q, cfg.N);
    const auto est = named_estimator(cfg.estimator, spec, cfg.K);
    const auto risk = mc_risk(est, spec, cfg.reps, cfg.seed, noise_family_from_name(cfg.noise));
    const json doc{{"mean", risk.mean}, {"se", risk.std_error}, {"exact_bayes_risk", bayes_risk_exact(cfg.epsilon, cfg.q)}};
    emit(doc.dump(2) + "\n", cfg.output, out);
    return exit_ok;
}

int run_diagnose(const RunConfig& cfg, std::ostream& out) {
    const auto series = load_input(cfg);
    const Index n = series.size();
    const auto policy = make_policy(cfg, n);

    Eigen::VectorXd trend;
    Eigen::VectorXd fitted;
    CoefficientSet<double> shrunk;
    if (cfg.period > 0) {
        const PLMFit fit = fit_plm(series.values, cfg.period, policy);
        trend = fit.m_hat;
        fitted = fit.fitted();
        shrunk = fit.residual_coeffs;
    } else {
        const HaarTransform tr(n);
        shrunk = apply_policy(tr.analyze(series.values), policy);
        trend = tr.synthesize(shrunk);
        fitted = trend;
    }
    const Eigen::VectorXd residual = series.values - fitted;
    const auto res = residual_stats(residual);

    json doc{{"n", n}, {"period", cfg.period}, {"policy", policy_json(policy)}};
    doc["kept_coefficients"] = kept_count(shrunk, policy);
    doc["scaled_sn_of_fit"] = std::pow(static_cast<double>(n), 2.0 / 3.0) * sn_diagnostic(trend, cfg.K);
    doc["residual"] = json{{"variance", res.variance}, {"lag1_autocorrelation", res.lag1}};

    if (n >= 1000) {
        const auto tail = tail_majorant_check(residual, cfg.gamma);
        doc["tail_majorant"] = json{{"gamma", tail.gamma},
                                    {"C", tail.C},
                                    {"checked", tail.checked},
                                    {"violations", tail.violations},
                                    {"dominated", tail.dominated}};
    } else {
        doc["tail_majorant"] = json{{"skipped", "needs at least 1000 observations"}};
    }

    const double a = std::clamp(res.lag1, -0.99, 0.99);
    const NoiseModel model{a, res.variance * (1.0 - a * a)};
    const Eigen::VectorXd weights = wavelet_values<double>(n, index_set(n)[0]).dense() / static_cast<double>(n);
    const auto mb = moment_bound_check(weights, model, cfg.reps, cfg.seed);
    doc["moment_bound"] = json{{"ar_coefficient", model.ar_coefficient},
                               {"innovation_variance", model.innovation_variance},
                               {"mc_mean", mb.mc_mean},
                               {"mc_se", mb.mc_se},
                               {"bound", mb.bound},
                               {"holds", mb.holds}};
    emit(doc.dump(2) + "\n", cfg.output, out);
    return exit_ok;
}

int usage_failure(const std::string& message, const CLI::App& app, std::ostream& err) {
    err << "error: " << message << "\n\n" << app.help();
    return exit_usage;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Haar-type wavelet trend estimation for series of any length"};
    app.name("haartrend");
    app.require_subcommand(1, 1);

    std::map<std::string, Subcommand> subs;
    auto make = [&](const std::string& name, const std::string& help) -> Subcommand& {
        Subcommand& s = subs[name];
        s.app = app.add_subcommand(name, help);
        add_common(s);
        return s;
    };

    auto& denoise = make("denoise", "threshold the wavelet coefficients of a series");
    add_fit_options(denoise);
    denoise.add("coeffs-out", "write the thresholded coefficients (j,k,beta) to this path");

    auto& plm = make("fit-plm", "linear trend + seasonal OLS, then wavelet thresholding of the remainder");
    add_fit_options(plm);
    plm.add("period", "seasonal period p >= 1 (default 12)");
    plm.add("sidecar", "JSON path for gamma_hat and diagnostics (default: <output>.json)");

    auto& sim = make("simulate", "Monte Carlo comparison of wavelet and Nadaraya-Watson estimators");
    sim.add("scenario", "truth: f|g|file (default f)");
    sim.add("truth", "series file holding the truth when --scenario file");
    sim.add("n", "sample size (default 1000)");
    sim.add("reps", "Monte Carlo replicates (default 200)");
    sim.add("ar", "AR(1) coefficient in (-1, 1) (default 0.7)");
    sim.add("sigma2", "innovation variance >= 0 (default 0.01)");
    sim.add("estimators", "comma-separated: wavelet_soft, wavelet_hard, nw_rectangular, nw_epanechnikov, "
                          "nw_rectangular_scott, nw_epanechnikov_scott, identity");
    sim.grid_flag = sim.app->add_flag("--grid-search", sim.grid_search, "tune K and b by grid search on MSE");
    sim.add("K", "wavelet K without grid search (default 0.1)");
    sim.add("bandwidth", "Nadaraya-Watson bandwidth without grid search (default: rule of thumb)");
    sim.add("K-grid", "K grid, lo:hi:count (log-spaced) or a list (default 0.005:1:40)");
    sim.add("b-grid", "bandwidth grid, lo:hi:count (log-spaced) or a list (default 0.003:0.3:40)");
    sim.add("out-dir", "directory for risk_table.csv, boxplot_data.csv, curves.csv (default .)");

    auto& oracle = make("oracle", "Monte Carlo risk in the three-point sparse model");
    oracle.add("epsilon", "noise level epsilon > 0 (default 1)");
    oracle.add("q", "sparsity q in (0, 1) (default 0.125)");
    oracle.add("N", "coordinates per replicate (default 100000)");
    oracle.add("reps", "replicates (default 50)");
    oracle.add("estimator", "bayes|soft|hard|half (default bayes)");
    oracle.add("K", "soft/hard threshold t = K epsilon q^{-1/3} (default 1)");
    oracle.add("noise", "three_point|gaussian|student_t5 (default three_point)");
    oracle.add("output", "JSON path (default: standard output)");

    auto& diag = make("diagnose", "threshold schedule, residual and tail diagnostics of a fit");
    diag.add("input", "two-column CSV series (label,value); required");
    diag.add("output", "JSON path (default: standard output)");
    diag.add("rule", "thresholding rule: soft|hard (default soft)");
    diag.add("K", "threshold constant (default 0.1)");
    diag.add("period", "seasonal period; 0 fits the trend alone (default 0)");
    diag.add("gamma", "tail exponent of the survival majorant (default 4)");
    diag.add("reps", "replicates of the fourth-moment check (default 2000)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = &app;
        for (const auto* s : app.get_subcommands()) target = s;
        out << target->help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        const CLI::App* target = &app;
        for (const auto* s : app.get_subcommands()) target = s;
        return usage_failure(e.what(), *target, err);
    }

    const CLI::App* chosen = app.get_subcommands().front();
    const Subcommand& s = subs.at(chosen->get_name());
    try {
        const RunConfig cfg = resolve_config(chosen->get_name(), config_file(s), s.given());
        if (cfg.subcommand == "denoise") return run_denoise(cfg, out);
        if (cfg.subcommand == "fit-plm") return run_fit_plm(cfg, out);
        if (cfg.subcommand == "simulate") return run_simulate(cfg, out);
        if (cfg.subcommand == "oracle") return run_oracle(cfg, out);
        return run_diagnose(cfg, out);
    } catch (const UsageError& e) {
        return usage_failure(e.what(), *chosen, err);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return exit_usage;
    } catch (const DataFault& e) {
        err << "data error: " << e.what() << "\n";
        return exit_data;
    } catch (const NumericalFault& e) {
        err << "numerical error: " << e.what() << "\n";
        return exit_numerical;
    }
}

int dispatch(int argc, const char* const* argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return dispatch(args, std::cout, std::cerr);
}

}  // namespace haartrend
