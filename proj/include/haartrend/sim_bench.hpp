#pragma once

// Monte Carlo benchmark of the wavelet trend estimator against
// Nadaraya-Watson regression on AR(1)-perturbed scenario functions,
// plus the diagnostics used to check the noise assumptions empirically.
//
// Replicate r of every experiment draws its noise from a seed derived from
// (master seed, r) only, so all estimators in one comparison see the same
// noise realisations and results do not depend on thread scheduling.

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "haartrend/errors.hpp"
#include "haartrend/grid_basis.hpp"
#include "haartrend/shrinkage.hpp"

namespace haartrend {

/// 1.5 + t on [0, 1/2), 0.1 on [1/2, 2/3), 3 sqrt(t - 2/3) + 0.1 on [2/3, 1).
double scenario_f(double t);
/// 10t - floor(10t) on [0, 0.7), 0.5 on [0.7, 1).
double scenario_g(double t);

enum class ScenarioFunction { f, g, custom };

ScenarioFunction scenario_from_name(std::string_view name);

/// Evaluates `fn` at (t - 1)/n for t = 1..n, which keeps every argument inside [0, 1).
Eigen::VectorXd sample_scenario(const std::function<double(double)>& fn, Index n);

struct ScenarioSpec {
    ScenarioFunction function = ScenarioFunction::f;
    Eigen::VectorXd custom_truth;  // used when function == custom
    Index n = 1000;
    double ar_coefficient = 0.7;
    double innovation_variance = 0.01;  // 0 gives a noiseless scenario
    std::uint64_t seed = 0;

    void validate() const;
    Index size() const { return function == ScenarioFunction::custom ? custom_truth.size() : n; }
    Eigen::VectorXd truth() const;
    /// Design points x_t = t/n.
    Eigen::VectorXd design() const;
    /// Noise of replicate r.
    Eigen::VectorXd noise(std::uint64_t replicate) const;
};

/// Stationary AR(1): eps_t = a eps_{t-1} + eta_t with eta_t ~ N(0, sigma2) and
/// eps_1 drawn from N(0, sigma2 / (1 - a^2)).
Eigen::VectorXd ar1_noise(Index n, double a, double sigma2, std::uint64_t seed);

enum class KernelKind { rectangular, epanechnikov };

std::string_view to_string(KernelKind kind);
KernelKind kernel_from_name(std::string_view name);

struct KernelSpec {
    KernelKind kind = KernelKind::epanechnikov;
    double bandwidth = 0.1;
};

/// Rectangular 1/2 on |u| <= 1; Epanechnikov 3/4 (1 - u^2) on |u| <= 1.
double kernel_weight(KernelKind kind, double u);

/// Nadaraya-Watson fit at the (ascending) design points themselves.
Eigen::VectorXd nw_estimate(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                            const KernelSpec& kernel);

/// Nadaraya-Watson fit at arbitrary evaluation points. Throws EstimationError
/// naming the first point whose kernel window carries no weight.
Eigen::VectorXd nw_estimate(const Eigen::Ref<const Eigen::VectorXd>& x, const Eigen::Ref<const Eigen::VectorXd>& y,
                            const KernelSpec& kernel, const Eigen::Ref<const Eigen::VectorXd>& at);

/// Kernel constant of the rule-of-thumb bandwidth b = c * sd(values) * n^{-1/5}.
double scott_constant(KernelKind kind);

/// Rule-of-thumb bandwidth from the spread of `values` (the regression design in practice).
double scott_bandwidth(const Eigen::Ref<const Eigen::VectorXd>& values, KernelKind kind);

/// Fitted values of a tuned trend estimator for one series.
using TrendEstimator = std::function<Eigen::VectorXd(const Eigen::VectorXd& y, double param)>;

struct EstimatorFamily {
    std::string id;
    TrendEstimator fit;
};

/// Wavelet thresholding with parameter K.
EstimatorFamily wavelet_family(RuleKind rule = RuleKind::soft);
/// Nadaraya-Watson on x_t = t/n with parameter b.
EstimatorFamily nw_family(KernelKind kind);
/// Keeps every empirical coefficient (returns the data).
EstimatorFamily identity_family();

/// `count` log-spaced values from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, std::size_t count);

double mean_squared_error(const Eigen::Ref<const Eigen::VectorXd>& fitted, const Eigen::Ref<const Eigen::VectorXd>& truth);

struct CurvePoint {
    double param = 0.0;
    double mean_mse = 0.0;
    double std_error = 0.0;
};

struct GridSearchResult {
    std::string id;
    double best_param = 0.0;
    double best_risk = 0.0;
    std::vector<CurvePoint> curve;
};

GridSearchResult grid_search_mse(const EstimatorFamily& family, const ScenarioSpec& scenario,
                                 const std::vector<double>& grid, Index reps);

struct TunedEstimator {
    std::string id;
    double tuning = 0.0;
    TrendEstimator fit;
};

struct RiskRow {
    std::string id;
    double tuning = 0.0;
    std::vector<double> mse;  // one per replicate
    double mean = 0.0;
    double std_error = 0.0;
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};

struct RiskTable {
    Index replicates = 0;
    std::vector<RiskRow> rows;

    const RiskRow& row(std::string_view id) const;
};

/// Linear-interpolation quantile (type 7) of an unsorted sample.
double quantile(std::vector<double> values, double level);

RiskTable monte_carlo_compare(const ScenarioSpec& scenario, const std::vector<TunedEstimator>& estimators, Index reps);

struct RatePoint {
    Index n = 0;
    double mean_mse = 0.0;
    double std_error = 0.0;
};

struct RateCheckResult {
    double slope = 0.0;  // NaN if some mean MSE is zero
    double intercept = 0.0;
    std::vector<RatePoint> points;
};

struct NoiseModel {
    double ar_coefficient = 0.0;
    double innovation_variance = 1.0;
};

/// OLS slope of log(MC MSE) on log(n). `truth(n)` returns the trend at the n design points;
/// `estimator(y)` returns the fit.
RateCheckResult rate_check(const std::function<Eigen::VectorXd(Index)>& truth,
                           const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& estimator,
                           const std::vector<Index>& n_grid, Index reps, const NoiseModel& noise, std::uint64_t seed);

struct TailMajorantReport {
    double gamma = 0.0;
    double C = 0.0;  // fitted on the body of the quantile grid
    std::vector<double> levels;
    std::vector<double> x;
    std::vector<double> survival;
    std::vector<double> bound;  // min(1, C / x^gamma)
    Index checked = 0;
    Index violations = 0;
    bool dominated = true;
};

/// Fits C so that min{1, C / x^gamma} dominates the empirical survival function of
/// |sample| on the body of the quantile grid, then counts tail grid points where the
/// survival function exceeds the majorant by more than three binomial standard errors.
TailMajorantReport tail_majorant_check(const Eigen::Ref<const Eigen::VectorXd>& sample, double gamma);

struct MomentBoundReport {
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double bound = 0.0;
    double C1 = 0.0;
    double C2 = 0.0;
    bool holds = true;  // mc_mean <= bound + 3 se
};

/// sup_s sum_t |cov(eps_s, eps_t)| of a stationary Gaussian AR(1) process.
double ar1_covariance_row_sum(double a, double sigma2);

/// Monte Carlo estimate of E[(sum_s a_s eps_s)^4] under Gaussian AR(1) noise versus
/// 3 C1^2 (sum a^2)^2 + C2 sum a^4, where C2 = 0 since Gaussian fourth cumulants vanish.
MomentBoundReport moment_bound_check(const Eigen::Ref<const Eigen::VectorXd>& weights, const NoiseModel& noise,
                                     Index reps, std::uint64_t seed);

struct IntegralIdentity {
    double lhs = 0.0;  // integral over (t, inf) of x^2 dF
    double rhs = 0.0;  // 2 integral_t^inf (1 - F) x dx + (1 - F(t)) t^2
};

/// Both sides of the tail-integral identity for the empirical distribution of |sample|.
IntegralIdentity tail_integral_identity(const Eigen::Ref<const Eigen::VectorXd>& sample, double t);

}  // namespace haartrend
