#pragma once

// The abstract sparse-signal problem Y_k = theta_k + eps_k with noise from
// the polynomial-tail class Q_eps = {Q : 1 - Q([-t, t]) <= (eps/t)^4 for all t}
// and signals drawn from the three-point prior
//   pi({-lambda}) = pi({lambda}) = p/2,  pi({0}) = 1 - p,
// with p = q^{4/3} and lambda = eps q^{-1/3}.

#include <array>
#include <cstdint>
#include <functional>
#include <string_view>

#include <Eigen/Core>

#include "haartrend/detail/random.hpp"
#include "haartrend/errors.hpp"
#include "haartrend/grid_basis.hpp"

namespace haartrend {

struct PriorParams {
    double p = 0.0;
    double lambda = 0.0;
};

/// (q^{4/3}, eps q^{-1/3}).
PriorParams prior_params(double epsilon, double q);

class SparseModelSpec {
public:
    SparseModelSpec(double epsilon, double q, Index N);

    double epsilon() const noexcept { return epsilon_; }
    double q() const noexcept { return q_; }
    Index N() const noexcept { return N_; }
    double p() const noexcept { return prior_.p; }
    double lambda() const noexcept { return prior_.lambda; }

private:
    double epsilon_;
    double q_;
    Index N_;
    PriorParams prior_;
};

/// Members of Q_eps shipped with the library.
enum class NoiseFamily {
    three_point,  // the prior pi itself
    gaussian,     // N(0, eps^2)
    student_t5,   // Student-t with 5 degrees of freedom, scaled to meet the tail bound
};

std::string_view to_string(NoiseFamily family);
NoiseFamily noise_family_from_name(std::string_view name);

/// Two-sided tail P(|T| > u) of a standard Student-t(5) variable.
double student_t5_tail(double u);

/// A certified member of Q_eps. Construction verifies the tail bound on a
/// dense grid and throws ConfigError if it fails.
class NoiseSampler {
public:
    NoiseSampler(NoiseFamily family, const SparseModelSpec& spec);

    NoiseFamily family() const noexcept { return family_; }
    /// Multiplier applied to the unit draw (eps for the Gaussian, the tail-normalised scale for t5).
    double scale() const noexcept { return scale_; }
    /// Exact P(|eps_k| > t).
    double tail_probability(double t) const;
    /// Exact E[eps_k^2].
    double second_moment() const;

    double operator()(detail::Rng& rng) const;

private:
    NoiseFamily family_;
    double epsilon_;
    double p_;
    double lambda_;
    double scale_;
};

struct ModelSample {
    Eigen::VectorXd theta;
    Eigen::VectorXd noise;
    Eigen::VectorXd y;
};

/// Draws theta_k i.i.d. from the prior and independent noise; reproducible per seed.
ModelSample sample_model(const SparseModelSpec& spec, std::uint64_t seed,
                         NoiseFamily noise = NoiseFamily::three_point);

/// The Bayes rule under three-point prior and noise: y/2 on {-2l, -l, 0, l, 2l}.
double bayes_rule(double y, double lambda);

/// eps^2 q^{2/3} / 2.
double bayes_risk_exact(double epsilon, double q);

/// Exact prior risk E[(T(Y) - theta)^2] of an arbitrary rule under three-point noise,
/// by enumeration of the nine (theta, eps) outcomes.
double exact_prior_risk(const SparseModelSpec& spec, const std::function<double(double)>& rule);

struct BayesOptimalityReport {
    std::array<double, 5> support{};       // -2l, -l, 0, l, 2l
    std::array<double, 5> optimal_rule{};  // posterior-risk minimisers at the support points
    double minimal_risk = 0.0;
    double exact_risk = 0.0;
    double max_rule_deviation = 0.0;  // vs bayes_rule
    double risk_deviation = 0.0;      // vs bayes_risk_exact
};

/// Minimises the posterior quadratic risk separately at each of the five outcomes.
BayesOptimalityReport verify_bayes_optimality(const SparseModelSpec& spec);

struct RiskEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    Index replicates = 0;
};

using CoordinateEstimator = std::function<double(double)>;

/// Mean and standard error over replicates of (1/N) sum_k (T(Y_k) - theta_k)^2.
/// Replicate r uses a seed derived from (seed, r), so results do not depend on scheduling.
RiskEstimate mc_risk(const CoordinateEstimator& estimator, const SparseModelSpec& spec, Index replicates,
                     std::uint64_t seed, NoiseFamily noise = NoiseFamily::three_point);

/// Named estimators used by the command line: bayes, soft, hard (t = K lambda), half (y/2).
CoordinateEstimator named_estimator(std::string_view name, const SparseModelSpec& spec, double K = 1.0);

}  // namespace haartrend
