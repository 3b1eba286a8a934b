#pragma once

// Scale-dependent thresholding of empirical wavelet coefficients.
//
// Coefficients at scales j < J* (2^{J*-1} < n^{1/3} <= 2^{J*}) are kept as
// they are; finer coefficients are passed through a rule with threshold
// t_{n,j} = K n^{-2/3} 2^{j/2}. Every rule must satisfy the thresholding
// contract: rule(b, t) = 0 when |b| < t, and |rule(b, t) - b| <= t otherwise.

#include <cmath>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "haartrend/errors.hpp"
#include "haartrend/grid_basis.hpp"
#include "haartrend/transform.hpp"

namespace haartrend {

template <typename Scalar>
Scalar soft(Scalar b, Scalar t) {
    using std::abs;
    const Scalar shrunk = abs(b) - t;
    if (shrunk <= Scalar(0)) return Scalar(0);
    return b < Scalar(0) ? -shrunk : shrunk;
}

template <typename Scalar>
Scalar hard(Scalar b, Scalar t) {
    using std::abs;
    return abs(b) < t ? Scalar(0) : b;
}

/// Coarsest scale that gets thresholded: the J with 2^{J-1} < n^{1/3} <= 2^J.
int critical_scale(Index n);

/// t_{n,j} = K n^{-2/3} 2^{j/2}.
double threshold_value(Index n, int j, double K);

enum class RuleKind { soft, hard, custom };

std::string_view to_string(RuleKind kind);

/// A thresholding rule with its constant K.
class ShrinkageRule {
public:
    using Fn = std::function<double(double, double)>;

    static ShrinkageRule soft(double K);
    static ShrinkageRule hard(double K);
    /// Registers a user rule; probes the contract on a fixed sample and throws RuleError on violation.
    static ShrinkageRule custom(double K, Fn fn, std::string name = "custom");
    /// "soft" or "hard".
    static ShrinkageRule from_name(std::string_view name, double K);

    RuleKind kind() const noexcept { return kind_; }
    double K() const noexcept { return K_; }
    const std::string& name() const noexcept { return name_; }

    double operator()(double b, double t) const;

private:
    ShrinkageRule(RuleKind kind, double K, Fn fn, std::string name);

    RuleKind kind_;
    double K_;
    Fn fn_;
    std::string name_;
};

/// True when `out` is an admissible result of thresholding `b` at `t`.
bool satisfies_contract(double b, double t, double out);

/// A rule bound to one sample size, with its critical scale and per-scale thresholds.
class ThresholdPolicy {
public:
    ThresholdPolicy(ShrinkageRule rule, Index n);

    const ShrinkageRule& rule() const noexcept { return rule_; }
    Index sample_size() const noexcept { return n_; }
    int critical_scale() const noexcept { return critical_; }
    int finest_scale() const noexcept { return finest_; }
    /// t_{n,j} for j = 0..J_n.
    const std::vector<double>& schedule() const noexcept { return schedule_; }
    double threshold(int j) const;

private:
    ShrinkageRule rule_;
    Index n_;
    int critical_;
    int finest_;
    std::vector<double> schedule_;
};

/// Keeps alpha0 and scales below J*, thresholds the rest.
template <typename Scalar>
CoefficientSet<Scalar> apply_policy(const CoefficientSet<Scalar>& coeffs, const ThresholdPolicy& policy) {
    if (coeffs.sample_size() != policy.sample_size()) {
        throw ConfigError("threshold policy built for n=" + std::to_string(policy.sample_size()) +
                          ", coefficients have n=" + std::to_string(coeffs.sample_size()));
    }
    CoefficientSet<Scalar> out = coeffs;
    const IndexSet& idx = *coeffs.index;
    const bool check = policy.rule().kind() == RuleKind::custom;
    for (int j = policy.critical_scale(); j <= idx.finest_scale(); ++j) {
        const double t = policy.threshold(j);
        for (Index p = idx.scale_begin(j); p < idx.scale_end(j); ++p) {
            const double b = static_cast<double>(coeffs.betas(p));
            const double v = policy.rule()(b, t);
            if (check && !satisfies_contract(b, t, v)) {
                throw RuleError("rule '" + policy.rule().name() + "' broke the thresholding contract at (" +
                                std::to_string(j) + "," + std::to_string(idx[p].k) + ")");
            }
            out.betas(p) = static_cast<Scalar>(v);
        }
    }
    return out;
}

/// Trend estimate at the sample points: synthesize(apply_policy(analyze(y), policy)).
template <typename Derived>
Vector<typename Derived::Scalar> estimate_trend(const Eigen::MatrixBase<Derived>& y, const ThresholdPolicy& policy) {
    if (y.rows() != policy.sample_size()) {
        throw ConfigError("threshold policy built for n=" + std::to_string(policy.sample_size()) +
                          ", series has n=" + std::to_string(y.rows()));
    }
    const HaarTransform tr(y.rows());
    return tr.synthesize(apply_policy(tr.analyze(y), policy));
}

inline Eigen::VectorXd estimate_trend(const SampleGrid& grid, const ThresholdPolicy& policy) {
    return estimate_trend(grid.y(), policy);
}

/// S_n(m0) = sum over j >= J* and k of min(beta0_{j,k}^2, t_{n,j}^2).
double sn_diagnostic(const Eigen::Ref<const Eigen::VectorXd>& m0, double K);

}  // namespace haartrend
