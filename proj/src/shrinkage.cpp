#include "haartrend/shrinkage.hpp"

#include <algorithm>
#include <array>
#include <random>

namespace haartrend {

namespace {

void check_K(double K) {
    if (!(K > 0.0) || !std::isfinite(K)) throw ConfigError("threshold constant K must be positive and finite");
}

// Fixed probe set: boundary multiples of t plus a seeded random sweep.
void probe_contract(const ShrinkageRule::Fn& fn, const std::string& name) {
    constexpr std::array<double, 4> thresholds{1e-3, 0.1, 1.0, 25.0};
    constexpr std::array<double, 13> multiples{-4.0, -1.5, -1.0, -0.999, -0.5, -1e-9, 0.0,
                                               1e-9, 0.5,  0.999, 1.0,  1.5,    4.0};
    std::mt19937_64 rng(0x5eedULL);
    std::uniform_real_distribution<double> unit(-3.0, 3.0);
    for (double t : thresholds) {
        auto check = [&](double b) {
            const double out = fn(b, t);
            if (!satisfies_contract(b, t, out)) {
                throw RuleError("rule '" + name + "' violates the thresholding contract at b=" + std::to_string(b) +
                                ", t=" + std::to_string(t));
            }
        };
        for (double m : multiples) check(m * t);
        for (int i = 0; i < 64; ++i) check(unit(rng) * t);
    }
}

}  // namespace

int critical_scale(Index n) {
    if (n < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(n));
    // 2^{J-1} < n^{1/3} <= 2^J  <=>  8^{J-1} < n <= 8^J
    int J = 0;
    for (std::uint64_t p = 1; p < static_cast<std::uint64_t>(n); p *= 8) ++J;
    return J;
}

double threshold_value(Index n, int j, double K) {
    check_K(K);
    if (n < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(n));
    return K * std::pow(static_cast<double>(n), -2.0 / 3.0) * std::exp2(0.5 * j);
}

std::string_view to_string(RuleKind kind) {
    switch (kind) {
        case RuleKind::soft: return "soft";
        case RuleKind::hard: return "hard";
        case RuleKind::custom: return "custom";
    }
    return "custom";
}

bool satisfies_contract(double b, double t, double out) {
    if (!std::isfinite(out)) return false;
    if (std::abs(b) < t) return out == 0.0;
    return std::abs(out - b) <= t * (1.0 + 1e-12);
}

ShrinkageRule::ShrinkageRule(RuleKind kind, double K, Fn fn, std::string name)
    : kind_(kind), K_(K), fn_(std::move(fn)), name_(std::move(name)) {
    check_K(K);
}

ShrinkageRule ShrinkageRule::soft(double K) {
    return {RuleKind::soft, K, [](double b, double t) { return haartrend::soft(b, t); }, "soft"};
}

ShrinkageRule ShrinkageRule::hard(double K) {
    return {RuleKind::hard, K, [](double b, double t) { return haartrend::hard(b, t); }, "hard"};
}

ShrinkageRule ShrinkageRule::custom(double K, Fn fn, std::string name) {
    if (!fn) throw RuleError("custom rule '" + name + "' has no function");
    probe_contract(fn, name);
    return {RuleKind::custom, K, std::move(fn), std::move(name)};
}

ShrinkageRule ShrinkageRule::from_name(std::string_view name, double K) {
    if (name == "soft") return soft(K);
    if (name == "hard") return hard(K);
    throw ConfigError("unknown thresholding rule '" + std::string(name) + "' (expected soft or hard)");
}

double ShrinkageRule::operator()(double b, double t) const { return fn_(b, t); }

ThresholdPolicy::ThresholdPolicy(ShrinkageRule rule, Index n)
    : rule_(std::move(rule)), n_(n), critical_(haartrend::critical_scale(n)), finest_(haartrend::finest_scale(n)) {
    schedule_.reserve(static_cast<std::size_t>(finest_) + 1);
    for (int j = 0; j <= finest_; ++j) schedule_.push_back(threshold_value(n, j, rule_.K()));
}

double ThresholdPolicy::threshold(int j) const {
    if (j < 0 || j > finest_) throw IndexError("no threshold for scale j=" + std::to_string(j));
    return schedule_[static_cast<std::size_t>(j)];
}

double sn_diagnostic(const Eigen::Ref<const Eigen::VectorXd>& m0, double K) {
    check_K(K);
    const HaarTransform tr(m0.size());
    const auto coeffs = tr.analyze(m0);
    const IndexSet& idx = *coeffs.index;
    double total = 0.0;
    for (int j = critical_scale(m0.size()); j <= idx.finest_scale(); ++j) {
        const double t2 = std::pow(threshold_value(m0.size(), j, K), 2);
        for (Index p = idx.scale_begin(j); p < idx.scale_end(j); ++p) {
            total += std::min(coeffs.betas(p) * coeffs.betas(p), t2);
        }
    }
    return total;
}

}  // namespace haartrend
