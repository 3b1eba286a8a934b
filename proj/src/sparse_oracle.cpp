#include "haartrend/sparse_oracle.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "haartrend/detail/parallel.hpp"
#include "haartrend/shrinkage.hpp"

namespace haartrend {

namespace {

constexpr std::uint64_t kThetaStream = 1;

// sup_u u^4 P(|T5| > u): coarse grid, then golden-section refinement.
double t5_quartic_tail_peak() {
    auto f = [](double u) { return std::pow(u, 4) * student_t5_tail(u); };
    double best_u = 0.0;
    double best = 0.0;
    for (double u = 0.01; u < 60.0; u += 0.01) {
        if (const double v = f(u); v > best) best = v, best_u = u;
    }
    double a = best_u - 0.01;
    double b = best_u + 0.01;
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int i = 0; i < 100; ++i) {
        const double c = b - g * (b - a);
        const double d = a + g * (b - a);
        if (f(c) > f(d)) b = d; else a = c;
    }
    return f(0.5 * (a + b));
}

double sample_theta(double u, double p, double lambda) {
    if (u < 0.5 * p) return -lambda;
    if (u < p) return lambda;
    return 0.0;
}

}  // namespace

PriorParams prior_params(double epsilon, double q) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("noise level epsilon must be positive");
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("sparsity q must lie in (0, 1)");
    return {std::pow(q, 4.0 / 3.0), epsilon * std::pow(q, -1.0 / 3.0)};
}

SparseModelSpec::SparseModelSpec(double epsilon, double q, Index N)
    : epsilon_(epsilon), q_(q), N_(N), prior_(prior_params(epsilon, q)) {
    if (N < 1) throw ConfigError("number of coordinates N must be positive");
}

std::string_view to_string(NoiseFamily family) {
    switch (family) {
        case NoiseFamily::three_point: return "three_point";
        case NoiseFamily::gaussian: return "gaussian";
        case NoiseFamily::student_t5: return "student_t5";
    }
    return "three_point";
}

NoiseFamily noise_family_from_name(std::string_view name) {
    if (name == "three_point" || name == "three-point") return NoiseFamily::three_point;
    if (name == "gaussian") return NoiseFamily::gaussian;
    if (name == "student_t5" || name == "t5") return NoiseFamily::student_t5;
    throw ConfigError("unknown noise family '" + std::string(name) + "'");
}

double student_t5_tail(double u) {
    u = std::abs(u);
    const double theta = std::atan(u / std::sqrt(5.0));
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double central = (2.0 / std::numbers::pi) * (theta + s * c * (1.0 + (2.0 / 3.0) * c * c));
    return std::max(0.0, 1.0 - central);
}

NoiseSampler::NoiseSampler(NoiseFamily family, const SparseModelSpec& spec)
    : family_(family), epsilon_(spec.epsilon()), p_(spec.p()), lambda_(spec.lambda()), scale_(spec.epsilon()) {
    if (family_ == NoiseFamily::student_t5) scale_ = epsilon_ / std::pow(t5_quartic_tail_peak(), 0.25);

    // Certify 1 - Q([-t, t]) <= (eps/t)^4 on a log grid of t.
    for (double t = 1e-3 * epsilon_; t < 1e3 * epsilon_; t *= 1.01) {
        const double bound = std::pow(epsilon_ / t, 4);
        if (tail_probability(t) > bound * (1.0 + 1e-9)) {
            throw ConfigError("noise family " + std::string(to_string(family_)) + " violates the tail bound at t=" +
                              std::to_string(t));
        }
    }
}

double NoiseSampler::tail_probability(double t) const {
    if (t < 0.0) return 1.0;
    switch (family_) {
        case NoiseFamily::three_point: return t < lambda_ ? p_ : 0.0;
        case NoiseFamily::gaussian: return std::erfc(t / (scale_ * std::numbers::sqrt2));
        case NoiseFamily::student_t5: return student_t5_tail(t / scale_);
    }
    return 0.0;
}

double NoiseSampler::second_moment() const {
    switch (family_) {
        case NoiseFamily::three_point: return p_ * lambda_ * lambda_;
        case NoiseFamily::gaussian: return scale_ * scale_;
        case NoiseFamily::student_t5: return scale_ * scale_ * 5.0 / 3.0;
    }
    return 0.0;
}

double NoiseSampler::operator()(detail::Rng& rng) const {
    switch (family_) {
        case NoiseFamily::three_point: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            return sample_theta(unit(rng), p_, lambda_);
        }
        case NoiseFamily::gaussian: {
            std::normal_distribution<double> z(0.0, 1.0);
            return scale_ * z(rng);
        }
        case NoiseFamily::student_t5: {
            std::student_t_distribution<double> t5(5.0);
            return scale_ * t5(rng);
        }
    }
    return 0.0;
}

ModelSample sample_model(const SparseModelSpec& spec, std::uint64_t seed, NoiseFamily noise) {
    const NoiseSampler sampler(noise, spec);
    auto rng = detail::make_rng(seed, kThetaStream, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    ModelSample s;
    s.theta.resize(spec.N());
    s.noise.resize(spec.N());
    for (Index k = 0; k < spec.N(); ++k) {
        s.theta(k) = sample_theta(unit(rng), spec.p(), spec.lambda());
        s.noise(k) = sampler(rng);
    }
    s.y = s.theta + s.noise;
    return s;
}

double bayes_rule(double y, double lambda) {
    if (!(lambda > 0.0)) throw DomainError("bayes_rule: lambda must be positive");
    const double tol = 1e-9 * std::max(1.0, lambda);
    for (int m = -2; m <= 2; ++m) {
        if (std::abs(y - m * lambda) <= tol) return 0.5 * m * lambda;
    }
    throw DomainError("bayes_rule: y=" + std::to_string(y) + " is not in {-2l, -l, 0, l, 2l}");
}

double bayes_risk_exact(double epsilon, double q) {
    prior_params(epsilon, q);
    return epsilon * epsilon * std::pow(q, 2.0 / 3.0) / 2.0;
}

namespace {

struct Outcome {
    double theta;
    int y_multiple;  // y = y_multiple * lambda
    double weight;
};

std::vector<Outcome> joint_outcomes(const SparseModelSpec& spec) {
    const double p = spec.p();
    const std::array<std::pair<int, double>, 3> law{{{-1, p / 2}, {0, 1 - p}, {1, p / 2}}};
    std::vector<Outcome> out;
    for (auto [ti, tw] : law) {
        for (auto [ei, ew] : law) out.push_back({ti * spec.lambda(), ti + ei, tw * ew});
    }
    return out;
}

}  // namespace

double exact_prior_risk(const SparseModelSpec& spec, const std::function<double(double)>& rule) {
    double risk = 0.0;
    for (const auto& o : joint_outcomes(spec)) {
        const double err = rule(o.y_multiple * spec.lambda()) - o.theta;
        risk += o.weight * err * err;
    }
    return risk;
}

BayesOptimalityReport verify_bayes_optimality(const SparseModelSpec& spec) {
    BayesOptimalityReport r;
    std::array<double, 5> mass{};
    std::array<double, 5> first{};
    const auto outcomes = joint_outcomes(spec);
    for (const auto& o : outcomes) {
        const auto i = static_cast<std::size_t>(o.y_multiple + 2);
        mass[i] += o.weight;
        first[i] += o.weight * o.theta;
    }
    for (std::size_t i = 0; i < 5; ++i) {
        r.support[i] = (static_cast<double>(i) - 2.0) * spec.lambda();
        // The posterior risk at outcome i is quadratic in T(y_i) with minimiser first/mass.
        r.optimal_rule[i] = first[i] / mass[i];
        r.max_rule_deviation =
            std::max(r.max_rule_deviation, std::abs(r.optimal_rule[i] - bayes_rule(r.support[i], spec.lambda())));
    }
    for (const auto& o : outcomes) {
        const double err = r.optimal_rule[static_cast<std::size_t>(o.y_multiple + 2)] - o.theta;
        r.minimal_risk += o.weight * err * err;
    }
    r.exact_risk = bayes_risk_exact(spec.epsilon(), spec.q());
    r.risk_deviation = std::abs(r.minimal_risk - r.exact_risk);
    return r;
}

RiskEstimate mc_risk(const CoordinateEstimator& estimator, const SparseModelSpec& spec, Index replicates,
                     std::uint64_t seed, NoiseFamily noise) {
    if (replicates < 2) throw ConfigError("mc_risk needs at least 2 replicates");
    const NoiseSampler sampler(noise, spec);
    std::vector<double> losses(static_cast<std::size_t>(replicates));
    detail::parallel_for(losses.size(), [&](std::size_t r) {
        auto rng = detail::make_rng(seed, kThetaStream, r);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        double total = 0.0;
        for (Index k = 0; k < spec.N(); ++k) {
            const double theta = sample_theta(unit(rng), spec.p(), spec.lambda());
            const double est = estimator(theta + sampler(rng));
            if (!std::isfinite(est)) throw EvaluationError("estimator returned a non-finite value");
            total += (est - theta) * (est - theta);
        }
        losses[r] = total / static_cast<double>(spec.N());
    });
    const Eigen::Map<const Eigen::VectorXd> v(losses.data(), replicates);
    const double mean = v.mean();
    const double var = (v.array() - mean).square().sum() / static_cast<double>(replicates - 1);
    return {mean, std::sqrt(var / static_cast<double>(replicates)), replicates};
}

CoordinateEstimator named_estimator(std::string_view name, const SparseModelSpec& spec, double K) {
    if (!(K > 0.0)) throw ConfigError("threshold factor K must be positive");
    const double lambda = spec.lambda();
    const double t = K * lambda;
    if (name == "bayes") return [lambda](double y) { return bayes_rule(y, lambda); };
    if (name == "soft") return [t](double y) { return soft(y, t); };
    if (name == "hard") return [t](double y) { return hard(y, t); };
    if (name == "half") return [](double y) { return 0.5 * y; };
    throw ConfigError("unknown estimator '" + std::string(name) + "' (expected bayes, soft, hard or half)");
}

}  // namespace haartrend
