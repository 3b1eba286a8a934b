#include "haartrend/partial_linear.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/QR>

namespace haartrend {

namespace {

constexpr double kMaxCondition = 1e12;

}  // namespace

PLMDesign build_design(Index n, Index period) {
    if (period < 1) throw ConfigError("seasonal period must be at least 1");
    // Full column rank holds exactly when n >= p + 1.
    if (n < period + 1 || n < 2) {
        throw RankError("need n >= p+1 = " + std::to_string(period + 1) + " observations, got " +
                            std::to_string(n),
                        std::numeric_limits<double>::infinity());
    }
    PLMDesign d{n, period, Eigen::MatrixXd::Zero(n, period + 1)};
    // With x_t = t/n: (x_t - mean x)/(x_n - x_1) = (t - (n+1)/2)/(n - 1).
    const double centre = 0.5 * static_cast<double>(n + 1);
    for (Index t = 1; t <= n; ++t) {
        d.X(t - 1, 0) = (static_cast<double>(t) - centre) / static_cast<double>(n - 1);
        d.X(t - 1, 1 + (t - 1) % period) = 1.0;
    }
    return d;
}

Eigen::VectorXd ols(const PLMDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y) {
    if (y.size() != design.n) {
        throw InputError("expected " + std::to_string(design.n) + " observations, got " + std::to_string(y.size()));
    }
    if (!y.allFinite()) throw InputError("observations contain non-finite values");
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design.X);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double smallest = diag.minCoeff();
    const double condition = smallest > 0.0 ? diag.maxCoeff() / smallest : std::numeric_limits<double>::infinity();
    if (qr.rank() < design.X.cols() || condition > kMaxCondition) {
        throw RankError("design matrix is singular or ill-conditioned", condition);
    }
    return qr.solve(y);
}

Eigen::VectorXd project_identifiable(const Eigen::Ref<const Eigen::VectorXd>& m, const PLMDesign& design) {
    return m - design.X * ols(design, m);
}

PLMFit fit_plm(const Eigen::Ref<const Eigen::VectorXd>& y, Index period, const ThresholdPolicy& policy) {
    const PLMDesign design = build_design(y.size(), period);
    PLMFit fit;
    fit.gamma_hat = ols(design, y);
    fit.linear_seasonal = design.X * fit.gamma_hat;

    const HaarTransform tr(y.size());
    auto coeffs = tr.analyze(Eigen::VectorXd(y - fit.linear_seasonal));
    coeffs.alpha0 = 0.0;
    fit.residual_coeffs = apply_policy(coeffs, policy);
    fit.m_hat = tr.synthesize(fit.residual_coeffs);
    return fit;
}

}  // namespace haartrend
