#pragma once

// Partially linear model Y = X gamma + m + eps: a centred linear time trend
// plus p seasonal indicators, followed by wavelet thresholding of the OLS
// residuals for the nonparametric part m.

#include <Eigen/Core>

#include "haartrend/errors.hpp"
#include "haartrend/grid_basis.hpp"
#include "haartrend/shrinkage.hpp"
#include "haartrend/transform.hpp"

namespace haartrend {

/// Design matrix with column 0 = (x_t - mean x)/(x_n - x_1) and columns 1..p the
/// seasonal indicators. Row t (1-based) belongs to season ((t - 1) mod p) + 1.
struct PLMDesign {
    Index n = 0;
    Index period = 0;
    Eigen::MatrixXd X;
};

struct PLMFit {
    Eigen::VectorXd gamma_hat;       // length p + 1
    Eigen::VectorXd linear_seasonal;  // X gamma_hat
    Eigen::VectorXd m_hat;           // thresholded residual trend
    CoefficientSet<double> residual_coeffs;  // after thresholding, alpha0 = 0

    Eigen::VectorXd fitted() const { return linear_seasonal + m_hat; }
};

/// Throws RankError unless n >= p + 1.
PLMDesign build_design(Index n, Index period);

/// Least-squares gamma via column-pivoted Householder QR. Throws RankError
/// when the design is rank deficient or its condition estimate exceeds 1e12.
Eigen::VectorXd ols(const PLMDesign& design, const Eigen::Ref<const Eigen::VectorXd>& y);

/// Orthogonal projection of m onto the complement of the design's column space,
/// so that X^T out = 0.
Eigen::VectorXd project_identifiable(const Eigen::Ref<const Eigen::VectorXd>& m, const PLMDesign& design);

/// OLS for gamma, then thresholding of the residual wavelet coefficients without the phi_0 term.
PLMFit fit_plm(const Eigen::Ref<const Eigen::VectorXd>& y, Index period, const ThresholdPolicy& policy);

}  // namespace haartrend
