#include <doctest.h>

#include <cmath>

#include "haartrend/partial_linear.hpp"
#include "oracles.hpp"

using namespace haartrend;

TEST_CASE("design examples") {
    const auto d = build_design(4, 2);
    CHECK(d.X.rows() == 4);
    CHECK(d.X.cols() == 3);
    const Eigen::Vector4d col0(-0.5, -1.0 / 6, 1.0 / 6, 0.5);
    CHECK((d.X.col(0) - col0).cwiseAbs().maxCoeff() < 1e-15);
    CHECK(d.X.col(1) == Eigen::Vector4d(1, 0, 1, 0));
    CHECK(d.X.col(2) == Eigen::Vector4d(0, 1, 0, 1));

    const auto one = build_design(50, 1);
    CHECK(one.X.col(1) == Eigen::VectorXd::Ones(50));

    CHECK_THROWS_AS(build_design(12, 12), RankError);
    CHECK_THROWS_AS(build_design(1, 1), RankError);
    CHECK_THROWS_AS(build_design(10, 0), ConfigError);
    CHECK_NOTHROW(build_design(13, 12));
}

TEST_CASE("design invariants") {
    for (Index n : {5, 24, 122, 1000}) {
        for (Index p : {1, 2, 4, 12}) {
            if (n < p + 1) continue;
            const auto d = build_design(n, p);
            REQUIRE(std::abs(d.X.col(0).sum()) < 1e-12);
            REQUIRE(d.X(0, 0) == doctest::Approx(-0.5));
            REQUIRE(d.X(n - 1, 0) == doctest::Approx(0.5));
            for (Index t = 0; t < n; ++t) {
                REQUIRE(d.X.row(t).tail(p).sum() == 1.0);
                REQUIRE(d.X(t, 1 + t % p) == 1.0);
            }
        }
    }
    SUBCASE("normalised Gram matrix approaches its limit") {
        const Index n = 10000;
        const Index p = 12;
        const auto d = build_design(n, p);
        const Eigen::MatrixXd G = d.X.transpose() * d.X / static_cast<double>(n);
        Eigen::VectorXd diag = Eigen::VectorXd::Constant(p + 1, 1.0 / p);
        diag(0) = 1.0 / 12;
        CHECK((G - Eigen::MatrixXd(diag.asDiagonal())).cwiseAbs().maxCoeff() <= 0.02);
    }
}

TEST_CASE("least squares") {
    const auto d = build_design(200, 4);
    const Eigen::VectorXd g0 = (Eigen::VectorXd(5) << 2.0, -1.0, 0.5, 0.25, 3.0).finished();

    SUBCASE("exact recovery") {
        CHECK((ols(d, d.X * g0) - g0).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("identifiable trend does not bias the fit") {
        const Eigen::VectorXd m = project_identifiable(oracle::gaussian(200, 3), d);
        CHECK((ols(d, d.X * g0 + m) - g0).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("rank deficiency") {
        PLMDesign bad = d;
        bad.X.col(2) = bad.X.col(1);
        try {
            ols(bad, d.X * g0);
            FAIL("expected a rank error");
        } catch (const RankError& e) {
            CHECK(e.condition() > 1e12);
        }
    }
    SUBCASE("input errors") {
        CHECK_THROWS_AS(ols(d, Eigen::VectorXd::Zero(199)), InputError);
        Eigen::VectorXd y = d.X * g0;
        y(7) = std::nan("");
        CHECK_THROWS_AS(ols(d, y), InputError);
    }
}

TEST_CASE("projection onto the identifiable complement") {
    const auto d = build_design(130, 12);
    const Eigen::VectorXd m = oracle::gaussian(130, 21);
    const Eigen::VectorXd pm = project_identifiable(m, d);
    CHECK((d.X.transpose() * pm).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK((project_identifiable(pm, d) - pm).cwiseAbs().maxCoeff() <= 1e-12);
    for (Index c = 0; c < d.X.cols(); ++c) {
        CHECK(project_identifiable(d.X.col(c), d).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("partially linear fit") {
    const Index n = 240;
    const Index p = 12;
    const auto d = build_design(n, p);
    Eigen::VectorXd g0(p + 1);
    for (Index i = 0; i <= p; ++i) g0(i) = std::sin(1.0 + static_cast<double>(i));

    SUBCASE("purely parametric input") {
        const auto fit = fit_plm(d.X * g0, p, ThresholdPolicy(ShrinkageRule::soft(0.1), n));
        CHECK((fit.gamma_hat - g0).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(fit.m_hat.cwiseAbs().maxCoeff() < 1e-10);
        CHECK((fit.fitted() - d.X * g0).cwiseAbs().maxCoeff() < 1e-10);
    }
    SUBCASE("noiseless step is recovered at kept scales") {
        Eigen::VectorXd step(n);
        for (Index t = 1; t <= n; ++t) step(t - 1) = 3.0 * static_cast<double>(t) > static_cast<double>(n) ? 1.0 : 0.0;
        const Eigen::VectorXd m0 = project_identifiable(step, d);
        const ThresholdPolicy policy(ShrinkageRule::soft(1e-3), n);
        const auto fit = fit_plm(d.X * g0 + m0, p, policy);
        CHECK((fit.gamma_hat - g0).cwiseAbs().maxCoeff() < 1e-10);
        CHECK(fit.residual_coeffs.alpha0 == 0.0);

        const auto c0 = analyze(m0);
        const auto& idx = *c0.index;
        for (int j = 0; j <= idx.finest_scale(); ++j) {
            const double tol = j < policy.critical_scale() ? 1e-10 : policy.threshold(j) + 1e-10;
            for (Index i = idx.scale_begin(j); i < idx.scale_end(j); ++i) {
                REQUIRE(std::abs(fit.residual_coeffs.betas(i) - c0.betas(i)) <= tol);
            }
        }
        CHECK((fit.m_hat - m0).cwiseAbs().maxCoeff() < 0.05);
    }
    SUBCASE("seasonal-free centred input reduces to plain thresholding") {
        const auto d1 = build_design(n, 1);
        const Eigen::VectorXd y = project_identifiable(oracle::gaussian(n, 5), d1);
        const ThresholdPolicy policy(ShrinkageRule::hard(0.2), n);
        const auto fit = fit_plm(y, 1, policy);
        CHECK(fit.gamma_hat.cwiseAbs().maxCoeff() < 1e-12);
        CHECK((fit.m_hat - estimate_trend(y, policy)).cwiseAbs().maxCoeff() < 1e-12);
    }
    SUBCASE("propagated errors") {
        CHECK_THROWS_AS(fit_plm(Eigen::VectorXd::Ones(10), 12, ThresholdPolicy(ShrinkageRule::soft(0.1), 10)),
                        RankError);
        CHECK_THROWS_AS(fit_plm(Eigen::VectorXd::Ones(30), 4, ThresholdPolicy(ShrinkageRule::soft(0.1), 31)),
                        ConfigError);
    }
}

TEST_CASE("least squares is unbiased under symmetric noise") {
    const Index n = 256;
    const Index p = 4;
    const auto d = build_design(n, p);
    const Eigen::VectorXd g0 = (Eigen::VectorXd(p + 1) << 1.5, 0.2, -0.4, 0.1, 0.7).finished();
    const int reps = 400;
    Eigen::MatrixXd est(p + 1, reps);
    for (int r = 0; r < reps; ++r) {
        est.col(r) = ols(d, d.X * g0 + oracle::gaussian(n, 1000 + static_cast<std::uint64_t>(r), 0.5));
    }
    for (Index i = 0; i <= p; ++i) {
        std::vector<double> v;
        for (int r = 0; r < reps; ++r) v.push_back(est(i, r));
        CHECK(std::abs(oracle::mean(v) - g0(i)) <= 3 * oracle::std_error(v));
    }
}
