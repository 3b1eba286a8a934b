#include <doctest.h>

#include <cmath>
#include <random>

#include "haartrend/grid_basis.hpp"
#include "oracles.hpp"

using namespace haartrend;

TEST_CASE("finest scale brackets n between consecutive powers of two") {
    CHECK(finest_scale(2) == 0);
    CHECK(finest_scale(1000) == 9);
    CHECK(finest_scale(1024) == 9);
    CHECK(finest_scale(1025) == 10);
    CHECK_THROWS_AS(finest_scale(1), InvalidGridError);
    CHECK_THROWS_AS(finest_scale(0), InvalidGridError);
    for (Index n = 2; n < 5000; ++n) {
        const int J = finest_scale(n);
        REQUIRE(std::ldexp(1.0, J) < static_cast<double>(n));
        REQUIRE(static_cast<double>(n) <= std::ldexp(1.0, J + 1));
    }
}

TEST_CASE("interval counts") {
    CHECK(interval_count(6, 1, 1) == 3);
    CHECK(interval_count(3, 2, 1) == 0);
    for (Index n : {2, 7, 100, 1023}) CHECK(interval_count(n, 0, 1) == n);
    CHECK_THROWS_AS(interval_count(10, 2, 0), IndexError);
    CHECK_THROWS_AS(interval_count(10, 2, 5), IndexError);
    CHECK_THROWS_AS(interval_count(10, -1, 1), IndexError);

    SUBCASE("agree with rational membership and satisfy the count bounds") {
        for (Index n : {2, 3, 5, 6, 17, 100, 257, 1000}) {
            for (int j = 0; j <= finest_scale(n) + 1; ++j) {
                const double per = static_cast<double>(n) / std::ldexp(1.0, j);
                for (Index k = 1; k <= (Index(1) << j); ++k) {
                    Index brute = 0;
                    for (long t = 1; t <= n; ++t) brute += oracle::in_interval(t, n, j, k);
                    const Index c = interval_count(n, j, k);
                    REQUIRE(c == brute);
                    REQUIRE(static_cast<double>(c) >= std::floor(per));
                    REQUIRE(static_cast<double>(c) < per + 1.0);
                    if (per == std::floor(per)) REQUIRE(static_cast<double>(c) == per);
                }
            }
        }
    }

    SUBCASE("stay exact when t/n lands on a dyadic boundary") {
        // n = 3 * 2^40: t = 3 sits exactly on 2^-40 and t = n/2 on 1/2.
        const Index n = Index(3) << 40;
        CHECK(interval_count(n, 1, 1) == n / 2);
        CHECK(interval_count(n, 1, 2) == n / 2);
        CHECK(interval_count(n, 40, 1) == 3);
    }
}

TEST_CASE("index set examples") {
    auto pairs = [](Index n) {
        std::vector<std::pair<int, Index>> out;
        for (const auto& e : index_set(n)) out.emplace_back(e.j, e.k);
        return out;
    };
    CHECK(pairs(2) == std::vector<std::pair<int, Index>>{{0, 1}});
    CHECK(pairs(3) == std::vector<std::pair<int, Index>>{{0, 1}, {1, 2}});
    CHECK(pairs(4) == std::vector<std::pair<int, Index>>{{0, 1}, {1, 1}, {1, 2}});
    CHECK_THROWS_AS(index_set(1), InvalidGridError);
}

TEST_CASE("index set matches brute-force enumeration") {
    for (Index n = 2; n <= 160; ++n) {
        const auto idx = index_set(n);
        const auto basis = oracle::dense_basis(n);
        REQUIRE(idx.size() == n - 1);
        REQUIRE(static_cast<Index>(basis.size()) == n - 1);
        for (Index i = 0; i < idx.size(); ++i) {
            REQUIRE(idx[i].j == basis[static_cast<std::size_t>(i)].j);
            REQUIRE(idx[i].k == basis[static_cast<std::size_t>(i)].k);
            REQUIRE(idx.position(idx[i].j, idx[i].k) == i);
        }
    }
}

TEST_CASE("index set cardinality and structure over a wide range of n") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<Index> pick(2, 100000);
    std::vector<Index> sizes;
    for (Index n = 2; n <= 600; ++n) sizes.push_back(n);
    for (int i = 0; i < 30; ++i) sizes.push_back(pick(rng));
    for (Index n : sizes) {
        const auto idx = index_set(n);
        REQUIRE(idx.size() == n - 1);
        REQUIRE(idx.finest_scale() == finest_scale(n));
        for (const auto& e : idx) {
            REQUIRE(e.j <= idx.finest_scale());
            REQUIRE(e.n_left >= 1);
            REQUIRE(e.n_right >= 1);
            REQUIRE(e.n_left == interval_count(n, e.j + 1, 2 * e.k - 1));
            REQUIRE(e.n_right == interval_count(n, e.j + 1, 2 * e.k));
            const double half = static_cast<double>(n) / std::ldexp(1.0, e.j + 1);
            REQUIRE(static_cast<double>(e.n_left) >= std::floor(half));
            REQUIRE(static_cast<double>(e.n_right) < half + 1.0);
        }
    }
    CHECK_FALSE(index_set(10).position(5, 1).has_value());
    CHECK_FALSE(index_set(3).position(1, 1).has_value());
}

TEST_CASE("wavelet values examples") {
    const auto w3 = wavelet_values<double>(3, index_set(3)[0]).dense();
    CHECK(w3(0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(w3(1) == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));
    CHECK(w3(2) == doctest::Approx(-std::sqrt(2.0) / 2).epsilon(1e-15));

    const auto w4 = wavelet_values<double>(4, index_set(4)[0]).dense();
    CHECK((w4 - Eigen::Vector4d(1, 1, -1, -1)).cwiseAbs().maxCoeff() < 1e-15);

    CHECK_THROWS_AS(wavelet_values<double>(3, WaveletIndex{1, 1, 0, 1, 0}), IndexError);
    CHECK_THROWS_AS(wavelet_values<double>(4, WaveletIndex{0, 1, 1, 3, 0}), IndexError);
}

TEST_CASE("wavelets are normalised, centred and equal the dense oracle") {
    for (Index n : {2, 3, 5, 11, 64, 99, 130}) {
        const auto idx = index_set(n);
        const auto basis = oracle::dense_basis(n);
        for (Index i = 0; i < idx.size(); ++i) {
            const Eigen::VectorXd v = wavelet_values<double>(n, idx[i]).dense();
            REQUIRE((v - basis[static_cast<std::size_t>(i)].values).cwiseAbs().maxCoeff() < 1e-12);
            REQUIRE(std::abs(v.squaredNorm() / static_cast<double>(n) - 1.0) < 1e-12);
            REQUIRE(std::abs(v.sum() / static_cast<double>(n)) < 1e-12);
        }
    }
}

TEST_CASE("dense Gram matrix is the identity for small n") {
    for (Index n = 2; n <= 96; ++n) {
        Eigen::MatrixXd B(n, n);
        B.col(0) = scaling_values<double>(n);
        const auto idx = index_set(n);
        for (Index i = 0; i < idx.size(); ++i) B.col(i + 1) = wavelet_values<double>(n, idx[i]).dense();
        const Eigen::MatrixXd G = B.transpose() * B / static_cast<double>(n);
        REQUIRE((G - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("scaling values") {
    CHECK(scaling_values<double>(2) == Eigen::Vector2d(1, 1));
    CHECK(scaling_values<double>(5) == Eigen::VectorXd::Ones(5));
    CHECK_THROWS_AS(scaling_values<double>(1), InvalidGridError);
}

TEST_CASE("sample grid") {
    const SampleGrid g(8);
    CHECK(g.size() == 8);
    CHECK(g.x(1) == 0.125);
    CHECK(g.x(8) == 1.0);
    const auto x = g.design();
    for (Index t = 1; t < x.size(); ++t) CHECK(x(t) > x(t - 1));
    CHECK_FALSE(g.has_observations());
    CHECK_THROWS_AS(g.y(), InputError);
    CHECK_THROWS_AS(SampleGrid(1), InvalidGridError);
    CHECK_THROWS_AS(SampleGrid(Eigen::VectorXd::Zero(1)), InvalidGridError);
    CHECK(SampleGrid(Eigen::VectorXd::Ones(3)).y().sum() == 3.0);
}

TEST_CASE("float instantiation") {
    const auto w = wavelet_values<float>(3, index_set(3)[0]);
    CHECK(w.left_value == doctest::Approx(std::sqrt(2.0f)));
    CHECK(wavelet_scale<long double>(4, 2, 2) == doctest::Approx(2.0));
}
