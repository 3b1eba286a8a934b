#pragma once

// Analysis and synthesis between sample space and the coefficient space of
// the Haar-type basis. Both directions run over the dyadic interval tree down
// to the level J_n + 1, where every interval holds at most one design point:
// analysis aggregates child sums bottom-up, synthesis pushes per-interval
// additive constants top-down. Work is O(n) per transform.

#include <cmath>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Core>

#include "haartrend/detail/compensated.hpp"
#include "haartrend/errors.hpp"
#include "haartrend/grid_basis.hpp"

namespace haartrend {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// alpha_0 plus one beta per member of I_n, stored in the scale-major order of the index set.
template <typename Scalar = double>
struct CoefficientSet {
    std::shared_ptr<const IndexSet> index;
    Scalar alpha0{0};
    Vector<Scalar> betas;

    Index sample_size() const { return index ? index->sample_size() : 0; }

    Scalar beta(int j, Index k) const {
        const auto pos = index->position(j, k);
        if (!pos) throw IndexError("(" + std::to_string(j) + "," + std::to_string(k) + ") is not in the index set");
        return betas(*pos);
    }

    /// alpha0^2 + sum of beta^2; equals the mean square of the synthesized series.
    Scalar energy() const { return alpha0 * alpha0 + betas.squaredNorm(); }

    static CoefficientSet zeros(std::shared_ptr<const IndexSet> idx) {
        CoefficientSet c;
        c.betas = Vector<Scalar>::Zero(idx->size());
        c.index = std::move(idx);
        return c;
    }

    static CoefficientSet zeros(Index n) { return zeros(std::make_shared<const IndexSet>(n)); }

    /// Builds a set from explicit (j, k, beta) triples; the key set must equal I_n exactly.
    static CoefficientSet from_entries(Index n, Scalar alpha0,
                                       const std::vector<std::tuple<int, Index, Scalar>>& entries) {
        auto idx = std::make_shared<const IndexSet>(n);
        if (static_cast<Index>(entries.size()) != idx->size()) {
            throw StructuralError("expected " + std::to_string(idx->size()) + " wavelet coefficients for n=" +
                                  std::to_string(n) + ", got " + std::to_string(entries.size()));
        }
        CoefficientSet c = zeros(idx);
        c.alpha0 = alpha0;
        std::vector<bool> seen(static_cast<std::size_t>(idx->size()), false);
        for (const auto& [j, k, b] : entries) {
            const auto pos = idx->position(j, k);
            if (!pos || seen[static_cast<std::size_t>(*pos)]) {
                throw StructuralError("unexpected or duplicate key (" + std::to_string(j) + "," + std::to_string(k) +
                                      ") for n=" + std::to_string(n));
            }
            seen[static_cast<std::size_t>(*pos)] = true;
            c.betas(*pos) = b;
        }
        return c;
    }
};

/// Both sides of the isometry: mean squared gap at the sample points and squared coefficient gap.
template <typename Scalar = double>
struct EnergyGap {
    Scalar sample_space{0};
    Scalar coefficient_space{0};
};

/// Transform bound to one sample size; holds the shared index set.
class HaarTransform {
public:
    explicit HaarTransform(Index n) : index_(std::make_shared<const IndexSet>(n)) {}
    explicit HaarTransform(std::shared_ptr<const IndexSet> index) : index_(std::move(index)) {}

    Index sample_size() const noexcept { return index_->sample_size(); }
    const std::shared_ptr<const IndexSet>& index() const noexcept { return index_; }

    template <typename Derived>
    CoefficientSet<typename Derived::Scalar> analyze(const Eigen::MatrixBase<Derived>& y) const {
        using Scalar = typename Derived::Scalar;
        using Sum = detail::CompensatedSum<Scalar>;
        const Index n = index_->sample_size();
        if (y.cols() != 1) throw InputError("observations must form a column vector");
        if (y.rows() != n) {
            throw InputError("expected " + std::to_string(n) + " observations, got " + std::to_string(y.rows()));
        }
        if (!y.allFinite()) throw InputError("observations contain non-finite values");

        const int finest = index_->finest_scale();
        std::vector<Sum> level = leaf_layout<Sum>([&](Index pos) { return Sum{Scalar(y(pos)), Scalar(0)}; });

        CoefficientSet<Scalar> out = CoefficientSet<Scalar>::zeros(index_);
        const Scalar root_n = std::sqrt(Scalar(n));
        for (int j = finest; j >= 0; --j) {
            for (Index p = index_->scale_begin(j); p < index_->scale_end(j); ++p) {
                const WaveletIndex& e = (*index_)[p];
                const Scalar left = level[static_cast<std::size_t>(2 * e.k - 2)].value() / Scalar(e.n_left);
                const Scalar right = level[static_cast<std::size_t>(2 * e.k - 1)].value() / Scalar(e.n_right);
                const Scalar norm = std::sqrt(Scalar(1) / Scalar(e.n_left) + Scalar(1) / Scalar(e.n_right));
                out.betas(p) = (left - right) / (root_n * norm);
            }
            std::vector<Sum> parent(level.size() / 2);
            for (std::size_t k = 0; k < parent.size(); ++k) parent[k] = level[2 * k] + level[2 * k + 1];
            level = std::move(parent);
        }
        out.alpha0 = level.front().value() / Scalar(n);
        return out;
    }

    template <typename Scalar>
    Vector<Scalar> synthesize(const CoefficientSet<Scalar>& coeffs) const {
        check_keys(coeffs);
        const Index n = index_->sample_size();
        const int finest = index_->finest_scale();

        std::vector<Scalar> offset{coeffs.alpha0};
        for (int j = 0; j <= finest; ++j) {
            std::vector<Scalar> child(offset.size() * 2);
            for (std::size_t k = 0; k < offset.size(); ++k) child[2 * k] = child[2 * k + 1] = offset[k];
            for (Index p = index_->scale_begin(j); p < index_->scale_end(j); ++p) {
                const WaveletIndex& e = (*index_)[p];
                const Scalar c = wavelet_scale<Scalar>(n, e.n_left, e.n_right) * coeffs.betas(p);
                child[static_cast<std::size_t>(2 * e.k - 2)] += c / Scalar(e.n_left);
                child[static_cast<std::size_t>(2 * e.k - 1)] -= c / Scalar(e.n_right);
            }
            offset = std::move(child);
        }

        Vector<Scalar> y(n);
        const int leaf = finest + 1;
        for (Index k = 1; k <= (Index(1) << leaf); ++k) {
            const Index b = interval_begin(n, leaf, k);
            if (interval_count(n, leaf, k) == 1) y(b) = offset[static_cast<std::size_t>(k - 1)];
        }
        return y;
    }

    template <typename Scalar>
    void check_keys(const CoefficientSet<Scalar>& coeffs) const {
        if (!coeffs.index) throw StructuralError("coefficient set has no index");
        if (coeffs.index != index_ && coeffs.index->sample_size() != index_->sample_size()) {
            throw StructuralError("coefficient set belongs to n=" + std::to_string(coeffs.index->sample_size()) +
                                  ", transform to n=" + std::to_string(index_->sample_size()));
        }
        if (coeffs.betas.size() != index_->size()) {
            throw StructuralError("expected " + std::to_string(index_->size()) + " wavelet coefficients, got " +
                                  std::to_string(coeffs.betas.size()));
        }
    }

private:
    // Values of the finest-level intervals; every interval holds at most one point.
    template <typename Value, typename Fn>
    std::vector<Value> leaf_layout(Fn&& at) const {
        const Index n = index_->sample_size();
        const int leaf = index_->finest_scale() + 1;
        std::vector<Value> out(static_cast<std::size_t>(Index(1) << leaf));
        for (Index k = 1; k <= (Index(1) << leaf); ++k) {
            if (interval_count(n, leaf, k) == 1) out[static_cast<std::size_t>(k - 1)] = at(interval_begin(n, leaf, k));
        }
        return out;
    }

    std::shared_ptr<const IndexSet> index_;
};

/// Empirical coefficients alpha0 = mean(y), beta_{j,k} = (1/n) sum_t psi_{j,k}(x_t) y_t.
template <typename Derived>
CoefficientSet<typename Derived::Scalar> analyze(const Eigen::MatrixBase<Derived>& y) {
    if (y.rows() < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(y.rows()));
    return HaarTransform(y.rows()).analyze(y);
}

inline CoefficientSet<double> analyze(const SampleGrid& grid) {
    if (!grid.has_observations()) throw InputError("sample grid carries no observations");
    return HaarTransform(grid.size()).analyze(grid.y());
}

template <typename Scalar>
Vector<Scalar> synthesize(const CoefficientSet<Scalar>& coeffs) {
    if (!coeffs.index) throw StructuralError("coefficient set has no index");
    return HaarTransform(coeffs.index).synthesize(coeffs);
}

/// Isometry check for two series of equal length.
template <typename DerivedA, typename DerivedB>
EnergyGap<typename DerivedA::Scalar> energy_gap(const Eigen::MatrixBase<DerivedA>& a,
                                                const Eigen::MatrixBase<DerivedB>& b) {
    using Scalar = typename DerivedA::Scalar;
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw InputError("energy_gap: length mismatch");
    const HaarTransform tr(a.rows());
    const auto ca = tr.analyze(a);
    const auto cb = tr.analyze(b);
    const Scalar da = ca.alpha0 - cb.alpha0;
    return {(a - b).squaredNorm() / Scalar(a.rows()), da * da + (ca.betas - cb.betas).squaredNorm()};
}

/// Isometry check for two coefficient sets over the same index set.
template <typename Scalar>
EnergyGap<Scalar> energy_gap(const CoefficientSet<Scalar>& a, const CoefficientSet<Scalar>& b) {
    if (a.sample_size() != b.sample_size() || a.betas.size() != b.betas.size()) {
        throw InputError("energy_gap: coefficient sets of different sample sizes");
    }
    const HaarTransform tr(a.index);
    const Scalar da = a.alpha0 - b.alpha0;
    const Vector<Scalar> diff = tr.synthesize(a) - tr.synthesize(b);
    return {diff.squaredNorm() / Scalar(diff.size()), da * da + (a.betas - b.betas).squaredNorm()};
}

}  // namespace haartrend
