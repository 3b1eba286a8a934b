#pragma once

// Haar-type orthonormal system for an arbitrary sample size n on the
// ordinal design x_t = t/n, t = 1..n.
//
// Dyadic intervals are I_{j,k} = ((k-1)2^-j, k 2^-j]. Their sample counts
// are obtained with integer arithmetic, so no design point is ever assigned
// to the wrong side of a dyadic boundary. Indexing of samples in the API is
// 0-based (sample t lives at position t-1); scales j and translations k use
// the conventional j >= 0, 1 <= k <= 2^j.

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "haartrend/errors.hpp"

namespace haartrend {

using Index = Eigen::Index;

/// Ordered design x_t = t/n with an optional observation vector.
class SampleGrid {
public:
    explicit SampleGrid(Index n);
    explicit SampleGrid(Eigen::VectorXd y);

    Index size() const noexcept { return n_; }
    /// Design point of the 1-based sample t.
    double x(Index t) const { return static_cast<double>(t) / static_cast<double>(n_); }
    Eigen::VectorXd design() const;

    bool has_observations() const noexcept { return y_.has_value(); }
    const Eigen::VectorXd& y() const;

private:
    Index n_;
    std::optional<Eigen::VectorXd> y_;
};

/// A member (j,k) of the index set together with its child counts
/// n_{j+1,2k-1} (left) and n_{j+1,2k} (right). `begin` is the 0-based
/// position of the first sample of the left child.
struct WaveletIndex {
    int j = 0;
    Index k = 1;
    Index n_left = 0;
    Index n_right = 0;
    Index begin = 0;

    Index mid() const noexcept { return begin + n_left; }
    Index end() const noexcept { return begin + n_left + n_right; }

    friend bool operator==(const WaveletIndex&, const WaveletIndex&) = default;
};

/// All (j,k) whose two child intervals contain at least one design point,
/// ordered scale-major, translation-minor. Always holds n - 1 entries.
class IndexSet {
public:
    explicit IndexSet(Index n);

    Index sample_size() const noexcept { return n_; }
    int finest_scale() const noexcept { return finest_; }
    Index size() const noexcept { return static_cast<Index>(entries_.size()); }

    const std::vector<WaveletIndex>& entries() const noexcept { return entries_; }
    const WaveletIndex& operator[](Index i) const { return entries_[static_cast<std::size_t>(i)]; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    /// Position of (j,k) in the scale-major order, or nullopt if (j,k) is not a member.
    std::optional<Index> position(int j, Index k) const;

    /// Half-open range of positions holding scale j.
    Index scale_begin(int j) const;
    Index scale_end(int j) const;

private:
    Index n_;
    int finest_;
    std::vector<WaveletIndex> entries_;
    std::vector<Index> scale_offsets_;
};

/// The unique J with 2^J < n <= 2^{J+1}.
int finest_scale(Index n);

/// n_{j,k}: number of t in 1..n with (k-1)2^-j < t/n <= k 2^-j.
Index interval_count(Index n, int j, Index k);

/// 0-based position of the first design point in I_{j,k}.
Index interval_begin(Index n, int j, Index k);

IndexSet index_set(Index n);

/// Two-valued sparse representation of one wavelet evaluated at the design points.
template <typename Scalar = double>
struct SparseWavelet {
    Index n = 0;
    Index begin = 0;
    Index mid = 0;
    Index end = 0;
    Scalar left_value = 0;
    Scalar right_value = 0;

    Scalar operator()(Index pos) const {
        if (pos >= begin && pos < mid) return left_value;
        if (pos >= mid && pos < end) return right_value;
        return Scalar(0);
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dense() const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> v = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(n);
        v.segment(begin, mid - begin).setConstant(left_value);
        v.segment(mid, end - mid).setConstant(right_value);
        return v;
    }
};

/// Normalisation constant sqrt(n) / sqrt(1/n_L + 1/n_R).
template <typename Scalar = double>
Scalar wavelet_scale(Index n, Index n_left, Index n_right) {
    using std::sqrt;
    const Scalar inv = Scalar(1) / Scalar(n_left) + Scalar(1) / Scalar(n_right);
    return sqrt(Scalar(n)) / sqrt(inv);
}

/// Throws IndexError unless `idx` is exactly a member of I_n.
void check_member(Index n, const WaveletIndex& idx);

/// psi_{j,k}(x_t): c/n_L on the left child, -c/n_R on the right child, 0 elsewhere.
template <typename Scalar = double>
SparseWavelet<Scalar> wavelet_values(Index n, const WaveletIndex& idx) {
    check_member(n, idx);
    const Scalar c = wavelet_scale<Scalar>(n, idx.n_left, idx.n_right);
    SparseWavelet<Scalar> w;
    w.n = n;
    w.begin = idx.begin;
    w.mid = idx.mid();
    w.end = idx.end();
    w.left_value = c / Scalar(idx.n_left);
    w.right_value = -c / Scalar(idx.n_right);
    return w;
}

/// phi_0 at the design points: a vector of ones.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scaling_values(Index n) {
    if (n < 2) throw InvalidGridError("sample size must be at least 2");
    return Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Ones(n);
}

}  // namespace haartrend
