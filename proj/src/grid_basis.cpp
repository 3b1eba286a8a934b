#include "haartrend/grid_basis.hpp"

#include <algorithm>
#include <bit>
#include <string>

namespace haartrend {

namespace {

constexpr int kMaxScale = 62;

__extension__ using u128 = unsigned __int128;

// floor(k * n / 2^j) without overflow.
Index scaled_floor(Index n, int j, Index k) {
    const auto prod = static_cast<u128>(k) * static_cast<u128>(n);
    return static_cast<Index>(prod >> j);
}

void check_interval(int j, Index k) {
    if (j < 0 || j > kMaxScale) throw IndexError("scale out of range: j=" + std::to_string(j));
    if (k < 1 || k > (Index(1) << j)) {
        throw IndexError("translation out of range: j=" + std::to_string(j) + ", k=" + std::to_string(k));
    }
}

}  // namespace

SampleGrid::SampleGrid(Index n) : n_(n) {
    if (n < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(n));
}

SampleGrid::SampleGrid(Eigen::VectorXd y) : n_(y.size()), y_(std::move(y)) {
    if (n_ < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(n_));
}

Eigen::VectorXd SampleGrid::design() const {
    return Eigen::VectorXd::LinSpaced(n_, 1.0, static_cast<double>(n_)) / static_cast<double>(n_);
}

const Eigen::VectorXd& SampleGrid::y() const {
    if (!y_) throw InputError("sample grid carries no observations");
    return *y_;
}

int finest_scale(Index n) {
    if (n < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(n));
    return static_cast<int>(std::bit_width(static_cast<std::uint64_t>(n - 1))) - 1;
}

Index interval_begin(Index n, int j, Index k) {
    check_interval(j, k);
    return scaled_floor(n, j, k - 1);
}

Index interval_count(Index n, int j, Index k) {
    if (n < 1) throw InvalidGridError("sample size must be positive");
    check_interval(j, k);
    return scaled_floor(n, j, k) - scaled_floor(n, j, k - 1);
}

IndexSet::IndexSet(Index n) : n_(n), finest_(haartrend::finest_scale(n)) {
    entries_.reserve(static_cast<std::size_t>(n - 1));
    scale_offsets_.reserve(static_cast<std::size_t>(finest_) + 2);
    for (int j = 0; j <= finest_; ++j) {
        scale_offsets_.push_back(static_cast<Index>(entries_.size()));
        const Index intervals = Index(1) << j;
        for (Index k = 1; k <= intervals; ++k) {
            const Index lo = scaled_floor(n, j + 1, 2 * k - 2);
            const Index mid = scaled_floor(n, j + 1, 2 * k - 1);
            const Index hi = scaled_floor(n, j + 1, 2 * k);
            if (mid > lo && hi > mid) entries_.push_back({j, k, mid - lo, hi - mid, lo});
        }
    }
    scale_offsets_.push_back(static_cast<Index>(entries_.size()));
}

std::optional<Index> IndexSet::position(int j, Index k) const {
    if (j < 0 || j > finest_) return std::nullopt;
    const auto first = entries_.begin() + scale_begin(j);
    const auto last = entries_.begin() + scale_end(j);
    const auto it = std::lower_bound(first, last, k, [](const WaveletIndex& e, Index key) { return e.k < key; });
    if (it == last || it->k != k) return std::nullopt;
    return static_cast<Index>(it - entries_.begin());
}

Index IndexSet::scale_begin(int j) const {
    if (j < 0 || j > finest_) throw IndexError("scale out of range: j=" + std::to_string(j));
    return scale_offsets_[static_cast<std::size_t>(j)];
}

Index IndexSet::scale_end(int j) const {
    if (j < 0 || j > finest_) throw IndexError("scale out of range: j=" + std::to_string(j));
    return scale_offsets_[static_cast<std::size_t>(j) + 1];
}

IndexSet index_set(Index n) { return IndexSet(n); }

void check_member(Index n, const WaveletIndex& idx) {
    if (n < 2) throw InvalidGridError("sample size must be at least 2, got " + std::to_string(n));
    check_interval(idx.j, idx.k);
    const auto where = " (j=" + std::to_string(idx.j) + ", k=" + std::to_string(idx.k) + ")";
    if (idx.j > finest_scale(n)) throw IndexError("scale finer than J_n" + where);
    const Index left = interval_count(n, idx.j + 1, 2 * idx.k - 1);
    const Index right = interval_count(n, idx.j + 1, 2 * idx.k);
    if (left < 1 || right < 1) throw IndexError("not a member of the index set" + where);
    if (idx.n_left != left || idx.n_right != right || idx.begin != interval_begin(n, idx.j + 1, 2 * idx.k - 1)) {
        throw IndexError("child counts do not match the design" + where);
    }
}

}  // namespace haartrend
