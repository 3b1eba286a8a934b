#pragma once

namespace haartrend::detail {

/// Sum carried as an unevaluated pair hi + lo (Knuth's TwoSum).
template <typename Scalar>
struct CompensatedSum {
    Scalar hi{0};
    Scalar lo{0};

    Scalar value() const { return hi + lo; }

    friend CompensatedSum operator+(const CompensatedSum& a, const CompensatedSum& b) {
        const Scalar s = a.hi + b.hi;
        const Scalar bp = s - a.hi;
        const Scalar err = (a.hi - (s - bp)) + (b.hi - bp);
        return {s, err + a.lo + b.lo};
    }
};

}  // namespace haartrend::detail
