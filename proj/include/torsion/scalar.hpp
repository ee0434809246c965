#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>

#include <boost/multiprecision/cpp_int.hpp>

namespace torsion {

/// Exact scalar used for algebraic identity checks.
using Rational = boost::multiprecision::cpp_rational;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

/// The scalar tower: exact rationals or binary floats. Mixed arithmetic is a compile error,
/// since every container is parameterised on exactly one scalar type.
template <class S>
concept Scalar = is_exact_v<S> || std::floating_point<S>;

template <Scalar S>
inline bool is_zero(const S& v) {
    return v == S(0);
}

template <Scalar S>
inline double to_double(const S& v) {
    if constexpr (is_exact_v<S>)
        return v.template convert_to<double>();
    else
        return static_cast<double>(v);
}

template <Scalar S>
inline S factorial(int k) {
    S f(1);
    for (int i = 2; i <= k; ++i) f *= S(i);
    return f;
}

// Bit helpers shared by the exterior and Clifford engines. Index sets are bitmasks, bit i <-> generator i.
using IndexMask = std::uint32_t;

inline int popcount(IndexMask m) { return __builtin_popcount(m); }

/// Parity of the number of pairs (i in a, j in b) with i > j: the sign of sorting the concatenation a.b.
inline int merge_sign(IndexMask a, IndexMask b) {
    int swaps = 0;
    while (b) {
        const int j = __builtin_ctz(b);
        b &= b - 1;
        swaps += popcount(a >> (j + 1));
    }
    return (swaps & 1) ? -1 : 1;
}

inline IndexMask full_mask(int n) { return n >= 32 ? ~IndexMask(0) : ((IndexMask(1) << n) - 1); }

} // namespace torsion
