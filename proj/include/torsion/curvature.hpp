#pragma once

// Orthonormal-frame curvature data at a point, and the curvature elements of the
// bi-graded algebra built from it.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "torsion/exterior.hpp"

namespace torsion {

/// R_ijkl = <R(e_k, e_l) e_j, e_i> (so R_0101 is the sectional curvature of the 01-plane) and,
/// at boundary points, the second fundamental form h_ab with a, b in 1..n-1.
template <Scalar S>
struct CurvatureData {
    int n = 0;
    std::vector<S> riemann; // n^4, row-major in (i,j,k,l)
    std::vector<S> second_fundamental; // n^2; row/column 0 unused

    CurvatureData() = default;
    explicit CurvatureData(int dim) : n(dim), riemann(std::size_t(dim) * dim * dim * dim, S(0)), second_fundamental(std::size_t(dim) * dim, S(0)) {
        check_dimension(dim);
    }

    S& R(int i, int j, int k, int l) { return riemann[((std::size_t(i) * n + j) * n + k) * n + l]; }
    const S& R(int i, int j, int k, int l) const { return riemann[((std::size_t(i) * n + j) * n + k) * n + l]; }
    S& h(int a, int b) { return second_fundamental[std::size_t(a) * n + b]; }
    const S& h(int a, int b) const { return second_fundamental[std::size_t(a) * n + b]; }

    /// Set R_ijkl and every entry of its orbit under the pair antisymmetries and pair exchange.
    void set_orbit(int i, int j, int k, int l, const S& v) {
        R(i, j, k, l) = v;
        R(j, i, k, l) = -v;
        R(i, j, l, k) = -v;
        R(j, i, l, k) = v;
        R(k, l, i, j) = v;
        R(l, k, i, j) = -v;
        R(k, l, j, i) = -v;
        R(l, k, j, i) = v;
    }

    /// Largest violation of R_ijkl = −R_jikl = −R_ijlk = R_klij.
    double symmetry_residual() const {
        double worst = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l) {
                        const double r = to_double(R(i, j, k, l));
                        worst = std::max({worst, std::abs(r + to_double(R(j, i, k, l))),
                                          std::abs(r + to_double(R(i, j, l, k))),
                                          std::abs(r - to_double(R(k, l, i, j)))});
                    }
        return worst;
    }

    /// Largest violation of R_ijkl + R_iklj + R_iljk = 0.
    double bianchi_residual() const {
        double worst = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        worst = std::max(worst, std::abs(to_double(S(R(i, j, k, l) + R(i, k, l, j) + R(i, l, j, k)))));
        return worst;
    }

    double h_symmetry_residual() const {
        double worst = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) worst = std::max(worst, std::abs(to_double(S(h(a, b) - h(b, a)))));
        return worst;
    }

    /// Orthogonal projection onto algebraic curvature tensors (pair symmetries, then Bianchi),
    /// and symmetrization of h.
    void project_symmetries() {
        CurvatureData sym(n);
        const S eighth = S(1) / S(8);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        sym.R(i, j, k, l) = eighth * (R(i, j, k, l) - R(j, i, k, l) - R(i, j, l, k) + R(j, i, l, k) +
                                                      R(k, l, i, j) - R(l, k, i, j) - R(k, l, j, i) + R(l, k, j, i));
        // Remove the totally antisymmetric part, which is what violates Bianchi for pair-symmetric tensors.
        const S third = S(1) / S(3);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                for (int k = 0; k < n; ++k)
                    for (int l = 0; l < n; ++l)
                        R(i, j, k, l) = sym.R(i, j, k, l) - third * (sym.R(i, j, k, l) + sym.R(i, k, l, j) + sym.R(i, l, j, k));
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b) {
                const S m = (h(a, b) + h(b, a)) / S(2);
                h(a, b) = m;
                h(b, a) = m;
            }
        for (int i = 0; i < n; ++i) {
            h(0, i) = S(0);
            h(i, 0) = S(0);
        }
    }

    template <Scalar T>
    CurvatureData<T> convert() const {
        if constexpr (std::is_same_v<T, S>) {
            return *this;
        } else {
            CurvatureData<T> out(n);
            for (std::size_t i = 0; i < riemann.size(); ++i) out.riemann[i] = T(to_double(riemann[i]));
            for (std::size_t i = 0; i < second_fundamental.size(); ++i) out.second_fundamental[i] = T(to_double(second_fundamental[i]));
            return out;
        }
    }
};

/// Kulkarni–Nomizu product of two symmetric matrices; always an algebraic curvature tensor.
template <Scalar S>
void add_kulkarni_nomizu(CurvatureData<S>& cd, const std::vector<S>& a, const std::vector<S>& b) {
    const int n = cd.n;
    auto A = [&](int i, int j) { return a[std::size_t(i) * n + j]; };
    auto B = [&](int i, int j) { return b[std::size_t(i) * n + j]; };
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l)
                    cd.R(i, j, k, l) += A(i, k) * B(j, l) + A(j, l) * B(i, k) - A(i, l) * B(j, k) - A(j, k) * B(i, l);
}

/// Seeded draw of an algebraic curvature tensor (small integer entries, so exact in rational mode)
/// and of a symmetric second fundamental form.
template <Scalar S>
CurvatureData<S> random_curvature(int n, std::mt19937_64& rng, int terms = 3) {
    CurvatureData<S> cd(n);
    std::uniform_int_distribution<int> dist(-3, 3);
    auto symmetric = [&] {
        std::vector<S> m(std::size_t(n) * n, S(0));
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                const S v(dist(rng));
                m[std::size_t(i) * n + j] = v;
                m[std::size_t(j) * n + i] = v;
            }
        return m;
    };
    for (int t = 0; t < terms; ++t) add_kulkarni_nomizu(cd, symmetric(), symmetric());
    for (int a = 1; a < n; ++a)
        for (int b = a; b < n; ++b) {
            const S v(dist(rng));
            cd.h(a, b) = v;
            cd.h(b, a) = v;
        }
    return cd;
}

/// Seeded draw with only the pair symmetries (no Bianchi), as used for the commutator identity.
template <Scalar S>
CurvatureData<S> random_pair_symmetric(int n, std::mt19937_64& rng) {
    CurvatureData<S> cd(n);
    std::uniform_int_distribution<int> dist(-4, 4);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = k + 1; l < n; ++l)
                    if (i * n + j <= k * n + l) cd.set_orbit(i, j, k, l, S(dist(rng)));
    return cd;
}

/// 𝓡 = ⅛ R_ijkl e^i e^j ê^k ê^l
template <Scalar S>
BiGradedElement<S> curvature_element(const CurvatureData<S>& cd) {
    const int n = cd.n;
    BiGradedElement<S> out(n);
    const S eighth = S(1) / S(8);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k)
                for (int l = 0; l < n; ++l) {
                    const S& r = cd.R(i, j, k, l);
                    if (i == j || k == l || is_zero(r)) continue;
                    out += wedge(wedge(BiGradedElement<S>::e(n, i), BiGradedElement<S>::e(n, j)),
                                 wedge(BiGradedElement<S>::ehat(n, k), BiGradedElement<S>::ehat(n, l))) *
                           (eighth * r);
                }
    return out;
}

/// 𝓡_0 = ¼ R_0jkl e^0 e^j ê^k ê^l
template <Scalar S>
BiGradedElement<S> normal_curvature_element(const CurvatureData<S>& cd) {
    const int n = cd.n;
    BiGradedElement<S> out(n);
    const S quarter = S(1) / S(4);
    for (int j = 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                const S& r = cd.R(0, j, k, l);
                if (k == l || is_zero(r)) continue;
                out += wedge(wedge(BiGradedElement<S>::e(n, 0), BiGradedElement<S>::e(n, j)),
                             wedge(BiGradedElement<S>::ehat(n, k), BiGradedElement<S>::ehat(n, l))) *
                       (quarter * r);
            }
    return out;
}

/// 𝓡'_0 = ¼ R_0jkl e^j ê^k ê^l, so that 𝓡_0 = e^0 ∧ 𝓡'_0.
template <Scalar S>
BiGradedElement<S> normal_curvature_element_reduced(const CurvatureData<S>& cd) {
    const int n = cd.n;
    BiGradedElement<S> out(n);
    const S quarter = S(1) / S(4);
    for (int j = 1; j < n; ++j)
        for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
                const S& r = cd.R(0, j, k, l);
                if (k == l || is_zero(r)) continue;
                out += wedge(BiGradedElement<S>::e(n, j), wedge(BiGradedElement<S>::ehat(n, k), BiGradedElement<S>::ehat(n, l))) *
                       (quarter * r);
            }
    return out;
}

/// h_ab e^a ∧ ê^b, a, b in 1..n-1.
template <Scalar S>
BiGradedElement<S> second_fundamental_element(const CurvatureData<S>& cd) {
    const int n = cd.n;
    BiGradedElement<S> out(n);
    for (int a = 1; a < n; ++a)
        for (int b = 1; b < n; ++b)
            if (!is_zero(cd.h(a, b)))
                out += wedge(BiGradedElement<S>::e(n, a), BiGradedElement<S>::ehat(n, b)) * cd.h(a, b);
    return out;
}

} // namespace torsion
