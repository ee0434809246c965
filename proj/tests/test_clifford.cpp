#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "torsion/clifford.hpp"
#include "torsion/curvature.hpp"

using namespace torsion;
using Q = Rational;
using C = CliffordElement<Q>;
using B = BiGradedElement<Q>;

namespace {

// Dense oracle: 2^n x 2^n matrices built directly from e^i∧ and ι_{e_i} on basis monomials.
using Matrix = std::vector<std::vector<Q>>;

Matrix zero_matrix(int dim) { return Matrix(dim, std::vector<Q>(dim, Q(0))); }

Matrix ext_matrix(int n, int i, int sign_of_interior) {
    const int dim = 1 << n;
    Matrix m = zero_matrix(dim);
    for (int s = 0; s < dim; ++s) {
        int before = 0;
        for (int j = 0; j < i; ++j) before += (s >> j) & 1;
        const int sgn = (before % 2) ? -1 : 1;
        if (!((s >> i) & 1)) m[s | (1 << i)][s] += Q(sgn);
        else m[s & ~(1 << i)][s] += Q(sign_of_interior * sgn);
    }
    return m;
}

Matrix mul(const Matrix& a, const Matrix& b) {
    const std::size_t d = a.size();
    Matrix out = zero_matrix(int(d));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t k = 0; k < d; ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < d; ++j) out[i][j] += a[i][k] * b[k][j];
    return out;
}

Matrix identity_matrix(int dim) {
    Matrix m = zero_matrix(dim);
    for (int i = 0; i < dim; ++i) m[i][i] = 1;
    return m;
}

Matrix oracle_matrix(const C& w) {
    const int n = w.dimension();
    const int dim = 1 << n;
    Matrix out = zero_matrix(dim);
    for (const auto& [k, v] : w.terms()) {
        Matrix m = identity_matrix(dim);
        for (int i = 0; i < n; ++i)
            if (k.plain >> i & 1) m = mul(m, ext_matrix(n, i, -1));
        for (int i = 0; i < n; ++i)
            if (k.hatted >> i & 1) m = mul(m, ext_matrix(n, i, +1));
        for (int r = 0; r < dim; ++r)
            for (int c = 0; c < dim; ++c) out[r][c] += v * m[r][c];
    }
    return out;
}

Matrix applied_matrix(const C& w) {
    const int n = w.dimension();
    const int dim = 1 << n;
    Matrix out = zero_matrix(dim);
    for (int s = 0; s < dim; ++s) {
        const auto img = clifford_apply(w, ExteriorForm<Q>::basis(n, IndexMask(s)));
        for (const auto& [m, v] : img.terms()) out[m][s] = v;
    }
    return out;
}

Q oracle_supertrace(const C& w) {
    const Matrix m = oracle_matrix(w);
    Q tr(0);
    for (std::size_t s = 0; s < m.size(); ++s) tr += (popcount(IndexMask(s)) % 2 ? Q(-1) : Q(1)) * m[s][s];
    return tr;
}

C random_word_sum(int n, std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<IndexMask> mask(0, full_mask(n));
    std::uniform_int_distribution<int> coef(-5, 5);
    C w(n);
    for (int t = 0; t < 4; ++t) {
        BiIndex k{mask(rng), mask(rng)};
        if (k.degree() > max_degree) continue;
        w.add_term(k, Q(coef(rng)));
    }
    return w;
}

} // namespace

TEST(CliffordApply, GeneratorOnConstant) {
    const auto out = clifford_apply(C::c(3, 1), ExteriorForm<Q>::scalar(3, Q(1)));
    EXPECT_EQ(out, ExteriorForm<Q>::basis(3, 0b010));
}

TEST(CliffordApply, SquaresOfGenerators) {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> coef(-4, 4);
    for (int trial = 0; trial < 20; ++trial) {
        ExteriorForm<Q> w(4);
        for (IndexMask m = 0; m < 16; ++m) w.add_term(m, Q(coef(rng)));
        const C cc = C::c(4, 1) * C::c(4, 1);
        const C hh = C::chat(4, 1) * C::chat(4, 1);
        EXPECT_EQ(clifford_apply(cc, w), w * Q(-1));
        EXPECT_EQ(clifford_apply(hh, w), w);
        // Same identities evaluated letter by letter, without canonical reduction.
        EXPECT_EQ(clifford_apply(C::c(4, 1), clifford_apply(C::c(4, 1), w)), w * Q(-1));
        EXPECT_EQ(clifford_apply(C::chat(4, 1), clifford_apply(C::chat(4, 1), w)), w);
    }
}

TEST(CliffordApply, ReproducesDenseMatrices) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        const C w = random_word_sum(3, rng, 6);
        EXPECT_EQ(applied_matrix(w), oracle_matrix(w));
    }
}

TEST(CliffordProduct, RelationsHoldForAllGeneratorPairs) {
    for (int n = 1; n <= 6; ++n)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                const C delta = C::scalar(n, Q(i == j ? 2 : 0));
                EXPECT_EQ(C::c(n, i) * C::c(n, j) + C::c(n, j) * C::c(n, i), delta * Q(-1));
                EXPECT_EQ(C::chat(n, i) * C::chat(n, j) + C::chat(n, j) * C::chat(n, i), delta);
                EXPECT_TRUE((C::c(n, i) * C::chat(n, j) + C::chat(n, j) * C::c(n, i)).is_zero());
            }
}

TEST(CliffordProduct, IdentityIsNeutral) {
    std::mt19937_64 rng(2);
    const C w = random_word_sum(4, rng, 8);
    EXPECT_EQ(C::identity(4) * w, w);
    EXPECT_EQ(w * C::identity(4), w);
}

TEST(CliffordProduct, AgreesWithMatrixAlgebra) {
    std::mt19937_64 rng(23);
    for (int n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 125; ++trial) {
            const C a = random_word_sum(n, rng, n <= 3 ? 3 : 2 * n);
            const C b = random_word_sum(n, rng, n <= 3 ? 3 : 2 * n);
            EXPECT_EQ(oracle_matrix(a * b), mul(oracle_matrix(a), oracle_matrix(b)));
        }
}

TEST(CliffordProduct, DimensionMismatchThrows) {
    EXPECT_THROW(C::c(2, 0) * C::c(3, 0), DimensionMismatch);
}

TEST(Supertrace, FullMonomial) {
    for (int n = 1; n <= 6; ++n) {
        C w = C::identity(n);
        for (int i = 0; i < n; ++i) w = w * C::c(n, i) * C::chat(n, i);
        EXPECT_EQ(w, C::interleaved_top(n));
        Q expected(1);
        for (int i = 0; i < n; ++i) expected *= -2;
        EXPECT_EQ(supertrace(w), expected) << "n=" << n;
    }
}

TEST(Supertrace, IdentityVanishes) {
    for (int n = 1; n <= 6; ++n) EXPECT_EQ(supertrace(C::identity(n)), Q(0));
}

TEST(Supertrace, AllWordsAgainstMatrixOracle) {
    const int n = 3;
    for (IndexMask a = 0; a < 8; ++a)
        for (IndexMask b = 0; b < 8; ++b) {
            const C w = C::word(n, a, b);
            const Q expected = oracle_supertrace(w);
            EXPECT_EQ(supertrace(w), expected);
            if (a != 7 || b != 7) {
                EXPECT_EQ(expected, Q(0));
            }
        }
}

TEST(Quantize, MonomialMapsToWord) {
    const B x = wedge(B::e(3, 1), B::ehat(3, 2));
    EXPECT_EQ(quantize(x), C::c(3, 1) * C::chat(3, 2));
}

TEST(Quantize, CurvatureGivesBochnerWeitzenbockTerm) {
    std::mt19937_64 rng(31);
    const auto cd = random_curvature<Q>(3, rng);
    C expected(3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int l = 0; l < 3; ++l)
                    expected += C::c(3, i) * C::c(3, j) * C::chat(3, k) * C::chat(3, l) * (cd.R(i, j, k, l) / 8);
    EXPECT_EQ(quantize(curvature_element(cd)), expected);
}

TEST(Quantize, SymbolRoundTrip) {
    std::mt19937_64 rng(41);
    std::uniform_int_distribution<int> coef(-9, 9);
    std::uniform_int_distribution<int> deg(0, 8);
    for (int trial = 0; trial < 100; ++trial) {
        const int d = deg(rng);
        B x(4);
        for (IndexMask p = 0; p < 16; ++p)
            for (IndexMask q = 0; q < 16; ++q)
                if (popcount(p) + popcount(q) == d && coef(rng) > 5) x.add_term({p, q}, Q(coef(rng)));
        EXPECT_EQ(symbol(quantize(x)), x);
    }
}

TEST(Quantize, SymbolKeepsTopFiltration) {
    const C w = C::c(3, 0) * C::chat(3, 1) + C::identity(3) * Q(7);
    EXPECT_EQ(symbol(w), wedge(B::e(3, 0), B::ehat(3, 1)));
}
