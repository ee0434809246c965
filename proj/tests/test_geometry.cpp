#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "torsion/anomaly.hpp"

using namespace torsion;

namespace {

constexpr double pi = std::numbers::pi;

Vector vec(std::initializer_list<double> v) {
    Vector out(Eigen::Index(v.size()));
    Eigen::Index i = 0;
    for (double x : v) out(i++) = x;
    return out;
}

MetricPatch euclidean(int n) {
    MetricPatch p;
    p.n = n;
    for (int i = 0; i < n; ++i) p.axes.push_back({0, 1, false, 8});
    p.metric = [n](const Vector&) -> Matrix { return Matrix::Identity(n, n); };
    return p;
}

double max_abs(const CliffordElement<double>& w) {
    double m = 0;
    for (const auto& [k, v] : w.terms()) m = std::max(m, std::abs(v));
    return m;
}

// Signed count of the permutation taking `word` (each generator once) to canonical order.
int permutation_sign(std::vector<int> word) {
    int sign = 1;
    for (std::size_t i = 0; i < word.size(); ++i)
        for (std::size_t j = i + 1; j < word.size(); ++j) {
            if (word[i] == word[j]) return 0;
            if (word[i] > word[j]) sign = -sign;
        }
    return sign;
}

// φ density at n = 3 by expanding e^0 ∧ h_ab e^a ê^b ∧ ¼R_0jkl e^j ê^k ê^l over all index
// tuples. Generators: e^i ↦ i, ê^i ↦ 3 + i, so canonical order is e^0e^1e^2ê^0ê^1ê^2.
double phi_density_brute_force(const CurvatureData<double>& cd) {
    double coeff = 0;
    for (int a = 1; a < 3; ++a)
        for (int b = 1; b < 3; ++b)
            for (int j = 1; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        const double v = cd.h(a, b) * 0.25 * cd.R(0, j, k, l);
                        if (v == 0) continue;
                        coeff += v * permutation_sign({0, a, 3 + b, j, 3 + k, 3 + l});
                    }
    return std::sqrt(4 * pi) * berezin_normalization(3) * coeff;
}

} // namespace

TEST(Curvature, EuclideanIsFlat) {
    for (int n : {2, 3, 4}) {
        const auto cd = curvature_at(euclidean(n), Vector::Constant(n, 0.5));
        for (double r : cd.riemann) EXPECT_EQ(r, 0.0);
    }
}

TEST(Curvature, PolarFlatIsFlat) {
    const auto geo = flat_disc();
    const auto cd = curvature_at(geo.family.g, vec({0.4, 1.0}));
    for (double r : cd.riemann) EXPECT_NEAR(r, 0.0, 1e-9);
}

TEST(Curvature, RoundSphereSectionalCurvature) {
    for (double a : {0.5, 1.0, 2.0}) {
        const auto sample = curvature_sample(round_sphere(a), vec({1.1, 0.3}));
        EXPECT_LT(sample.symmetry_residual, 1e-8);
        EXPECT_LT(sample.bianchi_residual, 1e-8);
        const auto cd = curvature_at(round_sphere(a), vec({1.1, 0.3}));
        EXPECT_NEAR(cd.R(0, 1, 0, 1), 1 / (a * a), 1e-8);
        EXPECT_NEAR(cd.R(0, 1, 1, 0), -1 / (a * a), 1e-8);
    }
}

TEST(Curvature, SymmetryResidualsOnWarpedBall) {
    const auto geo = flat_ball();
    for (const auto& u : {vec({0.2, 0.7, 1.0}), vec({0.5, 2.0, 4.0})}) {
        const auto s = curvature_sample(geo.family.g0, u);
        EXPECT_LT(s.symmetry_residual, 1e-8);
        EXPECT_LT(s.bianchi_residual, 1e-8);
    }
}

TEST(Curvature, RejectsIndefiniteMetric) {
    MetricPatch p = euclidean(2);
    p.metric = [](const Vector&) -> Matrix { return Vector::Constant(2, -1.0).asDiagonal(); };
    EXPECT_THROW(curvature_at(p, vec({0.5, 0.5})), InputError);
}

TEST(SecondFundamentalForm, ProductIsExactlyZero) {
    for (int n : {2, 3}) {
        const auto geo = product_collar(n);
        for (const auto& y : boundary_grid(geo.family.g).nodes) {
            const Matrix h = second_fundamental_form(geo.family.g, y);
            EXPECT_EQ(h.cwiseAbs().maxCoeff(), 0.0);
        }
    }
}

TEST(SecondFundamentalForm, FlatDiscOfRadiusA) {
    for (double a : {1.0, 2.0, 0.5}) {
        const Matrix h = second_fundamental_form(flat_disc(a).family.g, vec({0.7}));
        EXPECT_NEAR(h(0, 0), 1 / a, 1e-10);
    }
}

TEST(SecondFundamentalForm, FlatBallIsUmbilic) {
    const Matrix h = second_fundamental_form(flat_ball().family.g, vec({1.0, 2.0}));
    EXPECT_NEAR(h(0, 0), 1, 1e-10);
    EXPECT_NEAR(h(1, 1), 1, 1e-10);
    EXPECT_NEAR(h(0, 1), 0, 1e-10);
}

TEST(SecondFundamentalForm, RejectsNonCollarChart) {
    MetricPatch p = euclidean(2);
    p.metric = [](const Vector&) -> Matrix { return Matrix::Identity(2, 2) * 4.0; };
    EXPECT_THROW(second_fundamental_form(p, vec({0.5})), InputError);
}

TEST(CollarNormalize, ProductIsUnchanged) {
    const auto geo = product_collar(2);
    const MetricPatch c = collar_normalize(geo.family.g, 0.5);
    const Vector u = vec({0.3, 1.0});
    EXPECT_LT((c.g(u) - geo.family.g.g(u)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(CollarNormalize, FlatDiscFromSquaredRadius) {
    // u0 = 1 - r², so r = √(1 - u0) and g = dr² + r² dθ² pulled back.
    MetricPatch raw;
    raw.n = 2;
    raw.axes = {{0, 0.9, false, 8}, {0, 2 * pi, true, 8}};
    raw.metric = [](const Vector& u) -> Matrix {
        const double r2 = 1 - u(0);
        Matrix g(2, 2);
        g << 1 / (4 * r2), 0, 0, r2;
        return g;
    };
    const MetricPatch c = collar_normalize(raw, 0.5);
    for (double x : {0.0, 0.1, 0.4}) {
        const Matrix g = c.g(vec({x, 0.8}));
        EXPECT_NEAR(g(0, 0), 1, 1e-9);
        EXPECT_NEAR(g(0, 1), 0, 1e-9);
        EXPECT_NEAR(g(1, 1), (1 - x) * (1 - x), 1e-8);
    }
    EXPECT_NEAR(second_fundamental_form(c, vec({0.8}), 1e-8)(0, 0), 1, 1e-6);
}

TEST(CollarNormalize, HemisphereFromHeight) {
    // u0 = cos r (height above the equator), boundary on the equator.
    MetricPatch raw;
    raw.n = 2;
    raw.axes = {{0, 0.9, false, 8}, {0, 2 * pi, true, 8}};
    raw.metric = [](const Vector& u) -> Matrix {
        const double z = u(0);
        Matrix g(2, 2);
        g << 1 / (1 - z * z), 0, 0, 1 - z * z;
        return g;
    };
    const MetricPatch c = collar_normalize(raw, 0.6);
    for (double x : {0.05, 0.3, 0.6}) {
        const Matrix g = c.g(vec({x, 2.0}));
        EXPECT_NEAR(g(0, 0), 1, 1e-9);
        EXPECT_NEAR(g(1, 1), std::cos(x) * std::cos(x), 1e-8);
    }
}

TEST(CollarNormalize, DetectsLeavingTheChart) {
    MetricPatch raw = euclidean(2);
    raw.axes = {{0, 0.2, false, 8}, {0, 1, false, 8}};
    const MetricPatch c = collar_normalize(raw, 1.0);
    EXPECT_THROW(c.g(vec({1.0, 0.5})), InputError);
}

TEST(EulerForm, GaussBonnetOnSphere) {
    const double total = interior_euler_integral(round_sphere(1.3), {0, pi / 2, pi});
    EXPECT_NEAR(total, 2, 1e-8);
}

TEST(EulerForm, FlatAndOddVanish) {
    EXPECT_EQ(euler_form(curvature_at(euclidean(2), vec({0.5, 0.5}))), 0.0);
    std::mt19937_64 rng(3);
    EXPECT_EQ(euler_form(random_curvature<double>(3, rng)), 0.0);
}

TEST(Parity, DensitiesVanishByDimension) {
    std::mt19937_64 rng(20240611);
    for (int draw = 0; draw < 100; ++draw) {
        const int n = 2 + draw % 4;
        const auto cd = random_curvature<double>(n, rng);
        if (n % 2) EXPECT_EQ(transgression_density(cd), 0.0) << "n = " << n;
        else EXPECT_EQ(phi_density(cd), 0.0) << "n = " << n;
    }
}

TEST(Parity, NonVanishingCounterparts) {
    std::mt19937_64 rng(7);
    int nonzero_t = 0, nonzero_phi = 0;
    for (int draw = 0; draw < 20; ++draw) {
        nonzero_t += transgression_density(random_curvature<double>(2, rng)) != 0;
        nonzero_phi += phi_density(random_curvature<double>(3, rng)) != 0;
    }
    EXPECT_GT(nonzero_t, 10);
    EXPECT_GT(nonzero_phi, 10);
}

TEST(PhiDensity, MatchesPermutationExpansion) {
    std::mt19937_64 rng(99);
    for (int draw = 0; draw < 50; ++draw) {
        const auto cd = random_curvature<double>(3, rng);
        EXPECT_NEAR(phi_density(cd), phi_density_brute_force(cd), 1e-12 * (1 + std::abs(phi_density_brute_force(cd))));
    }
}

TEST(Transgression, EmptyDeformationIsZero) {
    for (int n : {1, 2, 3}) {
        const auto r = transgression_boundary_integral(product_collar(n));
        EXPECT_EQ(r.value, 0.0);
    }
}

TEST(Transgression, FlatDiscClosedForm) {
    // ∫e(g) = 0 and ∫e(g_0) = χ(disc) = 1.
    EXPECT_NEAR(transgression_boundary_integral(flat_disc()).value, -1, 1e-8);
}

TEST(Transgression, CapClosedForm) {
    EXPECT_NEAR(transgression_boundary_integral(curved_cap()).value, -std::cos(1.0), 1e-8);
}

TEST(Transgression, StokesOnDiscAndCap) {
    for (const auto& geo : {flat_disc(), curved_cap(), curved_cap(0.6), flat_disc(1.5)}) {
        const double boundary = transgression_boundary_integral(geo).value;
        const double interior = euler_difference(geo);
        EXPECT_LT(std::abs(interior - boundary), 1e-6) << geo.name;
    }
}

TEST(Transgression, OddDimensionIsZero) {
    EXPECT_EQ(transgression_boundary_integral(flat_ball()).value, 0.0);
}

TEST(Transgression, RejectsMismatchedNormals) {
    Geometry geo = flat_disc();
    geo.family.g0 = flat_disc(2.0).family.g0;
    EXPECT_THROW(transgression_boundary_integral(geo), InputError);
}

TEST(Phi, EvenDimensionAndProductAreZero) {
    EXPECT_EQ(phi_boundary_integral(flat_disc()).value, 0.0);
    EXPECT_EQ(phi_boundary_integral(product_collar(3)).value, 0.0);
}

TEST(Phi, FlatBallIsFiniteAndNonzero) {
    const auto r = phi_boundary_integral(flat_ball());
    EXPECT_TRUE(std::isfinite(r.value));
    EXPECT_GT(std::abs(r.value), 1e-3);
    EXPECT_LT(r.error, 1e-8);
}

TEST(Predict, ProductCollarIsExactlyChiLn2) {
    for (int n : {1, 2, 3})
        for (int rank : {1, 2}) {
            const auto geo = product_collar(n);
            const auto p = predict_anomaly(geo, rank, constant_c_closed_form(), 0);
            EXPECT_EQ(p.term_transgression, 0.0);
            EXPECT_EQ(p.term_phi, 0.0);
            EXPECT_EQ(p.prediction, rank * geo.boundary_euler_characteristic * std::numbers::ln2);
        }
}

TEST(Predict, OddDimensionHasNoTransgressionTerm) {
    const double c = constant_c_closed_form();
    const auto p = predict_anomaly(flat_ball(), 1, c, 0);
    EXPECT_EQ(p.term_transgression, 0.0);
    EXPECT_DOUBLE_EQ(p.prediction, 2 * std::numbers::ln2 + c * p.term_phi);
}

TEST(Predict, LinearInRank) {
    const double c = constant_c_closed_form();
    for (const auto& geo : {flat_disc(), flat_ball()}) {
        const auto p1 = predict_anomaly(geo, 1, c, 0);
        const auto p2 = predict_anomaly(geo, 2, c, 0);
        EXPECT_DOUBLE_EQ(p2.term_chi, 2 * p1.term_chi);
        EXPECT_DOUBLE_EQ(p2.term_transgression, 2 * p1.term_transgression);
        EXPECT_DOUBLE_EQ(p2.prediction, 2 * p1.prediction);
    }
    EXPECT_THROW(predict_anomaly(flat_disc(), 0, c, 0), InputError);
}

TEST(Predict, StableUnderGridRefinement) {
    Geometry coarse = flat_ball(), fine = flat_ball();
    for (auto* p : {&fine.family.g, &fine.family.g0})
        for (auto& ax : p->axes) ax.points *= 2;
    const double c = constant_c_closed_form();
    EXPECT_NEAR(predict_anomaly(coarse, 1, c, 0).prediction, predict_anomaly(fine, 1, c, 0).prediction, 1e-8);
}

TEST(HodgeVariation, ProductIsZero) {
    const auto geo = product_collar(2);
    EXPECT_EQ(max_abs(hodge_star_variation(geo.family, 0.5, vec({0.1, 1.0}))), 0.0);
}

TEST(HodgeVariation, ZeroOnTheBoundary) {
    EXPECT_LT(max_abs(hodge_star_variation(flat_disc().family, 0.5, vec({0.0, 1.0}))), 1e-14);
}

TEST(HodgeVariation, LeadingTermAndRemainderExponent) {
    for (const auto& geo : {flat_disc(), curved_cap(), flat_ball()}) {
        const int m = geo.dimension() - 1;
        Vector y = Vector::Constant(m, 1.0);
        const Matrix h = second_fundamental_form(geo.family.g, y);
        std::array<double, 2> rem{};
        const std::array<double, 2> xs{0.02, 0.01};
        for (int k = 0; k < 2; ++k) {
            Vector u(geo.dimension());
            u(0) = xs[k];
            u.tail(m) = y;
            const auto exact = hodge_star_variation(geo.family, 1.0, u);
            rem[k] = max_abs(exact - hodge_star_leading(h, xs[k]));
            EXPECT_LT(rem[k], 0.1 * max_abs(hodge_star_leading(h, xs[k]))) << geo.name;
        }
        const double exponent = std::log2(rem[0] / rem[1]);
        EXPECT_NEAR(exponent, 2.0, 0.1) << geo.name;
    }
}
