#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "torsion/spectral.hpp"

using namespace torsion;

namespace {

constexpr double pi = std::numbers::pi;
const double lengths[] = {0.25, 0.5, 1.0, 2.0, 4.0};

} // namespace

TEST(IntervalSpectrum, FirstEigenvalues) {
    const auto s = interval_spectrum(1, BoundaryCondition::absolute);
    const auto l = s.listing(0, 3);
    ASSERT_EQ(l.size(), 3u);
    EXPECT_DOUBLE_EQ(l[0].lambda, pi * pi);
    EXPECT_DOUBLE_EQ(l[1].lambda, 4 * pi * pi);
    EXPECT_DOUBLE_EQ(l[2].lambda, 9 * pi * pi);
}

TEST(IntervalSpectrum, ScalesInverselyWithLengthSquared) {
    for (auto bc : {BoundaryCondition::absolute, BoundaryCondition::relative}) {
        const auto a = interval_spectrum(1.3, bc).listing(1, 5);
        const auto b = interval_spectrum(2.6, bc).listing(1, 5);
        for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(b[i].lambda, a[i].lambda / 4, 1e-12 * a[i].lambda);
    }
}

TEST(IntervalSpectrum, ZeroModes) {
    EXPECT_EQ(interval_spectrum(1, BoundaryCondition::absolute).zero_modes, (std::vector<int>{1, 0}));
    EXPECT_EQ(interval_spectrum(1, BoundaryCondition::relative).zero_modes, (std::vector<int>{0, 1}));
    EXPECT_THROW(interval_spectrum(0, BoundaryCondition::absolute), InputError);
}

TEST(ZetaTorsion, IntervalClosedForm) {
    for (auto bc : {BoundaryCondition::absolute, BoundaryCondition::relative})
        for (double L : lengths) EXPECT_NEAR(zeta_torsion(interval_spectrum(L, bc)).log_torsion, -std::log(2 * L), 1e-12);
}

TEST(ZetaTorsion, RatiosAcrossLengths) {
    const double a = zeta_torsion(interval_spectrum(0.5, BoundaryCondition::absolute)).log_torsion;
    const double b = zeta_torsion(interval_spectrum(3.0, BoundaryCondition::absolute)).log_torsion;
    EXPECT_NEAR(a - b, -std::log(0.5 / 3.0), 1e-12);
}

TEST(ZetaTorsion, EmptySpectrumIsZero) {
    ModelSpectrum s;
    EXPECT_EQ(zeta_torsion(s).log_torsion, 0.0);
    EXPECT_EQ(zeta_torsion_split(s).log_torsion, 0.0);
}

TEST(ZetaTorsion, SplitMatchesClosedForm) {
    for (double L : lengths) {
        for (auto bc : {BoundaryCondition::absolute, BoundaryCondition::relative}) {
            const auto s = interval_spectrum(L, bc);
            const auto split = zeta_torsion_split(s);
            EXPECT_NEAR(split.log_torsion, zeta_torsion(s).log_torsion, 1e-7) << "L = " << L;
            EXPECT_NEAR(split.log_torsion, -std::log(2 * L), 1e-7);
        }
        const auto c = circle_spectrum(L);
        EXPECT_NEAR(zeta_torsion_split(c).log_torsion, zeta_torsion(c).log_torsion, 1e-7);
        EXPECT_NEAR(zeta_torsion(c).log_torsion, -2 * std::log(L), 1e-12);
    }
}

TEST(ZetaTorsion, GenericRouteOnFiniteSpectrum) {
    // Degree-1 eigenvalues {1, 2, 5}: ζ_T'(0) = -ln 10.
    GenericSpectrum g;
    g.torsion_heat_trace = [](double t) { return std::exp(-t) + std::exp(-2 * t) + std::exp(-5 * t); };
    g.spectral_gap = 1;
    EXPECT_THROW(zeta_torsion_split(g), InputError);
    HeatAsymptotics as;
    as.terms = {{0.0, 3.0}};
    g.asymptotics = as;
    EXPECT_NEAR(zeta_torsion_split(g).log_torsion, -std::log(10.0), 1e-9);
    ModelSpectrum s;
    s.finite = {{1, 1, 1}, {2, 1, 1}, {5, 1, 1}};
    EXPECT_NEAR(zeta_torsion(s).log_torsion, -std::log(10.0), 1e-14);
    EXPECT_NEAR(zeta_torsion_split(s).log_torsion, -std::log(10.0), 1e-9);
}

TEST(ZetaTorsion, GenericRouteOnInterval) {
    const double L = 1.7;
    const double a = pi * pi / (L * L);
    GenericSpectrum g;
    g.torsion_heat_trace = [a](double t) {
        double s = 0;
        for (int k = 1; k < 4000; ++k) {
            const double e = std::exp(-t * a * k * k);
            if (e == 0) break;
            s += e;
        }
        return s;
    };
    g.spectral_gap = a;
    HeatAsymptotics as;
    as.terms = {{-0.5, 0.5 * std::sqrt(pi / a)}, {0.0, -0.5}};
    as.exact_below = 0.05; // remainder √(π/(ta)) e^{-π²/(ta)} is below 1e-30 there
    g.asymptotics = as;
    EXPECT_NEAR(zeta_torsion_split(g).log_torsion, -std::log(2 * L), 1e-7);
}

TEST(NumberOperator, MatchesDirectSummation) {
    for (double L : {0.5, 1.0, 2.0})
        for (double t : {0.01, 0.3, 2.0}) {
            double direct = 0;
            for (int k = 1; k < 100000; ++k) {
                const double e = std::exp(-t * k * k * pi * pi / (L * L));
                if (e < 1e-300) break;
                direct += e;
            }
            // Only degree 1 carries weight: Tr_s(N ...) = -Σ e^{-tλ}.
            const auto s = interval_spectrum(L, BoundaryCondition::absolute);
            EXPECT_NEAR(number_operator_supertrace(s, t), -direct, 1e-12 * (1 + direct));
        }
}

TEST(NumberOperator, DecaysForLargeTime) {
    EXPECT_LT(std::abs(number_operator_supertrace(interval_spectrum(1, BoundaryCondition::absolute), 50)), 1e-200);
    EXPECT_THROW(number_operator_supertrace(interval_spectrum(1, BoundaryCondition::absolute), 0), InputError);
}

TEST(HeatTrace, NeumannSmallTime) {
    const double L = 1, t = 1e-3;
    double direct = 1; // zero mode
    for (int k = 1; k < 100000; ++k) {
        const double e = std::exp(-t * k * k * pi * pi / (L * L));
        if (e < 1e-300) break;
        direct += e;
    }
    const double expansion = L / std::sqrt(4 * pi * t) + 0.5;
    EXPECT_NEAR(direct / expansion, 1, 1e-4);
    const double ours = 1 + heat_trace(interval_spectrum(L, BoundaryCondition::absolute), 0, t);
    EXPECT_NEAR(ours, direct, 1e-11 * direct);
}

TEST(Mellin, ReproducesZetaAtTwo) {
    for (double L : {0.5, 1.0, 2.0}) {
        const auto s = interval_spectrum(L, BoundaryCondition::absolute);
        const auto r = mellin_transform(s, 2.0);
        EXPECT_NEAR(r.value, std::tgamma(2.0) * torsion_zeta(s, 2.0), 1e-6);
        EXPECT_NEAR(r.value, std::pow(L, 4) / 90, 1e-6);
    }
}
