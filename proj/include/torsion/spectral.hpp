#pragma once

// Zeta-regularized torsion of explicitly solvable spectra: interval (absolute/relative) and
// circle, closed-form ζ_T'(0) through Riemann zeta values, and the Mellin split route with
// small-t asymptotic subtraction.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/zeta.hpp>

#include "torsion/error.hpp"
#include "torsion/quadrature.hpp"

namespace torsion {

enum class BoundaryCondition { absolute, relative };

inline const char* to_string(BoundaryCondition bc) { return bc == BoundaryCondition::absolute ? "absolute" : "relative"; }

inline BoundaryCondition boundary_condition_from_string(const std::string& s) {
    if (s == "absolute") return BoundaryCondition::absolute;
    if (s == "relative") return BoundaryCondition::relative;
    throw InputError("unknown boundary condition '" + s + "'");
}

/// Eigenvalues scale·k², k = 1, 2, ..., each with the given multiplicity, in one form degree.
struct ArithmeticBranch {
    int degree = 0;
    double scale = 1;
    int multiplicity = 1;
};

/// One eigenvalue entry of a finite list.
struct SpectrumEntry {
    double lambda = 0;
    int multiplicity = 1;
    int degree = 0;
};

/// Labeled spectrum per form degree. Zero modes are counted separately and never enter ζ.
struct ModelSpectrum {
    std::string manifold;
    std::optional<BoundaryCondition> bc;
    double length = 0;
    int top_degree = 1;
    std::vector<int> zero_modes;
    std::vector<ArithmeticBranch> branches;
    std::vector<SpectrumEntry> finite;

    bool empty() const { return branches.empty() && finite.empty(); }

    /// Positive eigenvalues of one degree up to and including the k-th branch term.
    std::vector<SpectrumEntry> listing(int degree, int terms) const {
        std::vector<SpectrumEntry> out;
        for (const auto& e : finite)
            if (e.degree == degree) out.push_back(e);
        for (const auto& b : branches)
            if (b.degree == degree)
                for (int k = 1; k <= terms; ++k) out.push_back({b.scale * k * k, b.multiplicity, degree});
        std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.lambda < b.lambda; });
        return out;
    }

    double smallest_positive() const {
        double m = INFINITY;
        for (const auto& b : branches) m = std::min(m, b.scale);
        for (const auto& e : finite) m = std::min(m, e.lambda);
        return m;
    }
};

/// Interval [0, L]. Absolute: 0-forms Neumann (one zero mode), 1-forms Dirichlet. Relative
/// swaps them: 0-forms Dirichlet, 1-forms Neumann (zero mode dx). Positive parts are (kπ/L)².
inline ModelSpectrum interval_spectrum(double L, BoundaryCondition bc) {
    if (!(L > 0)) throw InputError("interval length must be positive");
    const double scale = std::numbers::pi * std::numbers::pi / (L * L);
    ModelSpectrum s;
    s.manifold = "interval";
    s.bc = bc;
    s.length = L;
    s.top_degree = 1;
    s.zero_modes = bc == BoundaryCondition::absolute ? std::vector<int>{1, 0} : std::vector<int>{0, 1};
    s.branches = {{0, scale, 1}, {1, scale, 1}};
    return s;
}

/// Circle of length L: both degrees (2πk/L)², k ≥ 1, multiplicity 2, one zero mode each.
inline ModelSpectrum circle_spectrum(double L) {
    if (!(L > 0)) throw InputError("circle length must be positive");
    const double scale = 4 * std::numbers::pi * std::numbers::pi / (L * L);
    ModelSpectrum s;
    s.manifold = "circle";
    s.length = L;
    s.top_degree = 1;
    s.zero_modes = {1, 1};
    s.branches = {{0, scale, 2}, {1, scale, 2}};
    return s;
}

/// Weight p(-1)^{p+1} of degree p in ζ_T.
inline int torsion_weight(int p) { return (p % 2) ? p : -p; }

namespace detail {

/// Σ_{m≥1} e^{-π² m² / (t a)}.
inline double theta_jacobi_tail(double ta) {
    double s = 0;
    for (int m = 1;; ++m) {
        const double term = std::exp(-std::numbers::pi * std::numbers::pi * m * m / ta);
        s += term;
        if (term <= 1e-18 * std::max(s, 1e-300) || term == 0) break;
    }
    return s;
}

/// Σ_{k≥1} e^{-t a k²}: direct for t a ≥ ½, Jacobi-transformed below.
inline double theta_branch(double a, double t) {
    const double ta = t * a;
    if (ta >= 0.5) {
        double s = 0;
        for (int k = 1;; ++k) {
            const double term = std::exp(-ta * k * k);
            s += term;
            if (term < 1e-18 * s) break;
        }
        return s;
    }
    return 0.5 * std::sqrt(std::numbers::pi / ta) * (1 + 2 * theta_jacobi_tail(ta)) - 0.5;
}

/// Σ_{k≥1} e^{-t a k²} - (½√(π/(t a)) - ½), computed without cancellation.
inline double theta_branch_remainder(double a, double t) {
    const double ta = t * a;
    if (ta >= 0.5) return theta_branch(a, t) - (0.5 * std::sqrt(std::numbers::pi / ta) - 0.5);
    return std::sqrt(std::numbers::pi / ta) * theta_jacobi_tail(ta);
}

} // namespace detail

/// Heat trace Tr(e^{-tΔ_p} P^⊥) of one degree.
inline double heat_trace(const ModelSpectrum& s, int degree, double t) {
    if (!(t > 0)) throw InputError("heat trace needs t > 0");
    double sum = 0;
    for (const auto& b : s.branches)
        if (b.degree == degree) sum += b.multiplicity * detail::theta_branch(b.scale, t);
    for (const auto& e : s.finite)
        if (e.degree == degree) sum += e.multiplicity * std::exp(-t * e.lambda);
    return sum;
}

/// Tr_s(N e^{-tΔ} P^⊥) = Σ_p p(-1)^p Tr(e^{-tΔ_p} P^⊥); its negative is the Mellin integrand of ζ_T.
inline double number_operator_supertrace(const ModelSpectrum& s, double t) {
    if (!(t > 0)) throw InputError("number operator supertrace needs t > 0");
    double sum = 0;
    for (int p = 0; p <= s.top_degree; ++p) sum -= torsion_weight(p) * heat_trace(s, p, t);
    return sum;
}

/// ζ_p(s) for real s > ½ (branches) in closed form.
inline double spectral_zeta(const ModelSpectrum& spec, int degree, double s) {
    double z = 0;
    for (const auto& b : spec.branches)
        if (b.degree == degree) z += b.multiplicity * std::pow(b.scale, -s) * boost::math::zeta(2 * s);
    for (const auto& e : spec.finite)
        if (e.degree == degree) z += e.multiplicity * std::pow(e.lambda, -s);
    return z;
}

inline double torsion_zeta(const ModelSpectrum& spec, double s) {
    double z = 0;
    for (int p = 0; p <= spec.top_degree; ++p) z += torsion_weight(p) * spectral_zeta(spec, p, s);
    return z;
}

/// ζ_T'(0) with its error estimate and the route used.
struct TorsionZetaValue {
    double log_torsion = 0;
    double error = 0;
    std::string method;
};

/// ln T = ζ_T'(0) in closed form: a branch contributes m(½ ln a - ln 2π) (from ζ_R(0) = -½,
/// ζ_R'(0) = -½ ln 2π), a finite eigenvalue -m ln λ.
inline TorsionZetaValue zeta_torsion(const ModelSpectrum& spec) {
    double d = 0;
    for (const auto& b : spec.branches)
        d += torsion_weight(b.degree) * b.multiplicity * (0.5 * std::log(b.scale) - std::log(2 * std::numbers::pi));
    for (const auto& e : spec.finite) {
        if (!(e.lambda > 0)) throw InputError("finite spectrum entries must be positive; zero modes are listed separately");
        d -= torsion_weight(e.degree) * e.multiplicity * std::log(e.lambda);
    }
    return {d, 0, "closed-form"};
}

/// Small-t expansion Θ(t) ≈ Σ c_j t^{α_j} of a torsion-weighted heat trace. Below `exact_below`
/// the caller certifies |Θ - expansion| ≤ remainder_bound · t.
struct HeatAsymptotics {
    std::vector<std::pair<double, double>> terms; ///< (α_j, c_j)
    double exact_below = 0;
    double remainder_bound = 0;

    double operator()(double t) const {
        double s = 0;
        for (const auto& [a, c] : terms) s += c * std::pow(t, a);
        return s;
    }
    double constant_term() const {
        double s = 0;
        for (const auto& [a, c] : terms)
            if (a == 0) s += c;
        return s;
    }
};

/// Spectrum given only through its torsion-weighted heat trace Θ(t) = -Tr_s(N e^{-tΔ} P^⊥).
struct GenericSpectrum {
    std::function<double(double)> torsion_heat_trace;
    std::optional<HeatAsymptotics> asymptotics;
    /// Smallest positive eigenvalue (bounds the large-t tail).
    double spectral_gap = 0;
};

/// ζ_T'(0) = ∫_0^1 (Θ - Σc t^α) dt/t + ∫_1^∞ Θ dt/t + Σ_{α≠0} c/α + γ c_0.
inline TorsionZetaValue zeta_torsion_split(const GenericSpectrum& g, const QuadratureSpec& spec = {}) {
    if (!g.asymptotics) throw InputError("generic spectra need caller-supplied small-t heat asymptotics");
    if (!(g.spectral_gap > 0)) throw InputError("generic spectra need a positive spectral gap");
    const HeatAsymptotics& as = *g.asymptotics;
    for (const auto& [a, c] : as.terms)
        if (a > 0) throw InputError("asymptotic terms with positive powers are integrable and must not be subtracted");
    const double t_lo = std::min(as.exact_below, 1.0);
    QuadratureResult total;
    total.error += as.remainder_bound * t_lo; // ∫_0^{t_lo} |remainder| dt/t
    if (t_lo < 1)
        total += integrate([&](double t) { return (g.torsion_heat_trace(t) - as(t)) / t; }, t_lo, 1.0, spec,
                           "Mellin small-t piece");
    // Tail: Θ(t) ≤ Θ(T) e^{-gap (t - T)} beyond T.
    const double T = std::max(1.0, 45 / g.spectral_gap);
    total += integrate([&](double t) { return g.torsion_heat_trace(t) / t; }, 1.0, T, spec, "Mellin large-t piece");
    total.error += std::abs(g.torsion_heat_trace(T)) / (g.spectral_gap * T);
    for (const auto& [a, c] : as.terms)
        if (a != 0) total.value += c / a;
    total.value += std::numbers::egamma * as.constant_term();
    const double allowed = std::max(spec.abs_tol, spec.rel_tol * std::abs(total.value));
    if (total.error > allowed)
        throw ToleranceFailure("Mellin split", "error estimate " + detail::sci(total.error) + " exceeds " + detail::sci(allowed));
    return {total.value, total.error, "mellin-split"};
}

/// The split route applied to an arithmetic spectrum, whose small-t expansion is exact:
/// Σ_{k≥1} e^{-tak²} = ½√(π/(ta)) - ½ + O(e^{-π²/(ta)}). The remainder is evaluated in
/// Jacobi form, so the subtraction carries no cancellation.
inline TorsionZetaValue zeta_torsion_split(const ModelSpectrum& s, const QuadratureSpec& spec = {}) {
    QuadratureResult total;
    double value_terms = 0, c0 = 0;
    for (const auto& b : s.branches) {
        const double w = torsion_weight(b.degree) * b.multiplicity;
        const double ch = 0.5 * std::sqrt(std::numbers::pi / b.scale) * w;
        value_terms += ch / -0.5;
        c0 += -0.5 * w;
    }
    for (const auto& e : s.finite) c0 += torsion_weight(e.degree) * e.multiplicity;
    auto remainder = [&](double t) {
        double r = 0;
        for (const auto& b : s.branches)
            r += torsion_weight(b.degree) * b.multiplicity * detail::theta_branch_remainder(b.scale, t);
        for (const auto& e : s.finite) r += torsion_weight(e.degree) * e.multiplicity * std::expm1(-t * e.lambda);
        return r / t;
    };
    auto theta = [&](double t) {
        double r = 0;
        for (int p = 0; p <= s.top_degree; ++p) r += torsion_weight(p) * heat_trace(s, p, t);
        return r / t;
    };
    if (s.empty()) return {0, 0, "mellin-split"};
    total += integrate(remainder, 0.0, 1.0, spec, "Mellin small-t piece");
    const double gap = s.smallest_positive();
    const double T = std::max(1.0, 45 / gap);
    total += integrate(theta, 1.0, T, spec, "Mellin large-t piece");
    total.error += std::abs(theta(T) * T) / (gap * T);
    total.value += value_terms + std::numbers::egamma * c0;
    return {total.value, total.error, "mellin-split"};
}

/// Γ(s) ζ_T(s) = ∫_0^∞ t^{s-1} Θ(t) dt at a point s > ½, truncated where the tail is negligible.
inline QuadratureResult mellin_transform(const ModelSpectrum& s, double sigma, const QuadratureSpec& spec = {}) {
    if (!(sigma > 0.5)) throw InputError("the Mellin integral converges for s > 1/2 only");
    const double gap = s.smallest_positive();
    const double T = std::max(1.0, (60 + 4 * sigma) / gap);
    auto f = [&](double t) {
        double r = 0;
        for (int p = 0; p <= s.top_degree; ++p) r += torsion_weight(p) * heat_trace(s, p, t);
        return std::pow(t, sigma - 1) * r;
    };
    const double split = std::min(1.0, T);
    QuadratureSpec ts = spec;
    ts.method = QuadratureMethod::tanh_sinh;
    QuadratureResult r = integrate(f, 0.0, split, ts, "Mellin transform near 0");
    r += integrate(f, split, T, spec, "Mellin transform");
    return r;
}

} // namespace torsion
