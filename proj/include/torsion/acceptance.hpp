#pragma once

// The acceptance suite: ten end-to-end criteria, each a set of measured-versus-tolerance checks.
// Failures are verdicts, never exceptions.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "torsion/anomaly.hpp"
#include "torsion/boundary_operator.hpp"
#include "torsion/clifford.hpp"
#include "torsion/curvature.hpp"
#include "torsion/model_kernels.hpp"
#include "torsion/r_torsion.hpp"
#include "torsion/spectral.hpp"

namespace torsion {

/// One measured quantity against its tolerance. An exact check requires measured == 0.
struct Check {
    std::string name;
    double measured = 0;
    double tolerance = 0;
    bool exact = false;
    bool passed = false;
};

struct CriterionResult {
    int id = 0;
    std::string name;
    std::vector<Check> checks;
    double runtime = 0;        ///< seconds
    double runtime_budget = 0; ///< seconds
    std::string detail;

    bool within_budget() const { return runtime <= runtime_budget; }
    bool passed() const {
        if (!within_budget()) return false;
        for (const auto& c : checks)
            if (!c.passed) return false;
        return !checks.empty();
    }
    /// "[PASS]  6 interval-torsion  name: measured <= tol; ...  (0.12 s)"
    std::string line() const {
        std::ostringstream out;
        out << (passed() ? "[PASS] " : "[FAIL] ") << (id < 10 ? " " : "") << id << ' ' << name << "  ";
        for (std::size_t i = 0; i < checks.size(); ++i) {
            const auto& c = checks[i];
            out << (i ? "; " : "") << c.name << ": " << detail::sci(c.measured) << (c.exact ? " == 0" : " <= " + detail::sci(c.tolerance))
                << (c.passed ? "" : " FAILED");
        }
        out.precision(2);
        out << std::fixed << "  (" << runtime << " s / " << runtime_budget << " s)";
        if (!detail.empty()) out << "  " << detail;
        return out.str();
    }
};

struct AcceptanceOptions {
    std::uint64_t seed = 20240611;
    QuadratureSpec quadrature;
    BerezinConvention berezin;
    /// Check name → tolerance, replacing the built-in value.
    std::map<std::string, double> tolerance_overrides;
    /// Criterion ids to run; empty means all.
    std::vector<int> only;
};

namespace detail {

class CriterionBuilder {
public:
    CriterionBuilder(int id, std::string name, double budget, const AcceptanceOptions& opt) : opt_(opt) {
        r_.id = id;
        r_.name = std::move(name);
        r_.runtime_budget = budget;
        start_ = std::chrono::steady_clock::now();
    }

    double tolerance(const std::string& check, double fallback) const {
        const auto it = opt_.tolerance_overrides.find(check);
        return it == opt_.tolerance_overrides.end() ? fallback : it->second;
    }

    void bound(const std::string& check, double measured, double tol) {
        const double t = tolerance(check, tol);
        r_.checks.push_back({check, measured, t, false, std::isfinite(measured) && measured <= t});
    }
    void exact(const std::string& check, double measured) { r_.checks.push_back({check, measured, 0, true, measured == 0}); }
    void fail(const std::string& check, const std::string& why) {
        r_.checks.push_back({check, std::numeric_limits<double>::quiet_NaN(), 0, false, false});
        r_.detail += (r_.detail.empty() ? "" : "; ") + why;
    }
    void note(const std::string& text) { r_.detail += (r_.detail.empty() ? "" : "; ") + text; }

    CriterionResult finish() {
        r_.runtime = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        return r_;
    }

private:
    const AcceptanceOptions& opt_;
    CriterionResult r_;
    std::chrono::steady_clock::time_point start_;
};

inline std::mt19937_64 criterion_rng(std::uint64_t seed, int id) {
    std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(id)};
    return std::mt19937_64(seq);
}

/// Σ_s (-1)^{|s|} <e_s, w e_s> from the action on basis forms, independent of supertrace().
inline Rational supertrace_by_action(const CliffordElement<Rational>& w) {
    const int n = w.dimension();
    Rational tr = 0;
    for (IndexMask s = 0; s < (IndexMask(1) << n); ++s) {
        const Rational diag = clifford_apply(w, ExteriorForm<Rational>::basis(n, s)).coefficient(s);
        tr += popcount(s) % 2 ? Rational(-diag) : diag;
    }
    return tr;
}

/// Letters c_i (i in a) then ĉ_i (i in b), multiplied one at a time.
inline CliffordElement<Rational> letter_product(int n, IndexMask a, IndexMask b) {
    auto w = CliffordElement<Rational>::identity(n);
    for (int i = 0; i < n; ++i)
        if (a >> i & 1) w = w * CliffordElement<Rational>::c(n, i);
    for (int i = 0; i < n; ++i)
        if (b >> i & 1) w = w * CliffordElement<Rational>::chat(n, i);
    return w;
}

inline BiGradedElement<double> random_model_curvature(int n, std::mt19937_64& rng) {
    return curvature_element(random_curvature<double>(n, rng)) * 0.25;
}

} // namespace detail

/// 1. Tr_s(c_1ĉ_1···c_nĉ_n) = (-2)^n exactly for n = 1..6; every proper sub-word has Tr_s = 0.
inline CriterionResult criterion_supertrace(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(1, "clifford-supertrace", 10, opt);
    double top_err = 0, sub_max = 0, action_err = 0;
    for (int n = 1; n <= 6; ++n) {
        auto w = CliffordElement<Rational>::identity(n);
        for (int i = 0; i < n; ++i) w = w * CliffordElement<Rational>::c(n, i) * CliffordElement<Rational>::chat(n, i);
        Rational expected = 1;
        for (int i = 0; i < n; ++i) expected *= -2;
        top_err = std::max(top_err, std::abs(to_double(Rational(supertrace(w) - expected))));
        if (n <= 4) action_err = std::max(action_err, std::abs(to_double(Rational(detail::supertrace_by_action(w) - expected))));
        const IndexMask full = full_mask(n);
        for (IndexMask a = 0; a <= full; ++a)
            for (IndexMask c = 0; c <= full; ++c) {
                if (a == full && c == full) continue;
                const auto sub = detail::letter_product(n, a, c);
                sub_max = std::max(sub_max, std::abs(to_double(supertrace(sub))));
                if (n <= 4) sub_max = std::max(sub_max, std::abs(to_double(detail::supertrace_by_action(sub))));
            }
    }
    b.exact("top-word error", top_err);
    b.exact("sub-word max", sub_max);
    b.exact("action cross-check (n<=4)", action_err);
    return b.finish();
}

/// 2. [R, P_N] = R_0 and R_0 ∧ R_0 = 0 exactly on 200 seeded random curvature tensors, n = 2..4.
inline CriterionResult criterion_commutator(const AcceptanceOptions& opt) {
    using Q = Rational;
    using C = CliffordElement<Q>;
    detail::CriterionBuilder b(2, "commutator-lemma", 30, opt);
    auto rng = detail::criterion_rng(opt.seed, 2);
    int commutator_failures = 0, nilpotency_failures = 0, operator_failures = 0;
    for (int draw = 0; draw < 200; ++draw) {
        const int n = 2 + draw % 3;
        const auto cd = random_curvature<Q>(n, rng);
        const auto Rb = curvature_element(cd);
        const auto R0b = normal_curvature_element(cd);
        const C R = left_multiplication(Rb);
        const C R0 = left_multiplication(R0b);
        const C pn = unhatted_interior<Q>(n, 0) * unhatted_exterior<Q>(n, 0);
        if (!(commutator(R, pn) == R0)) ++commutator_failures;
        if (!wedge(R0b, R0b).is_zero()) ++nilpotency_failures;
        const auto Rop = BoundaryOperator<Q>::left(Rb);
        const auto PN = BoundaryOperator<Q>::neumann_projection(n);
        if (!(Rop * PN - PN * Rop == BoundaryOperator<Q>::left(R0b))) ++operator_failures;
    }
    b.exact("commutator failures", commutator_failures);
    b.exact("R0^2 failures", nilpotency_failures);
    b.exact("block-operator failures", operator_failures);
    return b.finish();
}

/// 3. K = K_0 - K_0⋆K_1 solves the heat equation with absolute boundary conditions on a 5×5×3
/// (x, y_1, t) grid, n = 2 and 3.
inline CriterionResult criterion_model_solution(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(3, "model-solution", 300, opt);
    auto rng = detail::criterion_rng(opt.seed, 3);
    const double xs[] = {0.1, 0.35, 0.6, 0.85, 1.1};
    const double ys[] = {-0.8, -0.4, 0.0, 0.4, 0.8};
    const double ts[] = {0.5, 1.0, 1.5};
    double pde = 0, dir = 0, neu = 0;
    try {
        for (int n : {2, 3}) {
            const ModelKernel K = model_solution(detail::random_model_curvature(n, rng));
            const HalfSpacePoint q(0.6, std::vector<double>(n - 1, 0.0));
            struct Job {
                double x, y, t;
            };
            std::vector<Job> jobs;
            for (double x : xs)
                for (double y : ys)
                    for (double t : ts) jobs.push_back({x, y, t});
            auto point_y = [n](double y) {
                std::vector<double> v(n - 1, 0.0);
                v[0] = y;
                return v;
            };
            // Module internals already run in parallel; the grid itself is walked sequentially.
            for (const auto& j : jobs) pde = std::max(pde, heat_residual(K, j.t, HalfSpacePoint(j.x, point_y(j.y)), q, opt.quadrature));
            for (double y : ys)
                for (double t : ts) {
                    const auto r = absolute_boundary_residuals(K, t, point_y(y), q, opt.quadrature);
                    dir = std::max(dir, r.dirichlet);
                    neu = std::max(neu, r.neumann);
                }
        }
    } catch (const Error& e) {
        b.fail("evaluation", e.what());
        return b.finish();
    }
    b.bound("pde residual", pde, 1e-6);
    b.bound("dirichlet residual", dir, 1e-6);
    b.bound("neumann residual", neu, 1e-6);
    return b.finish();
}

/// 4. The three-term diagonal formula against direct diagonal evaluation at t = 1, x ∈ {0.2, 1}.
inline CriterionResult criterion_diagonal(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(4, "diagonal-formula", 120, opt);
    auto rng = detail::criterion_rng(opt.seed, 4);
    double worst = 0;
    try {
        for (int n : {2, 3}) {
            const ModelKernel K = model_solution(detail::random_model_curvature(n, rng));
            for (double x : {0.2, 1.0})
                worst = std::max(worst, (diagonal_restriction(K, x, opt.quadrature) - diagonal_direct(K, x, opt.quadrature)).max_abs());
        }
    } catch (const Error& e) {
        b.fail("evaluation", e.what());
        return b.finish();
    }
    b.bound("diagonal mismatch", worst, 1e-6);
    return b.finish();
}

/// 5. c by the erfc-reduced route and the raw triple integral, and under tolerance halving.
inline CriterionResult criterion_constant_c(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(5, "constant-c", 60, opt);
    try {
        const CrossChecked c = constant_c(opt.quadrature);
        const CrossChecked h = constant_c(opt.quadrature.halved());
        b.bound("route agreement", c.difference(), 1e-8);
        b.bound("halving stability", std::abs(c.value - h.value), 1e-8);
        std::ostringstream s;
        s.precision(12);
        s << "c = " << c.value << " +- " << std::max(c.error, c.difference());
        b.note(s.str());
    } catch (const ToleranceFailure& e) {
        b.fail(e.check(), e.what());
    }
    return b.finish();
}

/// 6. ζ_T'(0) = -ln 2L on the interval family; ln T - ln τ independent of L.
inline CriterionResult criterion_interval_torsion(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(6, "interval-torsion", 120, opt);
    const double lengths[] = {0.25, 0.5, 1.0, 2.0, 4.0};
    double zeta_err = 0, spread = 0;
    std::ostringstream note;
    note.precision(12);
    try {
        for (auto bc : {BoundaryCondition::absolute, BoundaryCondition::relative}) {
            const double ref = interval_anomaly(1.0, bc).anomaly;
            for (double L : lengths) {
                const auto s = interval_spectrum(L, bc);
                zeta_err = std::max(zeta_err, std::abs(zeta_torsion_split(s, opt.quadrature).log_torsion + std::log(2 * L)));
                zeta_err = std::max(zeta_err, std::abs(zeta_torsion(s).log_torsion + std::log(2 * L)));
                spread = std::max(spread, std::abs(interval_anomaly(L, bc).anomaly - ref));
            }
            note << (bc == BoundaryCondition::absolute ? "" : ", ") << to_string(bc) << " ln T - ln tau = " << ref;
        }
    } catch (const Error& e) {
        b.fail("evaluation", e.what());
        return b.finish();
    }
    b.bound("zeta_T'(0) + ln 2L", zeta_err, 1e-7);
    b.bound("anomaly spread over L", spread, 1e-8);
    note << " (chi ln 2 = " << 2 * std::numbers::ln2 << ")";
    b.note(note.str());
    return b.finish();
}

/// 7. Transgression density ≡ 0 in odd n and φ density ≡ 0 in even n on 100 random (R, h).
inline CriterionResult criterion_parity(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(7, "parity-vanishing", 60, opt);
    auto rng = detail::criterion_rng(opt.seed, 7);
    double vanishing = 0;
    int nonzero_counterparts = 0;
    for (int draw = 0; draw < 100; ++draw) {
        const int n = 2 + draw % 4;
        const auto cd = random_curvature<double>(n, rng);
        const double t = transgression_density(cd, opt.berezin);
        const double phi = phi_density(cd, opt.berezin);
        vanishing = std::max(vanishing, std::abs(n % 2 ? t : phi));
        nonzero_counterparts += (n % 2 ? phi : t) != 0;
    }
    b.exact("max |vanishing density|", vanishing);
    b.note(std::to_string(nonzero_counterparts) + "/100 counterpart densities nonzero");
    if (nonzero_counterparts < 50) b.fail("non-degeneracy", "counterpart densities are suspiciously often zero");
    return b.finish();
}

/// 8. ∫_M (e(g) - e(g_0)) = ∫_∂M ẽ on the flat disc and the curved cap, and Gauss–Bonnet on the
/// round sphere (which pins the absolute normalization of the Euler form).
inline CriterionResult criterion_stokes(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(8, "transgression-stokes", 120, opt);
    try {
        for (const auto& geo : {flat_disc(), curved_cap()}) {
            const double boundary = transgression_boundary_integral(geo, opt.quadrature, opt.berezin).value;
            const double interior = euler_difference(geo, 40, opt.berezin);
            b.bound("stokes " + geo.name, std::abs(interior - boundary), 1e-6);
        }
        const double sphere = interior_euler_integral(round_sphere(1.3), {0, std::numbers::pi / 2, std::numbers::pi}, 40, opt.berezin);
        b.bound("gauss-bonnet S2", std::abs(sphere - 2), 1e-6);
    } catch (const Error& e) {
        b.fail("evaluation", e.what());
    }
    return b.finish();
}

/// 9. On product collars the prediction is exactly rank χ(∂M) ln 2.
inline CriterionResult criterion_product(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(9, "product-prediction", 60, opt);
    double worst = 0;
    try {
        for (int n : {1, 2, 3})
            for (int rank : {1, 2, 3}) {
                const auto geo = product_collar(n);
                const auto p = predict_anomaly(geo, rank, constant_c_closed_form(), 0, opt.quadrature, opt.berezin);
                worst = std::max({worst, std::abs(p.term_transgression), std::abs(p.term_phi),
                                  std::abs(p.prediction - rank * geo.boundary_euler_characteristic * std::numbers::ln2)});
            }
    } catch (const Error& e) {
        b.fail("evaluation", e.what());
        return b.finish();
    }
    b.exact("geometric terms and residual", worst);
    return b.finish();
}

/// 10. Subdivision invariance of τ on paths and cycles; exact basis-change covariance.
inline CriterionResult criterion_r_torsion(const AcceptanceOptions& opt) {
    detail::CriterionBuilder b(10, "r-torsion-invariance", 60, opt);
    auto rng = detail::criterion_rng(opt.seed, 10);
    double subdivision = 0;
    int covariance_failures = 0;
    try {
        const std::vector<OneComplex> complexes = {
            path_complex(Rational(1)),           path_complex(Rational(7, 3), 3),  path_complex(Rational(2), 1, true),
            path_complex(Rational(5), 2, true),  cycle_complex(Rational(1)),       cycle_complex(Rational(3), 2),
            cycle_complex(Rational(2), 1, -1),   cycle_complex(Rational(3), 3, -1)};
        for (const auto& c : complexes) {
            const double base = r_torsion(based_complex(c)).log_tau;
            OneComplex s = c;
            for (int level = 1; level <= 3; ++level) {
                s = subdivide(s);
                subdivision = std::max(subdivision, std::abs(r_torsion(based_complex(s)).log_tau - base));
            }
        }
        BasedCochainComplex cx = based_complex(cycle_complex(Rational(2), 3));
        cx = direct_sum(direct_sum(cx, based_complex(cycle_complex(Rational(2), 2))), based_complex(cycle_complex(Rational(2), 4)));
        for (int trial = 0; trial < 40; ++trial) {
            const int p = trial % 2;
            const RationalMatrix A = random_invertible(3, rng);
            const Rational det = abs(determinant(A));
            BasedCochainComplex changed = cx;
            changed.cohomology[p].cocycles = changed.cohomology[p].cocycles * A;
            const auto before = r_torsion(cx, TorsionConvention::milnor);
            const auto after = r_torsion(changed, TorsionConvention::milnor);
            const Rational expected = p == 0 ? Rational(before.rational_part * det) : Rational(before.rational_part / det);
            if (after.rational_part != expected) ++covariance_failures;
        }
    } catch (const Error& e) {
        b.fail("evaluation", e.what());
        return b.finish();
    }
    b.bound("subdivision drift", subdivision, 1e-12);
    b.exact("covariance failures", covariance_failures);
    return b.finish();
}

inline const std::vector<std::function<CriterionResult(const AcceptanceOptions&)>>& acceptance_criteria() {
    static const std::vector<std::function<CriterionResult(const AcceptanceOptions&)>> all = {
        criterion_supertrace, criterion_commutator,       criterion_model_solution, criterion_diagonal,
        criterion_constant_c, criterion_interval_torsion, criterion_parity,         criterion_stokes,
        criterion_product,    criterion_r_torsion};
    return all;
}

/// Runs the selected criteria in order; `on_result` sees each result as soon as it is ready.
inline std::vector<CriterionResult> acceptance_suite(const AcceptanceOptions& opt = {},
                                                     const std::function<void(const CriterionResult&)>& on_result = {}) {
    const auto& all = acceptance_criteria();
    for (int id : opt.only)
        if (id < 1 || id > int(all.size())) throw InputError("no acceptance criterion " + std::to_string(id));
    std::vector<CriterionResult> out;
    for (int id = 1; id <= int(all.size()); ++id) {
        if (!opt.only.empty() && std::find(opt.only.begin(), opt.only.end(), id) == opt.only.end()) continue;
        out.push_back(all[id - 1](opt));
        if (on_result) on_result(out.back());
    }
    return out;
}

} // namespace torsion
