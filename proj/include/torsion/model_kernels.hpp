#pragma once

// Half-space model problem: scalar Dirichlet/Neumann heat kernels on ℝ_+ × ℝ^{n-1}, the
// operator-valued kernels K_0, K_1 and the two-term Duhamel solution K, the boundary
// profile functions, and the constant c.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "torsion/boundary_operator.hpp"
#include "torsion/curvature.hpp"
#include "torsion/quadrature.hpp"

namespace torsion {

struct HalfSpacePoint {
    double x = 0;
    std::vector<double> y;

    HalfSpacePoint() = default;
    HalfSpacePoint(double x_, std::vector<double> y_) : x(x_), y(std::move(y_)) {
        if (!(x >= 0)) throw InputError("half-space point needs x >= 0");
    }
    int dimension() const { return int(y.size()) + 1; }
};

namespace detail {

inline void require_positive_time(double t) {
    if (!(t > 0)) throw InputError("heat kernels need t > 0");
}

inline double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
    require_same_dimension(int(a.size()), int(b.size()), "tangential distance");
    double d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] - b[i]) * (a[i] - b[i]);
    return d;
}

} // namespace detail

/// Normal factor of a half-space kernel. image_difference is K_N - K_D, i.e. twice the image term.
enum class NormalProfile { neumann, dirichlet, image_difference };

/// Normal factor in terms of d = x - x' and σ = x + x', including its (4πt)^{-1/2}. Taking d
/// directly keeps narrow bumps resolved to full relative precision.
inline double normal_profile_split(NormalProfile p, double t, double d, double sigma) {
    detail::require_positive_time(t);
    const double norm = 1.0 / std::sqrt(4 * std::numbers::pi * t);
    const double direct = std::exp(-d * d / (4 * t));
    const double image = std::exp(-sigma * sigma / (4 * t));
    switch (p) {
    case NormalProfile::neumann: return norm * (direct + image);
    case NormalProfile::dirichlet: return norm * (direct - image);
    case NormalProfile::image_difference: return 2 * norm * image;
    }
    return 0;
}

/// One-dimensional normal factor. Defined for all real x, x' (the image formulas extend
/// smoothly across x = 0).
inline double normal_profile(NormalProfile p, double t, double x, double xp) {
    return normal_profile_split(p, t, x - xp, x + xp);
}

/// Free Gaussian on ℝ^m, m = number of tangential coordinates.
inline double tangential_gaussian(double t, const std::vector<double>& y, const std::vector<double>& yp) {
    detail::require_positive_time(t);
    const double m = double(y.size());
    return std::pow(4 * std::numbers::pi * t, -0.5 * m) * std::exp(-detail::squared_distance(y, yp) / (4 * t));
}

inline double k_dirichlet(double t, const HalfSpacePoint& p, const HalfSpacePoint& q) {
    return normal_profile(NormalProfile::dirichlet, t, p.x, q.x) * tangential_gaussian(t, p.y, q.y);
}

inline double k_neumann(double t, const HalfSpacePoint& p, const HalfSpacePoint& q) {
    return normal_profile(NormalProfile::neumann, t, p.x, q.x) * tangential_gaussian(t, p.y, q.y);
}

enum class KernelKind { dirichlet, neumann, k0, k1, solution };

inline const char* to_string(KernelKind k) {
    switch (k) {
    case KernelKind::dirichlet: return "K_D";
    case KernelKind::neumann: return "K_N";
    case KernelKind::k0: return "K_0";
    case KernelKind::k1: return "K_1";
    case KernelKind::solution: return "K";
    }
    return "?";
}

using Operator = BoundaryOperator<double>;

/// profile(t) · G_t(y - y') · Σ_k t^k series[k].
struct KernelTerm {
    NormalProfile profile;
    std::vector<Operator> series;
};

class ModelKernel;

ModelKernel assemble_k0(const BiGradedElement<double>& R);
ModelKernel assemble_k1(const BiGradedElement<double>& R);

/// Operator-valued half-space kernel. For the solution K the value is
/// Σ terms − (correction_left ⋆ correction_right).
class ModelKernel {
public:
    ModelKernel(int n, BiGradedElement<double> R, KernelKind kind, std::vector<KernelTerm> terms)
        : n_(n), R_(std::move(R)), kind_(kind), terms_(std::move(terms)) {}

    int dimension() const { return n_; }
    KernelKind kind() const { return kind_; }
    const BiGradedElement<double>& curvature() const { return R_; }
    const std::vector<KernelTerm>& terms() const { return terms_; }
    bool is_zero() const {
        for (const auto& term : terms_)
            for (const auto& c : term.series)
                if (!c.is_zero()) return false;
        return correction_.empty();
    }

    /// Closed-form part only (everything except a Duhamel correction).
    Operator explicit_value(double t, const HalfSpacePoint& p, const HalfSpacePoint& q) const {
        check_points(p, q);
        detail::require_positive_time(t);
        Operator out(n_);
        const double g = tangential_gaussian(t, p.y, q.y);
        for (const auto& term : terms_) {
            const double w = normal_profile(term.profile, t, p.x, q.x) * g;
            double tp = 1;
            for (const auto& c : term.series) {
                out += c * (w * tp);
                tp *= t;
            }
        }
        return out;
    }

    Operator value(double t, const HalfSpacePoint& p, const HalfSpacePoint& q, const QuadratureSpec& spec = {}) const;

    static ModelKernel zero(int n) { return {n, BiGradedElement<double>(n), KernelKind::k1, {}}; }

private:
    friend ModelKernel model_solution(const BiGradedElement<double>& R);

    void check_points(const HalfSpacePoint& p, const HalfSpacePoint& q) const {
        require_same_dimension(p.dimension(), n_, "kernel point");
        require_same_dimension(q.dimension(), n_, "kernel point");
    }

    int n_;
    BiGradedElement<double> R_;
    KernelKind kind_;
    std::vector<KernelTerm> terms_;
    std::vector<ModelKernel> correction_; // empty, or {left, right}
};

namespace detail {

inline void require_curvature_degree(const BiGradedElement<double>& R) {
    for (const auto& [k, v] : R.terms())
        if (popcount(k.plain) != 2 || popcount(k.hatted) != 2)
            throw InputError("model kernels need a curvature element of bidegree (2,2)");
}

inline std::vector<Operator> exp_series(const BiGradedElement<double>& R, const Operator& left) {
    std::vector<Operator> out;
    for (const auto& c : nilpotent_exp_series(R)) out.push_back(left * Operator::left(c));
    return out;
}

/// R_0 = ¼R_{0jkl}e^0e^jê^kê^l: exactly the terms of R containing e^0.
inline BiGradedElement<double> normal_part(const BiGradedElement<double>& R) {
    BiGradedElement<double> out(R.dimension());
    for (const auto& [k, v] : R.terms())
        if (k.plain & 1u) out.add_term(k, v);
    return out;
}

/// Duhamel-time cells closer than this (relative) to either endpoint are dropped. Every
/// integrand here is O(√s) there, so the discarded mass is O(δ^{3/2}).
inline constexpr double kEndpointCut = 1e-14;

/// Breakpoints resolving a Gaussian bump of width w at c out to r widths.
inline std::vector<double> gaussian_breaks(double c, double w, double r) {
    return {c - r * w, c - 3 * w, c - w, c, c + w, c + 3 * w, c + r * w};
}

} // namespace detail

inline ModelKernel dirichlet_kernel(int n) {
    return {n, BiGradedElement<double>(n), KernelKind::dirichlet, {{NormalProfile::dirichlet, {Operator::identity(n)}}}};
}

inline ModelKernel neumann_kernel(int n) {
    return {n, BiGradedElement<double>(n), KernelKind::neumann, {{NormalProfile::neumann, {Operator::identity(n)}}}};
}

/// K_0 = P_N K_N e^{-tR} + P_D K_D e^{-tR}.
inline ModelKernel assemble_k0(const BiGradedElement<double>& R) {
    detail::require_curvature_degree(R);
    const int n = R.dimension();
    return {n, R, KernelKind::k0,
            {{NormalProfile::neumann, detail::exp_series(R, Operator::neumann_projection(n))},
             {NormalProfile::dirichlet, detail::exp_series(R, Operator::dirichlet_projection(n))}}};
}

/// K_1 = (∂_t + Δ + R)K_0 = R_0 (K_N - K_D) e^{-tR}.
inline ModelKernel assemble_k1(const BiGradedElement<double>& R) {
    detail::require_curvature_degree(R);
    const int n = R.dimension();
    return {n, R, KernelKind::k1,
            {{NormalProfile::image_difference, detail::exp_series(R, Operator::left(detail::normal_part(R)))}}};
}

/// K = K_0 - K_0 ⋆ K_1. Further Duhamel terms vanish since R_0 ∧ R_0 = 0.
inline ModelKernel model_solution(const BiGradedElement<double>& R) {
    ModelKernel k0 = assemble_k0(R);
    ModelKernel out(R.dimension(), R, KernelKind::solution, k0.terms());
    out.correction_ = {std::move(k0), assemble_k1(R)};
    return out;
}

/// Operator coefficients γ_j of s^j in Σ_{k,m} a_k b_m s^k (t-s)^m.
inline std::vector<Operator> convolution_coefficients(const std::vector<Operator>& a, const std::vector<Operator>& b,
                                                      double t, int n) {
    std::vector<Operator> out(a.size() + b.size(), Operator(n));
    for (std::size_t k = 0; k < a.size(); ++k)
        for (std::size_t m = 0; m < b.size(); ++m) {
            const Operator ab = a[k] * b[m];
            if (ab.is_zero()) continue;
            double binom = 1;
            for (std::size_t i = 0; i <= m; ++i) {
                // (t-s)^m = Σ_i C(m,i) t^{m-i} (-s)^i
                const double w = binom * std::pow(t, double(m - i)) * ((i % 2) ? -1.0 : 1.0);
                out[k + i] += ab * w;
                binom = binom * double(m - i) / double(i + 1);
            }
        }
    while (!out.empty() && out.back().is_zero()) out.pop_back();
    return out;
}

/// ∫_0^t s^j ∫_0^∞ a(s; x, x') b(t-s; x', x'') dx' ds for j = 0..moments-1.
inline std::vector<QuadratureResult> profile_convolution_moments(NormalProfile a, NormalProfile b, double t, double x,
                                                                 double xpp, std::size_t moments,
                                                                 const QuadratureSpec& spec) {
    const double r = spec.truncation_radius;
    const double upper = std::max(x, xpp) + 2 * r * std::sqrt(t);
    // The inner integral runs two digits tighter so its noise stays below the outer tolerance.
    QuadratureSpec inner_spec = spec;
    inner_spec.abs_tol *= 0.01;
    inner_spec.rel_tol *= 0.01;
    // x' = c + z with c the centre of the narrower of the two bumps.
    auto inner = [&](double s) {
        const double u = t - s;
        const bool left = s <= u;
        const double c = left ? x : xpp;
        const double w = 2 * std::sqrt(std::min(s, u));
        auto pts = detail::gaussian_breaks(0, w, r);
        const double other = (left ? xpp : x) - c, wo = 2 * std::sqrt(std::max(s, u));
        for (double k : {-1.0, 0.0, 1.0}) pts.push_back(other + k * wo);
        const auto breaks = make_breaks(pts, -c, upper - c);
        return integrate_pieces(
            [&](double z) {
                const double xp = c + z;
                const double da = left ? -z : x - xp, db = left ? xp - xpp : z;
                return normal_profile_split(a, s, da, x + xp) * normal_profile_split(b, u, db, xp + xpp);
            },
            breaks, inner_spec, "convolution x' at s=" + detail::sci(s));
    };
    std::vector<QuadratureResult> out;
    for (std::size_t j = 0; j < moments; ++j) {
        QuadratureResult inner_err;
        auto f = [&](double s) {
            if (s <= detail::kEndpointCut * t || s >= (1 - detail::kEndpointCut) * t) return 0.0;
            const auto in = inner(s);
            inner_err.error = std::max(inner_err.error, in.error);
            return std::pow(s, double(j)) * in.value;
        };
        auto res = integrate_pieces(f, {0, 0.5 * t, t}, spec, "convolution s");
        res.error += inner_err.error * t;
        out.push_back(res);
    }
    return out;
}

/// k1 ⋆ k2 (t; p, p'') = ∫_0^t ∫_{ℝ^n_+} k1(s; p, p') k2(t-s; p', p'') dp' ds with the y'
/// integral done in closed form and (s, x') by quadrature.
inline Operator convolve(const ModelKernel& k1, const ModelKernel& k2, double t, const HalfSpacePoint& p,
                         const HalfSpacePoint& q, const QuadratureSpec& spec = {}, double* error = nullptr) {
    require_same_dimension(k1.dimension(), k2.dimension(), "convolve");
    require_same_dimension(p.dimension(), k1.dimension(), "convolve point");
    require_same_dimension(q.dimension(), k1.dimension(), "convolve point");
    detail::require_positive_time(t);
    spec.validate();
    const int n = k1.dimension();
    const double g = tangential_gaussian(t, p.y, q.y);
    Operator out(n);
    double err = 0;
    for (const auto& a : k1.terms())
        for (const auto& b : k2.terms()) {
            const auto gamma = convolution_coefficients(a.series, b.series, t, n);
            if (gamma.empty()) continue;
            const auto m = profile_convolution_moments(a.profile, b.profile, t, p.x, q.x, gamma.size(), spec);
            for (std::size_t j = 0; j < gamma.size(); ++j) {
                out += gamma[j] * (g * m[j].value);
                err += gamma[j].max_abs() * g * m[j].error;
            }
        }
    if (error) *error = err;
    return out;
}

inline Operator ModelKernel::value(double t, const HalfSpacePoint& p, const HalfSpacePoint& q,
                                   const QuadratureSpec& spec) const {
    Operator out = explicit_value(t, p, q);
    if (!correction_.empty()) out -= convolve(correction_[0], correction_[1], t, p, q, spec);
    return out;
}

/// max|(∂_t - Σ∂_i² + R)K| at (t, p) with source q: central difference in t (step 1e-4),
/// fourth-order five-point stencils in space (step 0.02). p.x must be at least 0.04.
inline double heat_residual(const ModelKernel& K, double t, const HalfSpacePoint& p, const HalfSpacePoint& q,
                            const QuadratureSpec& spec = {}) {
    const double h = 0.02, tau = 1e-4;
    if (p.x < 2 * h) throw InputError("heat residual needs x >= 0.04");
    if (t <= tau) throw InputError("heat residual needs t > 1e-4");
    const int n = K.dimension();
    auto at = [&](double dt, int dir, double d) {
        HalfSpacePoint r = p;
        if (dir == 0) r.x += d;
        else r.y[dir - 1] += d;
        return K.value(t + dt, r, q, spec);
    };
    const Operator k = at(0, 0, 0);
    Operator res = (at(tau, 0, 0) - at(-tau, 0, 0)) * (1 / (2 * tau));
    for (int dir = 0; dir < n; ++dir)
        res -= (at(0, dir, 2 * h) * -1.0 + at(0, dir, h) * 16.0 + k * -30.0 + at(0, dir, -h) * 16.0 +
                at(0, dir, -2 * h) * -1.0) *
               (1 / (12 * h * h));
    res += Operator::left(K.curvature()) * k;
    return res.max_abs();
}

struct BoundaryResiduals {
    double dirichlet = 0; ///< max|P_D K| at x = 0
    double neumann = 0;   ///< max|P_N ∂_x K| at x = 0
};

/// Absolute boundary conditions at (t, (0, y)); ∂_x by the one-sided fourth-order stencil, step 0.01.
inline BoundaryResiduals absolute_boundary_residuals(const ModelKernel& K, double t, const std::vector<double>& y,
                                                     const HalfSpacePoint& q, const QuadratureSpec& spec = {}) {
    const int n = K.dimension();
    const double h = 0.01;
    const double w[5] = {-25, 48, -36, 16, -3};
    Operator dx(n);
    for (int i = 0; i < 5; ++i) dx += K.value(t, HalfSpacePoint(i * h, y), q, spec) * (w[i] / (12 * h));
    const Operator d = Operator::dirichlet_projection(n) * K.value(t, HalfSpacePoint(0, y), q, spec);
    const Operator nn = Operator::neumann_projection(n) * dx;
    return {d.max_abs(), nn.max_abs()};
}

/// Two independent evaluations of the same quantity.
struct CrossChecked {
    double value = 0;     ///< primary route
    double error = 0;     ///< quadrature error estimate of the primary route
    double alternate = 0; ///< independent route
    double alternate_error = 0;
    double difference() const { return std::abs(value - alternate); }
};

namespace detail {

inline double half_sqrt_su(double s) { return 2 * std::sqrt(s * (1 - s)); }

/// Endpoint-robust s-integral over (0, 1).
template <class F>
QuadratureResult integrate_unit_s(F&& f, const QuadratureSpec& spec, const std::string& check) {
    QuadratureSpec ts = spec;
    if (ts.method == QuadratureMethod::adaptive) ts.method = QuadratureMethod::tanh_sinh;
    return integrate([&](double s) { return (s <= kEndpointCut || s >= 1 - kEndpointCut) ? 0.0 : f(s); }, 0.0, 1.0, ts,
                     check);
}

} // namespace detail

/// f(x) after the x' integral is reduced to error functions:
/// -2∫_0^1 √(πs(1-s)) [e^{-x²} erfc(-x(1-2s)/(2√(s(1-s)))) + erfc(x/(2√(s(1-s))))] ds.
inline QuadratureResult f_of_x_reduced(double x, const QuadratureSpec& spec = {}) {
    if (!(x >= 0)) throw InputError("f(x) needs x >= 0");
    auto integrand = [&](double s) {
        const double w = detail::half_sqrt_su(s);
        return std::sqrt(std::numbers::pi * s * (1 - s)) *
               (std::exp(-x * x) * std::erfc(-x * (1 - 2 * s) / w) + std::erfc(x / w));
    };
    auto r = detail::integrate_unit_s(integrand, spec, "f(x) erfc route");
    r.value *= -2;
    r.error *= 2;
    return r;
}

/// f(x) as the literal double integral over (s, x').
inline QuadratureResult f_of_x_direct(double x, const QuadratureSpec& spec = {}) {
    if (!(x >= 0)) throw InputError("f(x) needs x >= 0");
    const double upper = x + 2 * spec.truncation_radius;
    double inner_err = 0;
    // x' = x + z keeps the s → 0 bump at full precision.
    auto outer = [&](double s) {
        const double u = 1 - s;
        auto pts = detail::gaussian_breaks(0, 2 * std::sqrt(s), spec.truncation_radius);
        pts.push_back(2 * std::sqrt(u) - x);
        const auto breaks = make_breaks(pts, -x, upper - x);
        auto r = integrate_pieces(
            [&](double z) {
                const double sigma = 2 * x + z;
                return (std::exp(-z * z / (4 * s)) + std::exp(-sigma * sigma / (4 * s))) * 2 *
                       std::exp(-sigma * sigma / (4 * u));
            },
            breaks, spec, "f(x) direct x'");
        inner_err = std::max(inner_err, r.error);
        return r.value;
    };
    auto r = detail::integrate_unit_s(outer, spec, "f(x) direct s");
    return {-r.value, r.error + inner_err};
}

/// f(x) by the erfc route, cross-checked by the direct double integral.
inline CrossChecked f_of_x(double x, const QuadratureSpec& spec = {}) {
    const auto a = f_of_x_reduced(x, spec);
    const auto b = f_of_x_direct(x, spec);
    return {a.value, a.error, b.value, b.error};
}

/// Normal profile of the Duhamel term on the diagonal at t = 1:
/// F(x) = [K_D ⋆ (K_N - K_D)](1; x, x) in one dimension
///      = (1/(2√π)) ∫_0^1 [e^{-x²} erfc(-x(1-2s)/(2√(s(1-s)))) - erfc(x/(2√(s(1-s))))] ds.
inline QuadratureResult duhamel_profile(double x, const QuadratureSpec& spec = {}) {
    if (!(x >= 0)) throw InputError("diagonal profile needs x >= 0");
    auto integrand = [&](double s) {
        const double w = detail::half_sqrt_su(s);
        return std::exp(-x * x) * std::erfc(-x * (1 - 2 * s) / w) - std::erfc(x / w);
    };
    auto r = detail::integrate_unit_s(integrand, spec, "diagonal profile");
    const double k = 0.5 / std::sqrt(std::numbers::pi);
    return {k * r.value, k * r.error};
}

/// K(1; p, p) for p = (x, y), in closed form up to the 1D profile integral:
/// (4π)^{-n/2}[L(E) + e^{-x²}(P_N - P_D)L(E)] - (4π)^{-(n-1)/2} F(x) L(R_0 E), E = e^{-R}.
inline Operator diagonal_restriction(const ModelKernel& K, double x, const QuadratureSpec& spec = {}) {
    if (K.kind() != KernelKind::solution) throw InputError("diagonal_restriction needs the model solution K");
    if (!(x >= 0)) throw InputError("diagonal_restriction needs x >= 0");
    const int n = K.dimension();
    const auto E = nilpotent_exp(-K.curvature());
    const double a = std::pow(4 * std::numbers::pi, -0.5 * n);
    const double b = std::pow(4 * std::numbers::pi, -0.5 * (n - 1));
    Operator out = Operator::left(E) * a;
    out += Operator(E, -E) * (a * std::exp(-x * x));
    out -= Operator::left(wedge(detail::normal_part(K.curvature()), E)) * (b * duhamel_profile(x, spec).value);
    return out;
}

/// Direct evaluation of K(1; p, p) at p = (x, 0).
inline Operator diagonal_direct(const ModelKernel& K, double x, const QuadratureSpec& spec = {}) {
    const HalfSpacePoint p(x, std::vector<double>(std::size_t(K.dimension() - 1), 0.0));
    return K.value(1.0, p, p, spec);
}

/// c = -∫_0^∞ x f(x) dx (erfc route), cross-checked by the raw triple integral.
inline CrossChecked constant_c(const QuadratureSpec& spec = {}) {
    spec.validate();
    const double X = spec.truncation_radius + 1;
    double err_in = 0;
    auto reduced = integrate(
        [&](double x) {
            const auto f = f_of_x_reduced(x, spec);
            err_in = std::max(err_in, f.error);
            return -x * f.value;
        },
        0.0, X, spec, "c erfc route");
    reduced.error += err_in * X * X / 2;

    double err_raw = 0;
    auto raw = integrate(
        [&](double x) {
            const auto f = f_of_x_direct(x, spec);
            err_raw = std::max(err_raw, f.error);
            return -x * f.value;
        },
        0.0, X, spec, "c raw route");
    raw.error += err_raw * X * X / 2;

    CrossChecked out{reduced.value, reduced.error, raw.value, raw.error};
    const double allowed = std::max(1e-8, 10 * (out.error + out.alternate_error));
    if (out.difference() > allowed)
        throw ToleranceFailure("constant_c", "routes disagree by " + std::to_string(out.difference()));
    return out;
}

/// Closed form of c, used as an analytic oracle: 11 π^{3/2} / 64.
inline double constant_c_closed_form() { return 11 * std::pow(std::numbers::pi, 1.5) / 64; }

/// Algebraic termination of the Duhamel series: every coefficient product of K_1 with itself is
/// zero, so K_0 ⋆ K_1 ⋆ K_1 vanishes identically.
template <Scalar S>
bool duhamel_terminates(const CurvatureData<S>& cd) {
    const auto R = curvature_element(cd);
    const auto R0 = normal_curvature_element(cd);
    const auto series = nilpotent_exp_series(R);
    for (const auto& a : series)
        for (const auto& b : series) {
            const auto A = BoundaryOperator<S>::left(wedge(R0, a));
            const auto B = BoundaryOperator<S>::left(wedge(R0, b));
            if (!(A * B).is_zero()) return false;
        }
    return true;
}

} // namespace torsion
