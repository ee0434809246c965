#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "torsion/error.hpp"

namespace torsion {

enum class QuadratureMethod { adaptive, tanh_sinh, product_gauss };

inline const char* to_string(QuadratureMethod m) {
    switch (m) {
    case QuadratureMethod::adaptive: return "adaptive";
    case QuadratureMethod::tanh_sinh: return "tanh-sinh";
    case QuadratureMethod::product_gauss: return "product-Gauss";
    }
    return "?";
}

inline QuadratureMethod quadrature_method_from_string(const std::string& s) {
    if (s == "adaptive") return QuadratureMethod::adaptive;
    if (s == "tanh-sinh" || s == "tanh_sinh") return QuadratureMethod::tanh_sinh;
    if (s == "product-Gauss" || s == "product-gauss" || s == "product_gauss") return QuadratureMethod::product_gauss;
    throw InputError("unknown quadrature method '" + s + "'");
}

struct QuadratureSpec {
    QuadratureMethod method = QuadratureMethod::adaptive;
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    /// Maximum bisection depth of the adaptive rule.
    unsigned max_subdivisions = 18;
    /// Truncation radius for unbounded directions, in units of the Gaussian width 2√t.
    /// A radius r discards at most e^{-r^2} relative mass.
    double truncation_radius = 7.0;
    /// Node count per direction for product Gauss rules.
    unsigned gauss_points = 48;

    void validate() const {
        if (!(abs_tol > 0) || !(rel_tol > 0)) throw InputError("quadrature tolerances must be positive");
        if (!(truncation_radius > 0)) throw InputError("truncation radius must be positive");
        if (gauss_points < 2) throw InputError("product Gauss rules need at least two points");
    }

    /// Tail bound e^{-r^2} of the Gaussian truncation.
    double truncation_tail() const { return std::exp(-truncation_radius * truncation_radius); }

    QuadratureSpec halved() const {
        QuadratureSpec s = *this;
        s.abs_tol /= 2;
        s.rel_tol /= 2;
        return s;
    }
};

namespace detail {
inline std::string sci(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}
} // namespace detail

struct QuadratureResult {
    double value = 0;
    double error = 0;
};

inline QuadratureResult& operator+=(QuadratureResult& a, const QuadratureResult& b) {
    a.value += b.value;
    a.error += b.error;
    return a;
}

/// Gauss–Legendre nodes and weights on [-1, 1] (Newton iteration on P_n).
struct GaussRule {
    std::vector<double> nodes, weights;
};

inline GaussRule gauss_legendre(unsigned n) {
    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    for (unsigned i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1, p1 = x;
            for (unsigned k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        if (n == 1) { x = 0; dp = 1; }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    if (n == 1) rule.weights[0] = 2;
    return rule;
}

namespace detail {

/// Globally adaptive Gauss–Kronrod (15/31): always bisects the cell with the largest error
/// estimate until the total error meets max(abs_tol, rel_tol |value|). Cells whose error is at
/// the roundoff floor of their L1 norm are retired rather than bisected.
template <class F>
QuadratureResult global_adaptive(F& f, double a, double b, const QuadratureSpec& spec) {
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    struct Cell {
        double a, b, value, error, l1;
        bool operator<(const Cell& o) const { return error < o.error; }
    };
    auto eval = [&](double lo, double hi) {
        double err = 0, l1 = 0;
        const double v = GK::integrate(f, lo, hi, 0, 0, &err, &l1);
        // Boost reports the non-adaptive error on the reference cell [-1, 1].
        return Cell{lo, hi, v, err * 0.5 * (hi - lo), l1};
    };
    constexpr double floor = 50 * std::numeric_limits<double>::epsilon();
    std::priority_queue<Cell> cells;
    std::vector<Cell> retired;
    auto push = [&](const Cell& c) {
        if (c.error <= floor * c.l1) retired.push_back(c);
        else cells.push(c);
    };
    const Cell first = eval(a, b);
    double value = first.value, error = first.error;
    push(first);
    const std::size_t max_cells = std::size_t(1) << std::min(spec.max_subdivisions, 16u);
    while (!cells.empty() && error > std::max(spec.abs_tol, spec.rel_tol * std::abs(value)) &&
           cells.size() + retired.size() < max_cells) {
        const Cell c = cells.top();
        const double mid = 0.5 * (c.a + c.b);
        if (!(mid > c.a && mid < c.b)) break;
        cells.pop();
        const Cell l = eval(c.a, mid), h = eval(mid, c.b);
        value += l.value + h.value - c.value;
        error += l.error + h.error - c.error;
        push(l);
        push(h);
    }
    // Re-sum to shed the drift of the running updates.
    for (; !cells.empty(); cells.pop()) retired.push_back(cells.top());
    std::sort(retired.begin(), retired.end(), [](const Cell& x, const Cell& y) { return x.a < y.a; });
    value = 0;
    error = 0;
    for (const auto& c : retired) {
        value += c.value;
        error += c.error;
    }
    return {value, error};
}

/// Integral without the tolerance check.
template <class F>
QuadratureResult integrate_unchecked(F& f, double a, double b, const QuadratureSpec& spec) {
    if (a == b) return {};
    QuadratureResult r;
    switch (spec.method) {
    case QuadratureMethod::tanh_sinh: {
        thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
        double l1 = 0;
        auto g = [&f](double v) -> double { return f(v); };
        // Boost stops one level after its difference estimate meets the tolerance; ask for a
        // margin so the certified estimate lands inside the requested bound.
        r.value = ts.integrate(g, a, b, 0.1 * spec.rel_tol, &r.error, &l1);
        break;
    }
    case QuadratureMethod::product_gauss: {
        const GaussRule rule = gauss_legendre(spec.gauss_points);
        const GaussRule low = gauss_legendre(spec.gauss_points / 2);
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        double coarse = 0, fine = 0;
        for (std::size_t i = 0; i < rule.nodes.size(); ++i) fine += rule.weights[i] * f(mid + half * rule.nodes[i]);
        for (std::size_t i = 0; i < low.nodes.size(); ++i) coarse += low.weights[i] * f(mid + half * low.nodes[i]);
        r.value = half * fine;
        r.error = std::abs(half * (fine - coarse));
        break;
    }
    case QuadratureMethod::adaptive: r = global_adaptive(f, a, b, spec); break;
    }
    return r;
}

inline void certify(const QuadratureResult& r, const QuadratureSpec& spec, const std::string& check) {
    if (!std::isfinite(r.value)) throw ToleranceFailure(check, "non-finite quadrature value");
    const double allowed = std::max(spec.abs_tol, spec.rel_tol * std::abs(r.value));
    if (r.error > allowed)
        throw ToleranceFailure(check, "error estimate " + sci(r.error) + " exceeds tolerance " + sci(allowed));
}

} // namespace detail

/// One-dimensional integral of f over [a, b] to the spec's tolerance; throws ToleranceFailure
/// naming `check` when the requested accuracy is not certified.
template <class F>
QuadratureResult integrate(F&& f, double a, double b, const QuadratureSpec& spec, const std::string& check = "quadrature") {
    spec.validate();
    const auto r = detail::integrate_unchecked(f, a, b, spec);
    detail::certify(r, spec, check);
    return r;
}

/// Integral over consecutive breakpoints; the pieces are summed left to right.
template <class F>
QuadratureResult integrate_pieces(F&& f, const std::vector<double>& breaks, const QuadratureSpec& spec,
                                  const std::string& check = "quadrature") {
    spec.validate();
    // The absolute tolerance is shared out so the certified total can meet it.
    QuadratureSpec piece = spec;
    std::size_t pieces = 0;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) pieces += breaks[i + 1] > breaks[i];
    if (pieces > 1) piece.abs_tol /= double(pieces);
    QuadratureResult total;
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i)
        if (breaks[i + 1] > breaks[i]) total += detail::integrate_unchecked(f, breaks[i], breaks[i + 1], piece);
    detail::certify(total, spec, check);
    return total;
}

/// Sorted, deduplicated breakpoints clipped to [lo, hi].
inline std::vector<double> make_breaks(std::vector<double> pts, double lo, double hi) {
    pts.push_back(lo);
    pts.push_back(hi);
    std::vector<double> out;
    for (double p : pts)
        if (p >= lo && p <= hi) out.push_back(p);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace torsion
