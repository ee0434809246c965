#pragma once

// Chart-level Riemannian geometry near a boundary {u_0 = 0}: finite-difference curvature in an
// orthonormal frame, second fundamental form, Euler density, collar normalization by normal
// geodesics, and the linear deformation family g_l = l g + (1 - l) g_0.

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "torsion/clifford.hpp"
#include "torsion/curvature.hpp"
#include "torsion/error.hpp"
#include "torsion/quadrature.hpp"

namespace torsion {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using MetricFunction = std::function<Matrix(const Vector&)>;

/// One chart coordinate: its range, and how boundary integrals sample it.
struct Axis {
    double lower = 0;
    double upper = 1;
    bool periodic = false;
    unsigned points = 16; ///< trapezoid nodes if periodic, Gauss–Legendre nodes otherwise
};

/// A chart u = (u_0, ..., u_{n-1}) with ∂M = {u_0 = 0}, u_0 increasing inward. The metric
/// callable must extend smoothly a few finite-difference steps past u_0 = 0.
struct MetricPatch {
    int n = 0;
    std::vector<Axis> axes;
    MetricFunction metric;
    double fd_step = 2e-3;
    /// Distance to the nearest coordinate singularity (polar axis); caps the FD step.
    std::function<double(const Vector&)> singular_distance;

    Matrix g(const Vector& u) const {
        if (u.size() != n) throw DimensionMismatch("metric point has the wrong dimension");
        Matrix m = metric(u);
        if (m.rows() != n || m.cols() != n) throw DimensionMismatch("metric callable returned the wrong shape");
        return m;
    }

    double step_at(const Vector& u) const {
        double h = fd_step;
        if (singular_distance) h = std::min(h, 0.25 * singular_distance(u));
        if (!(h > 0)) throw InputError("finite-difference step collapsed at a coordinate singularity");
        return h;
    }

    Vector boundary_point(const Vector& y) const {
        Vector u(n);
        u(0) = 0;
        for (int a = 1; a < n; ++a) u(a) = y(a - 1);
        return u;
    }
};

namespace detail {

/// Fourth-order central first derivative written in differences, so a function constant along
/// the direction gives exactly 0.
template <class F>
auto d1(F&& f, const Vector& u, int dir, double h) {
    using R = std::decay_t<decltype(f(u))>;
    Vector a = u, b = u, c = u, d = u;
    a(dir) += h;
    b(dir) -= h;
    c(dir) += 2 * h;
    d(dir) -= 2 * h;
    R out = ((f(a) - f(b)) * 8.0 - (f(c) - f(d))) / (12 * h);
    return out;
}

/// Fourth-order central second derivative in difference form.
template <class F>
auto d2(F&& f, const Vector& u, int dir, double h) {
    using R = std::decay_t<decltype(f(u))>;
    Vector a = u, b = u, c = u, d = u;
    a(dir) += h;
    b(dir) -= h;
    c(dir) += 2 * h;
    d(dir) -= 2 * h;
    const R f0 = f(u);
    R out = (((f(a) - f0) + (f(b) - f0)) * 16.0 - ((f(c) - f0) + (f(d) - f0))) / (12 * h * h);
    return out;
}

/// Columns: a g-orthonormal frame from Gram–Schmidt on the coordinate basis (∂_0 first).
inline Matrix orthonormal_frame(const Matrix& g) {
    const int n = int(g.rows());
    Matrix E = Matrix::Identity(n, n);
    for (int i = 0; i < n; ++i) {
        Vector v = E.col(i);
        for (int j = 0; j < i; ++j) v -= E.col(j) * (E.col(j).dot(g * v));
        const double norm2 = v.dot(g * v);
        if (!(norm2 > 0)) throw InputError("metric is not positive definite");
        E.col(i) = v / std::sqrt(norm2);
    }
    return E;
}

inline void require_positive_definite(const Matrix& g) {
    Eigen::LLT<Matrix> llt(g);
    if (llt.info() != Eigen::Success) throw InputError("metric is not positive definite");
}

} // namespace detail

/// Metric and its first and second coordinate derivatives at a point.
struct MetricJet {
    Matrix g;
    std::vector<Matrix> dg;               // dg[c] = ∂_c g
    std::vector<std::vector<Matrix>> ddg; // ddg[c][d] = ∂_c ∂_d g
};

inline MetricJet metric_jet(const MetricPatch& patch, const Vector& u) {
    const int n = patch.n;
    const double h = patch.step_at(u);
    auto G = [&](const Vector& v) { return patch.g(v); };
    MetricJet jet;
    jet.g = G(u);
    detail::require_positive_definite(jet.g);
    jet.dg.resize(n);
    jet.ddg.assign(n, std::vector<Matrix>(n));
    for (int c = 0; c < n; ++c) {
        jet.dg[c] = detail::d1(G, u, c, h);
        jet.ddg[c][c] = detail::d2(G, u, c, h);
    }
    for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
            auto dd = [&](const Vector& v) { return detail::d1(G, v, d, h); };
            jet.ddg[c][d] = detail::d1(dd, u, c, h);
            jet.ddg[d][c] = jet.ddg[c][d];
        }
    return jet;
}

/// Christoffel symbols Γ^a_{bc}, indexed [a][b][c].
inline std::vector<Matrix> christoffel(const Matrix& g, const std::vector<Matrix>& dg) {
    const int n = int(g.rows());
    const Matrix gi = g.inverse();
    std::vector<Matrix> gamma(n, Matrix::Zero(n, n));
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c) {
                double s = 0;
                for (int e = 0; e < n; ++e) s += gi(a, e) * (dg[b](e, c) + dg[c](e, b) - dg[e](b, c));
                gamma[a](b, c) = 0.5 * s;
            }
    return gamma;
}

/// Curvature at a point together with the symmetry residuals measured before projection.
struct CurvatureSample {
    CurvatureData<double> data;
    double symmetry_residual = 0;
    double bianchi_residual = 0;
    Matrix frame; ///< orthonormal frame used (columns)
};

/// Orthonormal-frame R_ijkl = <R(e_k,e_l)e_j, e_i> at u. Second fundamental form left 0.
inline CurvatureSample curvature_sample(const MetricPatch& patch, const Vector& u) {
    const int n = patch.n;
    const MetricJet jet = metric_jet(patch, u);
    const Matrix gi = jet.g.inverse();
    const auto gamma = christoffel(jet.g, jet.dg);
    // ∂_c Γ^a_{db} = ∂_c(g^{ae}) Γ_{e,db} + g^{ae} ∂_c Γ_{e,db}, with Γ_{e,db} = ½(∂_d g_eb + ∂_b g_ed - ∂_e g_db).
    auto gamma_lower = [&](int e, int d, int b) { return 0.5 * (jet.dg[d](e, b) + jet.dg[b](e, d) - jet.dg[e](d, b)); };
    auto d_gamma_lower = [&](int c, int e, int d, int b) {
        return 0.5 * (jet.ddg[c][d](e, b) + jet.ddg[c][b](e, d) - jet.ddg[c][e](d, b));
    };
    std::vector<Matrix> dgi(n);
    for (int c = 0; c < n; ++c) dgi[c] = -gi * jet.dg[c] * gi;
    auto d_gamma = [&](int c, int a, int d, int b) {
        double s = 0;
        for (int e = 0; e < n; ++e) s += dgi[c](a, e) * gamma_lower(e, d, b) + gi(a, e) * d_gamma_lower(c, e, d, b);
        return s;
    };
    // Coordinate R^a_{bcd} for R(∂_c, ∂_d)∂_b, lowered: R_{abcd} = g_{ae} R^e_{bcd}.
    std::vector<double> Rup(std::size_t(n) * n * n * n);
    auto idx = [n](int a, int b, int c, int d) { return ((std::size_t(a) * n + b) * n + c) * n + d; };
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = d_gamma(c, a, d, b) - d_gamma(d, a, c, b);
                    for (int e = 0; e < n; ++e) s += gamma[a](c, e) * gamma[e](d, b) - gamma[a](d, e) * gamma[e](c, b);
                    Rup[idx(a, b, c, d)] = s;
                }
    std::vector<double> Rlow(Rup.size(), 0.0);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
            for (int c = 0; c < n; ++c)
                for (int d = 0; d < n; ++d) {
                    double s = 0;
                    for (int e = 0; e < n; ++e) s += jet.g(a, e) * Rup[idx(e, b, c, d)];
                    Rlow[idx(a, b, c, d)] = s;
                }
    const Matrix E = detail::orthonormal_frame(jet.g);
    CurvatureSample out{CurvatureData<double>(n), 0, 0, E};
    // Frame change one index at a time.
    std::vector<double> cur = Rlow, next(Rlow.size());
    for (int slot = 0; slot < 4; ++slot) {
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                for (int c = 0; c < n; ++c)
                    for (int d = 0; d < n; ++d) {
                        int ix[4] = {a, b, c, d};
                        double s = 0;
                        for (int m = 0; m < n; ++m) {
                            int jx[4] = {a, b, c, d};
                            jx[slot] = m;
                            s += E(m, ix[slot]) * cur[idx(jx[0], jx[1], jx[2], jx[3])];
                        }
                        next[idx(a, b, c, d)] = s;
                    }
        std::swap(cur, next);
    }
    out.data.riemann = cur;
    out.symmetry_residual = out.data.symmetry_residual();
    out.bianchi_residual = out.data.bianchi_residual();
    return out;
}

/// Curvature projected exactly onto the algebraic curvature tensors. Throws ToleranceFailure when
/// the pre-projection residuals exceed `tolerance`.
inline CurvatureData<double> curvature_at(const MetricPatch& patch, const Vector& u, double tolerance = 1e-6) {
    auto s = curvature_sample(patch, u);
    if (s.symmetry_residual > tolerance || s.bianchi_residual > tolerance)
        throw ToleranceFailure("curvature symmetries", "residual " + detail::sci(std::max(s.symmetry_residual, s.bianchi_residual)));
    s.data.project_symmetries();
    return s.data;
}

/// Largest deviation from collar form g_00 = 1, g_0a = 0 at u.
inline double collar_defect(const MetricPatch& patch, const Vector& u) {
    const Matrix g = patch.g(u);
    double worst = std::abs(g(0, 0) - 1);
    for (int a = 1; a < patch.n; ++a) worst = std::max(worst, std::abs(g(0, a)));
    return worst;
}

/// h_ab = -½ ∂_x (g_∂M)_ab at x = 0, in the orthonormal frame of g_∂M(0) (indices 1..n-1, the
/// boundary frame being the tail of the ambient Gram–Schmidt frame).
inline Matrix second_fundamental_form(const MetricPatch& patch, const Vector& y, double collar_tolerance = 1e-9) {
    const Vector u = patch.boundary_point(y);
    if (collar_defect(patch, u) > collar_tolerance) throw InputError("second fundamental form needs a collar-normalized chart");
    const int m = patch.n - 1;
    auto block = [&](const Vector& v) -> Matrix { return patch.g(v).bottomRightCorner(m, m); };
    const Matrix dx = detail::d1(block, u, 0, patch.step_at(u));
    const Matrix h = -0.5 * dx;
    const Matrix E = detail::orthonormal_frame(patch.g(u)).bottomRightCorner(m, m);
    return E.transpose() * h * E;
}

/// Boundary curvature data: R of the given chart and h (read from `h_source`, which defaults to
/// the same chart) at the boundary point y.
inline CurvatureData<double> boundary_curvature(const MetricPatch& patch, const Vector& y,
                                                const MetricPatch* h_source = nullptr) {
    CurvatureData<double> cd = curvature_at(patch, patch.boundary_point(y));
    const Matrix h = second_fundamental_form(h_source ? *h_source : patch, y);
    for (int a = 1; a < patch.n; ++a)
        for (int b = 1; b < patch.n; ++b) cd.h(a, b) = h(a - 1, b - 1);
    return cd;
}

/// Euler density e(g) = ∫^B exp(-R) relative to the Riemannian volume; 0 for odd n.
inline double euler_form(const CurvatureData<double>& cd, BerezinConvention conv = {}) {
    if (cd.n % 2) return 0;
    return berezin(nilpotent_exp(-curvature_element(cd)), conv).coefficient(full_mask(cd.n));
}

/// √det g of the induced boundary metric at y.
inline double boundary_volume_density(const MetricPatch& patch, const Vector& y) {
    const int m = patch.n - 1;
    if (m == 0) return 1;
    return std::sqrt(patch.g(patch.boundary_point(y)).bottomRightCorner(m, m).determinant());
}

/// Tensor-product rule on the boundary axes: nodes y and weights (coordinate measure).
struct BoundaryGrid {
    std::vector<Vector> nodes;
    std::vector<double> weights;
};

inline BoundaryGrid boundary_grid(const MetricPatch& patch) {
    const int m = patch.n - 1;
    BoundaryGrid grid;
    grid.nodes.push_back(Vector::Zero(m));
    grid.weights.push_back(1.0);
    for (int a = 0; a < m; ++a) {
        const Axis& ax = patch.axes.at(std::size_t(a + 1));
        std::vector<double> pts, wts;
        const double len = ax.upper - ax.lower;
        if (ax.periodic) {
            for (unsigned i = 0; i < ax.points; ++i) {
                pts.push_back(ax.lower + len * i / ax.points);
                wts.push_back(len / ax.points);
            }
        } else {
            const GaussRule rule = gauss_legendre(ax.points);
            for (unsigned i = 0; i < ax.points; ++i) {
                pts.push_back(ax.lower + 0.5 * len * (rule.nodes[i] + 1));
                wts.push_back(0.5 * len * rule.weights[i]);
            }
        }
        BoundaryGrid next;
        for (std::size_t k = 0; k < grid.nodes.size(); ++k)
            for (std::size_t i = 0; i < pts.size(); ++i) {
                Vector v = grid.nodes[k];
                v(a) = pts[i];
                next.nodes.push_back(v);
                next.weights.push_back(grid.weights[k] * wts[i]);
            }
        grid = std::move(next);
    }
    return grid;
}

/// g_l = l g + (1 - l) g_0 on a common chart.
struct DeformationFamily {
    MetricPatch g;
    MetricPatch g0;

    MetricPatch at(double l) const {
        MetricPatch p = g;
        p.metric = [a = g.metric, b = g0.metric, l](const Vector& u) -> Matrix { return l * a(u) + (1 - l) * b(u); };
        return p;
    }
    Matrix dg_dl(const Vector& u) const { return g.g(u) - g0.g(u); }

    /// Both endpoints collar-normalized and inducing the same boundary metric (hence the same
    /// unit normal) at every boundary grid node.
    void validate(double tolerance = 1e-9) const {
        if (g.n != g0.n) throw DimensionMismatch("deformation endpoints differ in dimension");
        for (const auto& y : boundary_grid(g).nodes) {
            const Vector u = g.boundary_point(y);
            if (collar_defect(g, u) > tolerance || collar_defect(g0, u) > tolerance)
                throw InputError("deformation endpoints must be collar-normalized");
            if ((g.g(u) - g0.g(u)).cwiseAbs().maxCoeff() > tolerance)
                throw InputError("deformation endpoints disagree on the boundary (unit normals differ)");
        }
    }
};

/// *_l^{-1} ∂_l *_l = -½ <(g_l^{-1} ∂_l g_l) e_i, e_j> c(e_i) ĉ(e_j) at u, with e_i a g_l-orthonormal frame.
inline CliffordElement<double> hodge_star_variation(const DeformationFamily& family, double l, const Vector& u) {
    const int n = family.g.n;
    const Matrix gl = family.at(l).g(u);
    const Matrix E = detail::orthonormal_frame(gl);
    // <A e_i, e_j> = e_j^T g_l g_l^{-1} ġ e_i = (E^T ġ E)_{ji}
    const Matrix M = E.transpose() * family.dg_dl(u) * E;
    CliffordElement<double> out(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (M(j, i) != 0) out += CliffordElement<double>::c(n, i) * CliffordElement<double>::chat(n, j) * (-0.5 * M(j, i));
    return out;
}

/// Leading term h_ab c(e_a) ĉ(e_b) x of the variation for the family ending at a collar metric.
inline CliffordElement<double> hodge_star_leading(const Matrix& h, double x) {
    const int n = int(h.rows()) + 1;
    CliffordElement<double> out(n);
    for (int a = 1; a < n; ++a)
        for (int b = 1; b < n; ++b)
            if (h(a - 1, b - 1) != 0)
                out += CliffordElement<double>::c(n, a) * CliffordElement<double>::chat(n, b) * (h(a - 1, b - 1) * x);
    return out;
}

/// Collar normalization: x = geodesic distance to {u_0 = 0} along inward unit-speed normal
/// geodesics, boundary coordinates kept. The returned chart evaluates the pulled-back metric
/// J^T g J with J = ∂u/∂(x, y).
inline MetricPatch collar_normalize(const MetricPatch& raw, double collar_depth, unsigned steps_per_unit = 400) {
    const int n = raw.n;
    struct Flow {
        Vector u, v;
    };
    auto shoot = [raw, n, steps_per_unit](double x, const Vector& y) -> Flow {
        Vector u = raw.boundary_point(y);
        const Matrix g = raw.g(u);
        const Matrix gi = g.inverse();
        Vector v = gi.col(0) / std::sqrt(gi(0, 0));
        auto accel = [&](const Vector& p, const Vector& w) {
            const MetricJet jet = [&] {
                MetricJet j;
                j.g = raw.g(p);
                j.dg.resize(n);
                for (int c = 0; c < n; ++c) j.dg[c] = detail::d1([&](const Vector& q) { return raw.g(q); }, p, c, raw.step_at(p));
                return j;
            }();
            const auto gamma = christoffel(jet.g, jet.dg);
            Vector a(n);
            for (int k = 0; k < n; ++k) a(k) = -w.dot(gamma[k] * w);
            return a;
        };
        const unsigned steps = std::max(1u, unsigned(std::ceil(std::abs(x) * steps_per_unit)));
        const double dt = x / steps;
        for (unsigned s = 0; s < steps; ++s) {
            const Vector k1u = v, k1v = accel(u, v);
            const Vector k2u = v + 0.5 * dt * k1v, k2v = accel(u + 0.5 * dt * k1u, v + 0.5 * dt * k1v);
            const Vector k3u = v + 0.5 * dt * k2v, k3v = accel(u + 0.5 * dt * k2u, v + 0.5 * dt * k2v);
            const Vector k4u = v + dt * k3v, k4v = accel(u + dt * k3u, v + dt * k3v);
            u += dt / 6 * (k1u + 2 * k2u + 2 * k3u + k4u);
            v += dt / 6 * (k1v + 2 * k2v + 2 * k3v + k4v);
            for (int k = 0; k < n; ++k) {
                const Axis& ax = raw.axes[std::size_t(k)];
                const double slack = 0.1 * (ax.upper - ax.lower);
                if (!ax.periodic && (u(k) < ax.lower - slack || u(k) > ax.upper + slack))
                    throw InputError("normal geodesic left the chart");
            }
        }
        return {u, v};
    };
    MetricPatch out = raw;
    out.axes[0].lower = 0;
    out.axes[0].upper = collar_depth;
    out.singular_distance = nullptr;
    out.metric = [raw, n, shoot](const Vector& w) -> Matrix {
        const double x = w(0);
        const Vector y = w.tail(n - 1);
        const Flow f = shoot(x, y);
        Matrix J(n, n);
        J.col(0) = f.v;
        const double h = 1e-3;
        for (int a = 1; a < n; ++a) {
            auto map = [&](const Vector& yy) -> Vector { return shoot(x, yy).u; };
            J.col(a) = detail::d1(map, y, a - 1, h);
        }
        if (!(std::abs(J.determinant()) > 1e-10)) throw InputError("focal point inside the collar");
        return J.transpose() * raw.g(f.u) * J;
    };
    return out;
}

} // namespace torsion
