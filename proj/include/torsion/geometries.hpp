#pragma once

// Named desk-scale test geometries, all given in collar charts x = distance to the boundary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "torsion/geometry.hpp"

namespace torsion {

/// A deformation family on a collar chart plus the global data the boundary terms need.
struct Geometry {
    std::string name;
    DeformationFamily family;
    /// Isometric boundary components represented by the single boundary chart.
    int boundary_copies = 1;
    /// χ(∂M) of the whole boundary (all components).
    int boundary_euler_characteristic = 0;
    /// Break points in x for interior integration over M (empty when no interior chart).
    std::vector<double> interior_breaks;

    int dimension() const { return family.g.n; }
};

/// Smooth step: 0 for t ≤ 0, 1 for t ≥ 1, C^∞ in between.
inline double smooth_step(double t) {
    if (t <= 0) return 0;
    if (t >= 1) return 1;
    const double a = std::exp(-1 / t), b = std::exp(-1 / (1 - t));
    return a / (a + b);
}

namespace detail {

inline MetricPatch warped_patch(int n, std::function<double(double)> warp, double r0, unsigned angular_points) {
    MetricPatch p;
    p.n = n;
    p.axes.push_back({0, r0, false, 48});
    if (n == 2) {
        p.axes.push_back({0, 2 * std::numbers::pi, true, angular_points});
    } else if (n == 3) {
        p.axes.push_back({0, std::numbers::pi, false, angular_points});
        p.axes.push_back({0, 2 * std::numbers::pi, true, angular_points});
    } else {
        throw InputError("warped balls are implemented for n = 2, 3");
    }
    p.metric = [n, warp, r0](const Vector& u) -> Matrix {
        const double s = warp(r0 - u(0));
        Matrix g = Matrix::Identity(n, n);
        g(1, 1) = s * s;
        if (n == 3) g(2, 2) = s * s * std::sin(u(1)) * std::sin(u(1));
        return g;
    };
    p.singular_distance = [n, r0](const Vector& u) {
        double d = r0 - u(0);
        if (n == 3) d = std::min({d, u(1), std::numbers::pi - u(1)});
        return d;
    };
    return p;
}

} // namespace detail

/// g from the warp s, g_0 from ψ = s + β (s(r0) - s), β a smooth step from 0 (r ≤ a r0) to
/// 1 (r ≥ b r0): ψ = s near the centre (smooth metric) and constant near ∂M (product collar).
inline Geometry warped_geometry(std::string name, int n, std::function<double(double)> warp, double r0,
                                int boundary_chi, unsigned angular_points = 8, double a = 0.3, double b = 0.7) {
    const double s0 = warp(r0);
    auto psi = [warp, s0, r0, a, b](double r) {
        const double beta = smooth_step((r - a * r0) / ((b - a) * r0));
        return warp(r) + beta * (s0 - warp(r));
    };
    Geometry geo;
    geo.name = std::move(name);
    geo.family.g = detail::warped_patch(n, warp, r0, angular_points);
    geo.family.g0 = detail::warped_patch(n, psi, r0, angular_points);
    geo.boundary_euler_characteristic = boundary_chi;
    geo.interior_breaks = {0, (1 - b) * r0, (1 - a) * r0, r0};
    return geo;
}

/// Flat disc of radius a: g = dx² + (a - x)² dθ².
inline Geometry flat_disc(double radius = 1) {
    return warped_geometry("flat_disc", 2, [](double r) { return r; }, radius, 0);
}

/// Geodesic cap of angle r0 on the unit sphere: g = dx² + sin²(r0 - x) dθ².
inline Geometry curved_cap(double r0 = 1) {
    return warped_geometry("curved_cap", 2, [](double r) { return std::sin(r); }, r0, 0);
}

/// Flat unit 3-ball: g = dx² + (1 - x)² g_{S²}.
inline Geometry flat_ball(double radius = 1) {
    return warped_geometry("flat_ball", 3, [](double r) { return r; }, radius, 2, 12);
}

/// [0, 1] × N with N a point (n = 1), the unit circle (n = 2) or the unit sphere (n = 3); the
/// chart covers one end and the other end is its mirror image.
inline Geometry product_collar(int n = 2) {
    if (n < 1 || n > 3) throw InputError("product_collar is implemented for n = 1, 2, 3");
    MetricPatch p;
    p.n = n;
    p.axes.push_back({0, 1, false, 16});
    if (n == 2) p.axes.push_back({0, 2 * std::numbers::pi, true, 8});
    if (n == 3) {
        p.axes.push_back({0, std::numbers::pi, false, 8});
        p.axes.push_back({0, 2 * std::numbers::pi, true, 8});
    }
    p.metric = [n](const Vector& u) -> Matrix {
        Matrix g = Matrix::Identity(n, n);
        if (n == 3) g(2, 2) = std::sin(u(1)) * std::sin(u(1));
        return g;
    };
    if (n == 3) p.singular_distance = [](const Vector& u) { return std::min(u(1), std::numbers::pi - u(1)); };
    Geometry geo;
    geo.name = "product_collar";
    geo.family.g = p;
    geo.family.g0 = p;
    geo.boundary_copies = 2;
    geo.boundary_euler_characteristic = n == 1 ? 2 : (n == 2 ? 0 : 4);
    return geo;
}

/// The interval [0, L] as a 1-manifold with two boundary points.
inline Geometry interval_geometry(double length = 1) {
    Geometry geo = product_collar(1);
    geo.name = "interval";
    geo.family.g.axes[0].upper = length;
    geo.family.g0.axes[0].upper = length;
    return geo;
}

/// Closed round sphere of radius a in (polar angle, azimuth); no boundary, ∫e = 2.
inline MetricPatch round_sphere(double a = 1) {
    if (!(a > 0)) throw InputError("sphere radius must be positive");
    MetricPatch p;
    p.n = 2;
    p.axes = {{0, std::numbers::pi, false, 8}, {0, 2 * std::numbers::pi, true, 8}};
    p.metric = [a](const Vector& u) -> Matrix {
        Matrix g = Matrix::Identity(2, 2) * (a * a);
        g(1, 1) *= std::sin(u(0)) * std::sin(u(0));
        return g;
    };
    p.singular_distance = [](const Vector& u) { return std::min(u(0), std::numbers::pi - u(0)); };
    return p;
}

inline Geometry geometry_by_name(const std::string& name, int dimension = 0) {
    if (name == "flat_disc") return flat_disc();
    if (name == "curved_cap") return curved_cap();
    if (name == "flat_ball") return flat_ball();
    if (name == "interval") return interval_geometry();
    if (name == "product_collar") return product_collar(dimension == 0 ? 2 : dimension);
    throw InputError("unknown geometry '" + name + "'");
}

inline std::vector<std::string> geometry_names() {
    return {"flat_disc", "curved_cap", "flat_ball", "interval", "product_collar"};
}

} // namespace torsion
