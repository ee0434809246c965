#pragma once

// Boundary densities of the anomaly formula (Euler transgression and φ), their boundary
// integrals along the linear deformation family, the interior Euler integral used as a Stokes
// oracle, and the assembled prediction.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "torsion/geometries.hpp"
#include "torsion/model_kernels.hpp"
#include "torsion/parallel.hpp"

namespace torsion {

namespace detail {

template <Scalar S>
S full_coefficient(const BiGradedElement<S>& a) {
    return berezin_coefficients(a).coefficient(full_mask(a.dimension()));
}

} // namespace detail

/// h_ab e^a ê^b ∧ e^0 ∧ ê^0 ∧ exp(-R): the transgression integrand before κ_n and the factor -½.
template <Scalar S>
BiGradedElement<S> transgression_integrand(const CurvatureData<S>& cd) {
    const int n = cd.n;
    const auto normal = wedge(BiGradedElement<S>::e(n, 0), BiGradedElement<S>::ehat(n, 0));
    return wedge(wedge(second_fundamental_element(cd), normal), nilpotent_exp(curvature_element(cd) * S(-1)));
}

/// e^0 ∧ h_ab e^a ê^b ∧ 𝓡'_0 ∧ exp(-R): the φ integrand before its normalization.
template <Scalar S>
BiGradedElement<S> phi_integrand(const CurvatureData<S>& cd) {
    const int n = cd.n;
    return wedge(wedge(wedge(BiGradedElement<S>::e(n, 0), second_fundamental_element(cd)), normal_curvature_element_reduced(cd)),
                 nilpotent_exp(curvature_element(cd) * S(-1)));
}

/// Pointwise transgression density: -½ κ_n [h_ab e^a ê^b ∧ e^0 ∧ ê^0 ∧ exp(-R)]_top, the ½ being
/// ∫_0^∞ x e^{-x²} dx. Identically 0 for odd n (hatted-degree parity).
inline double transgression_density(const CurvatureData<double>& cd, BerezinConvention conv = {}) {
    if (second_fundamental_element(cd).is_zero()) return 0;
    return -0.5 * berezin_normalization(cd.n, conv) * detail::full_coefficient(transgression_integrand(cd));
}

/// Pointwise φ density: √(4π) κ_n [e^0 ∧ h_ab e^a ê^b ∧ 𝓡'_0 ∧ exp(-R)]_top. The √(4π) turns the
/// (4π)^{-n/2} inside κ_n into the (4π)^{-(n-1)/2} of the boundary kernel term. Identically 0 for
/// even n (hatted-degree parity).
inline double phi_density(const CurvatureData<double>& cd, BerezinConvention conv = {}) {
    if (second_fundamental_element(cd).is_zero()) return 0;
    return std::sqrt(4 * std::numbers::pi) * berezin_normalization(cd.n, conv) * detail::full_coefficient(phi_integrand(cd));
}

/// A boundary integral together with its quadrature error estimate in l.
struct BoundaryIntegral {
    double value = 0;
    double error = 0;
};

namespace detail {

/// copies · ∫_0^1 dl Σ_grid w · density(R of g_l, h of g) · √det g_∂M.
template <class Density>
BoundaryIntegral family_boundary_integral(const Geometry& geo, Density&& density, const QuadratureSpec& spec,
                                          const std::string& check) {
    geo.family.validate();
    const MetricPatch& g = geo.family.g;
    const BoundaryGrid grid = boundary_grid(g);
    std::vector<double> weights(grid.nodes.size());
    for (std::size_t i = 0; i < weights.size(); ++i) weights[i] = grid.weights[i] * boundary_volume_density(g, grid.nodes[i]);
    // The h-dependence is linear; without h every density vanishes identically.
    bool any_h = false;
    for (const auto& y : grid.nodes) any_h = any_h || !second_fundamental_form(g, y).isZero(0);
    if (!any_h) return {};
    auto at_l = [&](double l) {
        const MetricPatch gl = geo.family.at(l);
        const auto values = parallel_map<double>(grid.nodes.size(), [&](std::size_t i) {
            return weights[i] * density(boundary_curvature(gl, grid.nodes[i], &g));
        });
        return pairwise_sum(values);
    };
    const QuadratureResult r = integrate(at_l, 0.0, 1.0, spec, check);
    return {geo.boundary_copies * r.value, geo.boundary_copies * r.error};
}

} // namespace detail

/// ∫_∂M i*ẽ(g_0, g) along g_l = l g + (1 - l) g_0.
inline BoundaryIntegral transgression_boundary_integral(const Geometry& geo, const QuadratureSpec& spec = {},
                                                        BerezinConvention conv = {}) {
    if (geo.dimension() % 2) return {};
    return detail::family_boundary_integral(
        geo, [conv](const CurvatureData<double>& cd) { return transgression_density(cd, conv); }, spec,
        "transgression l-integral");
}

/// ∫_∂M i*φ with φ = ∫_0^1 (φ density of g_l) dl.
inline BoundaryIntegral phi_boundary_integral(const Geometry& geo, const QuadratureSpec& spec = {},
                                              BerezinConvention conv = {}) {
    if (geo.dimension() % 2 == 0) return {};
    return detail::family_boundary_integral(
        geo, [conv](const CurvatureData<double>& cd) { return phi_density(cd, conv); }, spec, "phi l-integral");
}

/// ∫_M e(metric) over the chart of a warped geometry: Gauss–Legendre in x on the interior breaks,
/// the boundary grid in the remaining coordinates.
inline double interior_euler_integral(const MetricPatch& patch, const std::vector<double>& breaks,
                                      unsigned points_per_piece = 40, BerezinConvention conv = {}) {
    if (patch.n % 2) return 0;
    if (breaks.size() < 2) throw InputError("interior integration needs break points");
    const BoundaryGrid grid = boundary_grid(patch);
    const GaussRule rule = gauss_legendre(points_per_piece);
    struct Node {
        Vector u;
        double w;
    };
    std::vector<Node> nodes;
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        const double a = breaks[p], b = breaks[p + 1];
        for (unsigned i = 0; i < points_per_piece; ++i) {
            const double x = a + 0.5 * (b - a) * (rule.nodes[i] + 1);
            const double wx = 0.5 * (b - a) * rule.weights[i];
            for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
                Vector u = patch.boundary_point(grid.nodes[k]);
                u(0) = x;
                nodes.push_back({u, wx * grid.weights[k]});
            }
        }
    }
    const auto values = parallel_map<double>(nodes.size(), [&](std::size_t i) {
        const Vector& u = nodes[i].u;
        const double vol = std::sqrt(patch.g(u).determinant());
        return nodes[i].w * vol * euler_form(curvature_at(patch, u), conv);
    });
    return pairwise_sum(values);
}

/// ∫_M (e(g) - e(g_0)), the interior side of the transgression identity.
inline double euler_difference(const Geometry& geo, unsigned points_per_piece = 40, BerezinConvention conv = {}) {
    return interior_euler_integral(geo.family.g, geo.interior_breaks, points_per_piece, conv) -
           interior_euler_integral(geo.family.g0, geo.interior_breaks, points_per_piece, conv);
}

struct AnomalyPrediction {
    std::string geometry;
    int dimension = 0;
    int rank = 1;
    int boundary_euler_characteristic = 0;
    double constant_c = 0;
    double constant_c_error = 0;
    double term_chi = 0;
    double term_transgression = 0;
    double term_transgression_error = 0;
    double term_phi = 0;
    double term_phi_error = 0;
    double prediction = 0;
};

/// ln(T/τ) predicted as rank χ(∂M) ln 2 + rank ∫i*ẽ + c rank ∫i*φ.
inline AnomalyPrediction predict_anomaly(const Geometry& geo, int rank, double c, double c_error,
                                         const QuadratureSpec& spec = {}, BerezinConvention conv = {}) {
    if (rank < 1) throw InputError("representation rank must be positive");
    AnomalyPrediction p;
    p.geometry = geo.name;
    p.dimension = geo.dimension();
    p.rank = rank;
    p.boundary_euler_characteristic = geo.boundary_euler_characteristic;
    p.constant_c = c;
    p.constant_c_error = c_error;
    p.term_chi = rank * geo.boundary_euler_characteristic * std::numbers::ln2;
    const BoundaryIntegral t = transgression_boundary_integral(geo, spec, conv);
    const BoundaryIntegral phi = phi_boundary_integral(geo, spec, conv);
    p.term_transgression = rank * t.value;
    p.term_transgression_error = rank * t.error;
    p.term_phi = phi.value;
    p.term_phi_error = phi.error;
    p.prediction = p.term_chi + p.term_transgression + c * rank * p.term_phi;
    return p;
}

} // namespace torsion
