#pragma once

// Run configuration, the subcommand pipelines and their deterministic JSON reports.

#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <boost/version.hpp>

#include "torsion/acceptance.hpp"
#include "torsion/anomaly.hpp"
#include "torsion/io.hpp"
#include "torsion/r_torsion.hpp"
#include "torsion/spectral.hpp"

namespace torsion {

inline constexpr const char* kVersion = "1.0.0";

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {"constant-c",       "berezin-check",   "model-kernel-check",
                                                   "transgression",    "interval-anomaly", "predict-anomaly",
                                                   "r-torsion",        "acceptance"};
    return names;
}

struct RunConfig {
    std::string subcommand;
    std::string geometry = "flat_disc";
    /// Geometry parameters: radius (flat_disc, flat_ball), r0 (curved_cap), length (interval).
    std::map<std::string, double> geometry_parameters;
    /// Dimension for product_collar (1, 2 or 3).
    int dimension = 2;
    QuadratureSpec quadrature;
    std::string scalar = "double"; ///< exact | double
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 20240611;
    std::string output; ///< empty: stdout
    double length = 1;
    BoundaryCondition bc = BoundaryCondition::absolute;
    int rank = 1;
    TorsionConvention convention = TorsionConvention::squared;
    std::string tensor_file;
    std::string complex_file;
    std::string spectrum_csv;
    int spectrum_terms = 20;
    int draws = 100;
    double kappa_scale = 1;
    OddBerezinSign odd_sign = OddBerezinSign::supertrace_compatible;
    std::vector<int> criteria;

    BerezinConvention berezin() const { return {odd_sign, kappa_scale}; }

    double tolerance(const std::string& check, double fallback) const {
        const auto it = tolerances.find(check);
        return it == tolerances.end() ? fallback : it->second;
    }

    void validate() const {
        if (std::find(subcommand_names().begin(), subcommand_names().end(), subcommand) == subcommand_names().end())
            throw InputError("unknown subcommand '" + subcommand + "'");
        if (scalar != "exact" && scalar != "double") throw InputError("scalar mode must be exact or double");
        if (!(length > 0)) throw InputError("length must be positive");
        if (rank < 1) throw InputError("rank must be positive");
        if (draws < 1) throw InputError("draws must be positive");
        if (spectrum_terms < 1) throw InputError("spectrum terms must be positive");
        if (!(kappa_scale > 0)) throw InputError("kappa scale must be positive");
        quadrature.validate();
    }
};

inline const char* to_string(OddBerezinSign s) {
    return s == OddBerezinSign::supertrace_compatible ? "supertrace_compatible" : "flipped";
}

inline OddBerezinSign odd_sign_from_string(const std::string& s) {
    if (s == "supertrace_compatible") return OddBerezinSign::supertrace_compatible;
    if (s == "flipped") return OddBerezinSign::flipped;
    throw InputError("odd Berezin sign must be supertrace_compatible or flipped");
}

inline TorsionConvention torsion_convention_from_string(const std::string& s) {
    if (s == "milnor") return TorsionConvention::milnor;
    if (s == "squared") return TorsionConvention::squared;
    throw InputError("torsion convention must be milnor or squared");
}

inline Json to_json(const QuadratureSpec& q) {
    return {{"method", to_string(q.method)},         {"abs_tol", q.abs_tol},
            {"rel_tol", q.rel_tol},                  {"max_subdivisions", q.max_subdivisions},
            {"truncation_radius", q.truncation_radius}, {"gauss_points", q.gauss_points}};
}

inline void overlay(QuadratureSpec& q, const Json& j) {
    if (!j.is_object()) throw InputError("quadrature block must be an object");
    for (const auto& [k, v] : j.items()) {
        if (k == "method") q.method = quadrature_method_from_string(v.get<std::string>());
        else if (k == "abs_tol") q.abs_tol = v.get<double>();
        else if (k == "rel_tol") q.rel_tol = v.get<double>();
        else if (k == "max_subdivisions") q.max_subdivisions = v.get<unsigned>();
        else if (k == "truncation_radius") q.truncation_radius = v.get<double>();
        else if (k == "gauss_points") q.gauss_points = v.get<unsigned>();
        else throw InputError("unknown quadrature key '" + k + "'");
    }
}

inline Json to_json(const RunConfig& c) {
    Json j;
    j["subcommand"] = c.subcommand;
    j["geometry"] = c.geometry;
    j["geometry_parameters"] = c.geometry_parameters;
    j["dimension"] = c.dimension;
    j["quadrature"] = to_json(c.quadrature);
    j["scalar"] = c.scalar;
    j["tolerances"] = c.tolerances;
    j["seed"] = c.seed;
    j["output"] = c.output;
    j["length"] = c.length;
    j["bc"] = to_string(c.bc);
    j["rank"] = c.rank;
    j["convention"] = to_string(c.convention);
    j["tensor_file"] = c.tensor_file;
    j["complex_file"] = c.complex_file;
    j["spectrum_csv"] = c.spectrum_csv;
    j["spectrum_terms"] = c.spectrum_terms;
    j["draws"] = c.draws;
    j["kappa_scale"] = c.kappa_scale;
    j["odd_sign"] = to_string(c.odd_sign);
    j["criteria"] = c.criteria;
    return j;
}

/// Fields present in `j` replace those of `c`; unknown keys are an input error.
inline void overlay(RunConfig& c, const Json& j) {
    if (!j.is_object()) throw InputError("config must be a JSON object");
    try {
        for (const auto& [k, v] : j.items()) {
            if (k == "subcommand") c.subcommand = v.get<std::string>();
            else if (k == "geometry") c.geometry = v.get<std::string>();
            else if (k == "geometry_parameters") c.geometry_parameters = v.get<std::map<std::string, double>>();
            else if (k == "dimension") c.dimension = v.get<int>();
            else if (k == "quadrature") overlay(c.quadrature, v);
            else if (k == "scalar") c.scalar = v.get<std::string>();
            else if (k == "tolerances") c.tolerances = v.get<std::map<std::string, double>>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "output") c.output = v.get<std::string>();
            else if (k == "length") c.length = v.get<double>();
            else if (k == "bc") c.bc = boundary_condition_from_string(v.get<std::string>());
            else if (k == "rank") c.rank = v.get<int>();
            else if (k == "convention") c.convention = torsion_convention_from_string(v.get<std::string>());
            else if (k == "tensor_file") c.tensor_file = v.get<std::string>();
            else if (k == "complex_file") c.complex_file = v.get<std::string>();
            else if (k == "spectrum_csv") c.spectrum_csv = v.get<std::string>();
            else if (k == "spectrum_terms") c.spectrum_terms = v.get<int>();
            else if (k == "draws") c.draws = v.get<int>();
            else if (k == "kappa_scale") c.kappa_scale = v.get<double>();
            else if (k == "odd_sign") c.odd_sign = odd_sign_from_string(v.get<std::string>());
            else if (k == "criteria") c.criteria = v.get<std::vector<int>>();
            else throw InputError("unknown config key '" + k + "'");
        }
    } catch (const Json::exception& e) {
        throw InputError(std::string("malformed config: ") + e.what());
    }
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    Json j;
    try {
        j = Json::parse(read_text_file(path));
    } catch (const Json::exception& e) {
        throw InputError("malformed config '" + path + "': " + e.what());
    }
    overlay(base, j);
    return base;
}

inline Geometry geometry_from_config(const RunConfig& c) {
    auto param = [&](const std::string& key, double fallback) {
        const auto it = c.geometry_parameters.find(key);
        return it == c.geometry_parameters.end() ? fallback : it->second;
    };
    const std::map<std::string, std::vector<std::string>> allowed = {
        {"flat_disc", {"radius"}}, {"flat_ball", {"radius"}}, {"curved_cap", {"r0"}}, {"interval", {"length"}}, {"product_collar", {}}};
    const auto it = allowed.find(c.geometry);
    if (it == allowed.end()) throw InputError("unknown geometry '" + c.geometry + "'");
    for (const auto& [k, v] : c.geometry_parameters) {
        if (std::find(it->second.begin(), it->second.end(), k) == it->second.end())
            throw InputError("geometry " + c.geometry + " has no parameter '" + k + "'");
        if (!(v > 0)) throw InputError("geometry parameter '" + k + "' must be positive");
    }
    if (c.geometry == "flat_disc") return flat_disc(param("radius", 1));
    if (c.geometry == "flat_ball") return flat_ball(param("radius", 1));
    if (c.geometry == "curved_cap") {
        const double r0 = param("r0", 1);
        if (r0 >= std::numbers::pi / 2) throw InputError("curved_cap needs r0 < pi/2");
        return curved_cap(r0);
    }
    if (c.geometry == "interval") return interval_geometry(param("length", c.length));
    return product_collar(c.dimension);
}

inline Json versions() {
    return {{"torsion_lab", kVersion},
            {"boost", BOOST_LIB_VERSION},
            {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                          std::to_string(EIGEN_MINOR_VERSION)},
            {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) +
                                  "." + std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
}

/// Runtimes are left out so that reports stay byte-identical across runs.
inline Json to_json(const CriterionResult& r) {
    Json checks = Json::array();
    for (const auto& c : r.checks) {
        Json cj = {{"name", c.name}, {"measured", c.measured}};
        if (c.exact) cj["tolerance"] = "exact";
        else cj["tolerance"] = c.tolerance;
        cj["passed"] = c.passed;
        checks.push_back(cj);
    }
    return {{"id", r.id},
            {"name", r.name},
            {"passed", r.passed()},
            {"runtime_budget_s", r.runtime_budget},
            {"within_budget", r.within_budget()},
            {"checks", checks},
            {"detail", r.detail}};
}

/// A report and its exit status: 0 success, 2 tolerance failure (with the failing check named).
struct RunOutcome {
    Json report;
    int exit_code = 0;
    std::string failed_check;
    /// Human-readable lines for the console (the acceptance ledger).
    std::vector<std::string> lines;
};

namespace detail {

inline RunOutcome start_report(const RunConfig& c) {
    RunOutcome out;
    out.report["subcommand"] = c.subcommand;
    out.report["config"] = to_json(c);
    out.report["versions"] = versions();
    return out;
}

inline void flag_failure(RunOutcome& out, const std::string& check) {
    if (out.exit_code == 0) {
        out.exit_code = 2;
        out.failed_check = check;
    }
}

inline Json constant_c_block(const CrossChecked& c, double tolerance) {
    return {{"value", c.value},
            {"error_estimate", std::max(c.error, c.difference())},
            {"erfc_route", c.value},
            {"erfc_route_error", c.error},
            {"raw_route", c.alternate},
            {"raw_route_error", c.alternate_error},
            {"difference", c.difference()},
            {"tolerance", tolerance},
            {"method_agreement", c.difference() <= tolerance}};
}

inline RunOutcome run_constant_c(const RunConfig& c) {
    RunOutcome out = start_report(c);
    const double tol = c.tolerance("constant-c agreement", 1e-8);
    const CrossChecked v = constant_c(c.quadrature);
    out.report["result"] = constant_c_block(v, tol);
    if (v.difference() > tol) flag_failure(out, "constant-c agreement");
    return out;
}

template <Scalar S>
Json pointwise_densities(const CurvatureData<S>& cd, BerezinConvention conv) {
    const int n = cd.n;
    const S euler_coeff = full_coefficient(nilpotent_exp(curvature_element(cd) * S(-1)));
    const S t_coeff = full_coefficient(transgression_integrand(cd));
    const S phi_coeff = full_coefficient(phi_integrand(cd));
    const double kappa = berezin_normalization(n, conv);
    Json j;
    j["dimension"] = n;
    j["kappa"] = kappa;
    auto exact_text = [](const S& v) -> Json {
        if constexpr (is_exact_v<S>) return to_string(v);
        else return nullptr;
    };
    j["euler_coefficient"] = to_double(euler_coeff);
    j["euler_coefficient_exact"] = exact_text(euler_coeff);
    j["euler_density"] = kappa * to_double(euler_coeff);
    j["transgression_coefficient"] = to_double(t_coeff);
    j["transgression_coefficient_exact"] = exact_text(t_coeff);
    j["transgression_density"] = -0.5 * kappa * to_double(t_coeff) + 0.0; // no "-0.0" in reports
    j["phi_coefficient"] = to_double(phi_coeff);
    j["phi_coefficient_exact"] = exact_text(phi_coeff);
    j["phi_density"] = std::sqrt(4 * std::numbers::pi) * kappa * to_double(phi_coeff);
    j["bianchi_residual"] = cd.bianchi_residual();
    return j;
}

template <Scalar S>
double parity_draws(std::uint64_t seed, int draws) {
    std::mt19937_64 rng(seed);
    double worst = 0;
    for (int d = 0; d < draws; ++d) {
        const int n = 2 + d % 4;
        const auto cd = random_curvature<S>(n, rng);
        const S v = n % 2 ? full_coefficient(transgression_integrand(cd)) : full_coefficient(phi_integrand(cd));
        worst = std::max(worst, std::abs(to_double(v)));
    }
    return worst;
}

inline RunOutcome run_berezin_check(const RunConfig& c) {
    RunOutcome out = start_report(c);
    const bool exact = c.scalar == "exact";
    if (!c.tensor_file.empty()) {
        const TensorFile f = parse_tensor_file(read_text_file(c.tensor_file));
        out.report["tensor"] = exact ? pointwise_densities(build_curvature<Rational>(f), c.berezin())
                                     : pointwise_densities(build_curvature<double>(f), c.berezin());
        out.report["tensor"]["symmetry"] = to_string(f.symmetry);
    }
    const double worst = exact ? parity_draws<Rational>(c.seed, c.draws) : parity_draws<double>(c.seed, c.draws);
    out.report["parity"] = {{"draws", c.draws}, {"max_vanishing_coefficient", worst}, {"passed", worst == 0}};
    if (worst != 0) flag_failure(out, "parity vanishing");

    const double tol = c.tolerance("gauss-bonnet S2", 1e-6);
    const double integral = interior_euler_integral(round_sphere(1.3), {0, std::numbers::pi / 2, std::numbers::pi}, 40, c.berezin());
    out.report["gauss_bonnet"] = {{"surface", "round sphere, radius 1.3"},
                                  {"integral", integral},
                                  {"expected", 2},
                                  {"difference", std::abs(integral - 2)},
                                  {"tolerance", tol},
                                  {"passed", std::abs(integral - 2) <= tol}};
    if (!(std::abs(integral - 2) <= tol)) flag_failure(out, "gauss-bonnet S2");
    return out;
}

inline AcceptanceOptions acceptance_options(const RunConfig& c) {
    AcceptanceOptions opt;
    opt.seed = c.seed;
    opt.quadrature = c.quadrature;
    opt.berezin = c.berezin();
    opt.tolerance_overrides = c.tolerances;
    opt.only = c.criteria;
    return opt;
}

inline RunOutcome run_criteria(const RunConfig& c, const std::vector<int>& ids) {
    RunOutcome out = start_report(c);
    AcceptanceOptions opt = acceptance_options(c);
    opt.only = ids;
    Json results = Json::array();
    int passed = 0;
    for (const auto& r : acceptance_suite(opt)) {
        results.push_back(to_json(r));
        out.lines.push_back(r.line());
        if (r.passed()) {
            ++passed;
        } else {
            std::string check = r.name;
            for (const auto& ch : r.checks)
                if (!ch.passed) {
                    check += ": " + ch.name;
                    break;
                }
            if (!r.within_budget()) check += " (runtime budget)";
            flag_failure(out, check);
        }
    }
    out.report["criteria"] = results;
    out.report["summary"] = {{"passed", passed}, {"total", int(results.size())}};
    return out;
}

inline Json anomaly_terms(const AnomalyPrediction& p) {
    return {{"geometry", p.geometry},
            {"dimension", p.dimension},
            {"rank", p.rank},
            {"boundary_euler_characteristic", p.boundary_euler_characteristic},
            {"term_chi", p.term_chi},
            {"term_transgression", p.term_transgression},
            {"term_transgression_error", p.term_transgression_error},
            {"term_phi", p.term_phi},
            {"term_phi_error", p.term_phi_error},
            {"constant_c", p.constant_c},
            {"constant_c_error", p.constant_c_error},
            {"prediction", p.prediction},
            {"total", p.prediction}};
}

inline Json convention_flags(const RunConfig& c) {
    return {{"torsion", to_string(TorsionConvention::squared)},
            {"berezin_odd_sign", to_string(c.odd_sign)},
            {"kappa_scale", c.kappa_scale},
            {"second_fundamental_form", "flat unit disc has h = +1"}};
}

inline AnomalyPrediction prediction_for(const RunConfig& c, const Geometry& geo) {
    const CrossChecked cc = constant_c(c.quadrature);
    return predict_anomaly(geo, c.rank, cc.value, std::max(cc.error, cc.difference()), c.quadrature, c.berezin());
}

inline RunOutcome run_transgression(const RunConfig& c) {
    RunOutcome out = start_report(c);
    const Geometry geo = geometry_from_config(c);
    const AnomalyPrediction p = prediction_for(c, geo);
    out.report["result"] = anomaly_terms(p);
    Json stokes = nullptr;
    if (geo.dimension() % 2 == 0 && !geo.interior_breaks.empty()) {
        const double boundary = transgression_boundary_integral(geo, c.quadrature, c.berezin()).value;
        const double interior = euler_difference(geo, 40, c.berezin());
        const double tol = c.tolerance("stokes", 1e-6);
        stokes = {{"interior_euler_difference", interior},
                  {"boundary_transgression", boundary},
                  {"residual", std::abs(interior - boundary)},
                  {"tolerance", tol},
                  {"passed", std::abs(interior - boundary) <= tol}};
        if (!(std::abs(interior - boundary) <= tol)) flag_failure(out, "stokes");
    }
    out.report["stokes"] = stokes;
    out.report["conventions"] = convention_flags(c);
    return out;
}

inline RunOutcome run_predict_anomaly(const RunConfig& c) {
    RunOutcome out = start_report(c);
    const Geometry geo = geometry_from_config(c);
    const AnomalyPrediction p = prediction_for(c, geo);
    Json r = anomaly_terms(p);
    if (c.geometry == "interval") {
        const double L = geo.family.g.axes[0].upper;
        const SpectralAnomaly s = interval_anomaly(L, c.bc, c.rank);
        r["spectral_log_T"] = s.log_T;
        r["combinatorial_log_tau"] = s.log_tau;
        r["measured_anomaly"] = s.anomaly;
        r["residual"] = s.anomaly - p.prediction;
    } else {
        r["spectral_log_T"] = nullptr;
        r["combinatorial_log_tau"] = nullptr;
        r["measured_anomaly"] = nullptr;
        r["residual"] = nullptr;
    }
    out.report["result"] = r;
    out.report["conventions"] = convention_flags(c);
    return out;
}

inline RunOutcome run_interval_anomaly(const RunConfig& c) {
    RunOutcome out = start_report(c);
    const auto spec = interval_spectrum(c.length, c.bc);
    const TorsionZetaValue closed = zeta_torsion(spec);
    const TorsionZetaValue split = zeta_torsion_split(spec, c.quadrature);
    const double tol = c.tolerance("zeta routes", 1e-7);
    const double routes = std::abs(closed.log_torsion - split.log_torsion);
    const SpectralAnomaly a = interval_anomaly(c.length, c.bc, c.rank);
    const double prediction = c.rank * 2 * std::numbers::ln2;
    out.report["result"] = {{"length", c.length},
                            {"bc", to_string(c.bc)},
                            {"rank", c.rank},
                            {"lnT", a.log_T},
                            {"lnT_split", c.rank * split.log_torsion},
                            {"zeta_route_difference", routes},
                            {"lnTau", a.log_tau},
                            {"anomaly", a.anomaly},
                            {"prediction", prediction},
                            {"difference", a.anomaly - prediction}};
    out.report["torsion"] = to_json(r_torsion(interval_complex(c.length, c.bc, 1, c.rank)));
    out.report["conventions"] = convention_flags(c);
    if (!c.spectrum_csv.empty()) {
        std::ofstream csv(c.spectrum_csv);
        if (!csv) throw InputError("cannot write '" + c.spectrum_csv + "'");
        write_spectrum_csv(csv, spec, c.spectrum_terms);
    }
    if (!(routes <= tol)) flag_failure(out, "zeta routes");
    return out;
}

inline RunOutcome run_r_torsion(const RunConfig& c) {
    RunOutcome out = start_report(c);
    const BasedCochainComplex cx =
        c.complex_file.empty() ? interval_complex(c.length, c.bc, 1, c.rank) : read_complex(c.complex_file);
    const TorsionValue v = r_torsion(cx, c.convention);
    out.report["complex"] = {{"name", cx.name}, {"dims", cx.dims}, {"euler_characteristic", euler_characteristic(cx)}};
    out.report["result"] = to_json(v);
    return out;
}

} // namespace detail

/// Executes the configured pipeline. Input problems throw InputError; uncertifiable numerics
/// throw ToleranceFailure; verdict failures come back as exit_code 2.
inline RunOutcome run(const RunConfig& c) {
    c.validate();
    if (c.subcommand == "constant-c") return detail::run_constant_c(c);
    if (c.subcommand == "berezin-check") return detail::run_berezin_check(c);
    if (c.subcommand == "model-kernel-check") return detail::run_criteria(c, {3, 4});
    if (c.subcommand == "transgression") return detail::run_transgression(c);
    if (c.subcommand == "interval-anomaly") return detail::run_interval_anomaly(c);
    if (c.subcommand == "predict-anomaly") return detail::run_predict_anomaly(c);
    if (c.subcommand == "r-torsion") return detail::run_r_torsion(c);
    return detail::run_criteria(c, c.criteria);
}

} // namespace torsion
