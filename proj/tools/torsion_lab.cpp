// torsion-lab: command-line front end. Exit codes: 0 success, 1 input error, 2 tolerance failure.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "torsion/report.hpp"

using namespace torsion;

namespace {

void write_report(const RunConfig& cfg, const Json& report) {
    const std::string text = report.dump(2) + "\n";
    if (cfg.output.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(cfg.output, std::ios::binary);
    if (!out) throw InputError("cannot write '" + cfg.output + "'");
    out << text;
}

// NAME=VALUE pairs from --tolerance.
std::map<std::string, double> parse_tolerances(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& s : items) {
        const auto eq = s.rfind('=');
        if (eq == std::string::npos || eq == 0) throw InputError("tolerance override must be NAME=VALUE, got '" + s + "'");
        try {
            out[s.substr(0, eq)] = std::stod(s.substr(eq + 1));
        } catch (const std::exception&) {
            throw InputError("tolerance override '" + s + "' has a malformed value");
        }
    }
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Torsion anomaly laboratory: Clifford/Berezin checks, model heat kernels, the constant c, "
                 "boundary densities and interval torsion."};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    RunConfig cfg;
    std::string config_file, method = to_string(cfg.quadrature.method), bc = "absolute", convention = "squared",
                odd_sign = "supertrace_compatible";
    std::vector<std::string> tolerance_items;
    std::vector<std::string> geometry_params;

    app.add_option("--config", config_file, "JSON config file; its fields override flags")->check(CLI::ExistingFile);
    app.add_option("-o,--output", cfg.output, "write the JSON report here instead of stdout");
    app.add_option("--seed", cfg.seed, "seed for every random draw");
    app.add_option("--abs-tol", cfg.quadrature.abs_tol, "quadrature absolute tolerance");
    app.add_option("--rel-tol", cfg.quadrature.rel_tol, "quadrature relative tolerance");
    app.add_option("--max-subdivisions", cfg.quadrature.max_subdivisions, "adaptive bisection depth");
    app.add_option("--truncation-radius", cfg.quadrature.truncation_radius, "Gaussian truncation radius");
    app.add_option("--quadrature-method", method, "adaptive | tanh_sinh | product_gauss");
    app.add_option("--tolerance", tolerance_items, "override a named check tolerance, NAME=VALUE (repeatable)");
    app.add_option("--scalar", cfg.scalar, "exact | double");
    app.add_option("--kappa-scale", cfg.kappa_scale, "multiply the Berezin normalization (sensitivity runs)");
    app.add_option("--odd-sign", odd_sign, "odd-dimension Berezin sign: supertrace_compatible | flipped");

    auto* constant_c_cmd = app.add_subcommand("constant-c", "the universal constant c by two quadrature routes");

    auto* berezin_cmd = app.add_subcommand("berezin-check", "Berezin densities, parity vanishing and Gauss-Bonnet");
    berezin_cmd->add_option("--tensor", cfg.tensor_file, "tensor file (plain text or JSON)");
    berezin_cmd->add_option("--draws", cfg.draws, "random draws for the parity check");

    auto* kernel_cmd = app.add_subcommand("model-kernel-check", "heat equation, boundary and diagonal checks of K");

    auto add_geometry = [&](CLI::App* cmd) {
        cmd->add_option("--geometry", cfg.geometry, "flat_disc | curved_cap | flat_ball | interval | product_collar");
        cmd->add_option("--dimension", cfg.dimension, "dimension of product_collar (1, 2, 3)");
        cmd->add_option("--param", geometry_params, "geometry parameter NAME=VALUE (radius, r0, length)");
        cmd->add_option("--rank", cfg.rank, "rank of the unitary representation");
    };
    auto* trans_cmd = app.add_subcommand("transgression", "boundary transgression integral with its Stokes check");
    add_geometry(trans_cmd);
    auto* predict_cmd = app.add_subcommand("predict-anomaly", "assemble the predicted ln T - ln tau");
    add_geometry(predict_cmd);
    predict_cmd->add_option("--bc", bc, "absolute | relative (interval only)");

    auto* interval_cmd = app.add_subcommand("interval-anomaly", "ln T and ln tau on the interval [0, L]");
    interval_cmd->add_option("--length", cfg.length, "interval length L");
    interval_cmd->add_option("--bc", bc, "absolute | relative");
    interval_cmd->add_option("--rank", cfg.rank, "rank of the representation");
    interval_cmd->add_option("--spectrum-csv", cfg.spectrum_csv, "also write the spectrum as CSV here");
    interval_cmd->add_option("--terms", cfg.spectrum_terms, "eigenvalues per degree in the CSV");

    auto* rt_cmd = app.add_subcommand("r-torsion", "Reidemeister torsion of a based cochain complex");
    rt_cmd->add_option("--complex", cfg.complex_file, "complex file (JSON); default is the interval complex");
    rt_cmd->add_option("--length", cfg.length, "interval length for the default complex");
    rt_cmd->add_option("--bc", bc, "absolute | relative for the default complex");
    rt_cmd->add_option("--rank", cfg.rank, "rank for the default complex");
    rt_cmd->add_option("--convention", convention, "milnor | squared");

    auto* acc_cmd = app.add_subcommand("acceptance", "run the acceptance criteria, one line each");
    acc_cmd->add_option("--criteria", cfg.criteria, "criterion ids to run (default: all)");

    for (auto* cmd : {constant_c_cmd, berezin_cmd, kernel_cmd, trans_cmd, predict_cmd, interval_cmd, rt_cmd, acc_cmd})
        cmd->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        cfg.subcommand = app.get_subcommands().front()->get_name();
        cfg.quadrature.method = quadrature_method_from_string(method);
        cfg.bc = boundary_condition_from_string(bc);
        cfg.convention = torsion_convention_from_string(convention);
        cfg.odd_sign = odd_sign_from_string(odd_sign);
        cfg.tolerances = parse_tolerances(tolerance_items);
        for (const auto& [k, v] : parse_tolerances(geometry_params)) cfg.geometry_parameters[k] = v;
        if (!config_file.empty()) cfg = load_config(config_file, cfg);

        const RunOutcome out = run(cfg);
        for (const auto& line : out.lines) std::cerr << line << '\n';
        write_report(cfg, out.report);
        if (out.exit_code == 2) std::cerr << "tolerance failure: " << out.failed_check << '\n';
        return out.exit_code;
    } catch (const ToleranceFailure& e) {
        std::cerr << "tolerance failure: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return 1;
    }
}
