#include <cmath>
#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "torsion/report.hpp"

using namespace torsion;

namespace {

RunConfig config(const std::string& subcommand) {
    RunConfig c;
    c.subcommand = subcommand;
    return c;
}

std::filesystem::path temp_file(const std::string& name, const std::string& body) {
    const auto p = std::filesystem::temp_directory_path() / name;
    std::ofstream(p) << body;
    return p;
}

} // namespace

TEST(RunConfig, JsonRoundTrip) {
    RunConfig c = config("predict-anomaly");
    c.geometry = "curved_cap";
    c.geometry_parameters["r0"] = 0.7;
    c.tolerances["stokes"] = 1e-5;
    c.bc = BoundaryCondition::relative;
    c.criteria = {1, 5};
    c.quadrature.abs_tol = 1e-9;
    RunConfig back;
    overlay(back, Json::parse(to_json(c).dump()));
    EXPECT_EQ(to_json(back).dump(), to_json(c).dump());
}

TEST(RunConfig, FileOverridesOnlyTheFieldsItNames) {
    RunConfig base = config("interval-anomaly");
    base.length = 3;
    base.rank = 2;
    const auto path = temp_file("torsion_cfg_overlay.json", R"({"length": 5, "quadrature": {"rel_tol": 1e-8}})");
    const RunConfig c = load_config(path.string(), base);
    EXPECT_EQ(c.length, 5);
    EXPECT_EQ(c.rank, 2);
    EXPECT_EQ(c.quadrature.rel_tol, 1e-8);
    EXPECT_EQ(c.quadrature.abs_tol, base.quadrature.abs_tol);
    std::filesystem::remove(path);
}

TEST(RunConfig, RejectsBadInput) {
    RunConfig c = config("interval-anomaly");
    EXPECT_THROW(overlay(c, Json::parse(R"({"lenght": 2})")), InputError);
    EXPECT_THROW(overlay(c, Json::parse(R"({"length": "two"})")), InputError);
    EXPECT_THROW(overlay(c, Json::parse(R"({"bc": "mixed"})")), InputError);
    EXPECT_THROW(overlay(c, Json::parse("[1]")), InputError);
    EXPECT_THROW(load_config("/nonexistent/cfg.json"), InputError);
    const auto path = temp_file("torsion_cfg_bad.json", "{ not json");
    EXPECT_THROW(load_config(path.string()), InputError);
    std::filesystem::remove(path);

    c.length = -1;
    EXPECT_THROW(run(c), InputError);
    EXPECT_THROW(run(config("no-such-command")), InputError);
    RunConfig g = config("transgression");
    g.geometry = "torus";
    EXPECT_THROW(run(g), InputError);
    g.geometry = "curved_cap";
    g.geometry_parameters["r0"] = 2;
    EXPECT_THROW(run(g), InputError);
    g.geometry_parameters = {{"radius", 1}};
    EXPECT_THROW(run(g), InputError);
}

TEST(Report, ConstantCRoutesAgree) {
    const RunOutcome out = run(config("constant-c"));
    EXPECT_EQ(out.exit_code, 0);
    const Json& r = out.report["result"];
    EXPECT_TRUE(r["method_agreement"].get<bool>());
    EXPECT_NEAR(r["value"].get<double>(), 11 * std::pow(std::numbers::pi, 1.5) / 64, 1e-9);
    EXPECT_EQ(out.report["subcommand"], "constant-c");
    EXPECT_TRUE(out.report.contains("versions"));
}

TEST(Report, ByteIdenticalAcrossRuns) {
    for (const char* sub : {"constant-c", "interval-anomaly", "r-torsion"}) {
        const auto a = run(config(sub)).report.dump(2);
        const auto b = run(config(sub)).report.dump(2);
        EXPECT_EQ(a, b) << sub;
    }
    RunConfig acc = config("acceptance");
    acc.criteria = {1, 7, 9};
    EXPECT_EQ(run(acc).report.dump(2), run(acc).report.dump(2));
}

TEST(Report, ProductCollarPredictionIsEulerTermOnly) {
    for (int rank : {1, 3}) {
        RunConfig c = config("predict-anomaly");
        c.geometry = "product_collar";
        c.dimension = 2;
        c.rank = rank;
        const Json r = run(c).report["result"];
        const double chi = r["boundary_euler_characteristic"].get<double>();
        EXPECT_NEAR(r["prediction"].get<double>(), rank * chi * std::numbers::ln2, 1e-12);
        EXPECT_EQ(r["prediction"], r["total"]);
        EXPECT_TRUE(r["measured_anomaly"].is_null());
    }
}

TEST(Report, IntervalAnomalyIsIndependentOfLength) {
    RunConfig c = config("interval-anomaly");
    c.length = 1;
    const Json a = run(c).report["result"];
    c.length = 2;
    const Json b = run(c).report["result"];
    EXPECT_NEAR(a["anomaly"].get<double>(), b["anomaly"].get<double>(), 1e-8);
    EXPECT_NEAR(a["difference"].get<double>(), b["difference"].get<double>(), 1e-8);
    EXPECT_EQ(a["prediction"], b["prediction"]);
    EXPECT_NEAR(b["lnT"].get<double>(), -std::log(4.0), 1e-10);
    EXPECT_LT(a["zeta_route_difference"].get<double>(), 1e-7);
}

TEST(Report, IntervalSpectrumCsvIsWritten) {
    RunConfig c = config("interval-anomaly");
    const auto path = std::filesystem::temp_directory_path() / "torsion_spectrum.csv";
    c.spectrum_csv = path.string();
    c.spectrum_terms = 3;
    run(c);
    std::ifstream in(path);
    int lines = 0;
    for (std::string s; std::getline(in, s);) ++lines;
    EXPECT_EQ(lines, 1 + 1 + 3 + 3);
    std::filesystem::remove(path);
}

TEST(Report, PredictIntervalCarriesMeasuredResidual) {
    RunConfig c = config("predict-anomaly");
    c.geometry = "interval";
    c.geometry_parameters["length"] = 1.5;
    const Json r = run(c).report["result"];
    EXPECT_NEAR(r["residual"].get<double>(), r["measured_anomaly"].get<double>() - r["prediction"].get<double>(), 1e-14);
}

TEST(Report, RTorsionFromFile) {
    const auto path = temp_file("torsion_complex.json",
                                R"({"name": "x3", "dims": [1, 1], "coboundaries": [{"degree": 0, "entries": [[0, 0, 3]]}]})");
    RunConfig c = config("r-torsion");
    c.complex_file = path.string();
    c.convention = TorsionConvention::milnor;
    const Json r = run(c).report;
    EXPECT_EQ(r["complex"]["euler_characteristic"], 0);
    EXPECT_EQ(r["result"]["rational_part"], "1/3");
    std::filesystem::remove(path);
}

TEST(Report, KappaPerturbationGivesToleranceExit) {
    RunConfig c = config("berezin-check");
    c.draws = 10;
    EXPECT_EQ(run(c).exit_code, 0);
    c.kappa_scale = 1.01;
    const RunOutcome out = run(c);
    EXPECT_EQ(out.exit_code, 2);
    EXPECT_NE(out.failed_check.find("gauss-bonnet"), std::string::npos);
}

TEST(Report, ToleranceOverrideFlipsTransgressionStokes) {
    RunConfig c = config("transgression");
    c.geometry = "curved_cap";
    EXPECT_EQ(run(c).exit_code, 0);
    c.tolerances["stokes"] = 1e-14;
    const RunOutcome out = run(c);
    EXPECT_EQ(out.exit_code, 2);
    EXPECT_EQ(out.failed_check, "stokes");
}
