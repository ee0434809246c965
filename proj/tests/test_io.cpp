#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "torsion/anomaly.hpp"
#include "torsion/io.hpp"

using namespace torsion;

TEST(ParseRational, Forms) {
    EXPECT_EQ(parse_rational("3"), Rational(3));
    EXPECT_EQ(parse_rational("-7/21"), Rational(-1, 3));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
    EXPECT_EQ(parse_rational("-1.5e-2"), Rational(-3, 200));
    EXPECT_EQ(parse_rational("2E3"), Rational(2000));
    EXPECT_EQ(parse_rational("+.5"), Rational(1, 2));
    EXPECT_EQ(parse_rational("010"), Rational(10));
    EXPECT_EQ(parse_rational("08/012"), Rational(2, 3));
    for (const char* bad : {"", "1/0", "x", "1.2.3", "3e", "--1", "1/2/3", "0x10", "1/+"}) EXPECT_THROW(parse_rational(bad), InputError) << bad;
}

TEST(TensorFile, PlainTextSphereTangentSpace) {
    // Unit sphere curvature in n = 3: R_ijij = 1 for i != j.
    const std::string text = R"(# round S^3 frame
dimension 3
symmetry curvature
R 0 1 0 1 1
R 0 2 0 2 1
R 1 2 1 2 1
h 1 1 1/2
h 2 2 1/2
)";
    const auto cd = build_curvature<Rational>(parse_tensor_file(text));
    EXPECT_EQ(cd.R(1, 0, 0, 1), Rational(-1));
    EXPECT_EQ(cd.R(2, 1, 2, 1), Rational(1));
    EXPECT_EQ(cd.h(2, 2), Rational(1, 2));
    EXPECT_EQ(cd.symmetry_residual(), 0.0);
    EXPECT_EQ(cd.bianchi_residual(), 0.0);
}

TEST(TensorFile, JsonMatchesPlainText) {
    const std::string json = R"({"dimension": 2, "symmetry": "curvature",
        "R": [[0, 1, 0, 1, "1/3"]], "h": [[1, 1, 0.5]]})";
    const auto a = build_curvature<double>(parse_tensor_file(json));
    const auto b = build_curvature<double>(parse_tensor_file("dimension 2\nR 1 0 1 0 1/3\nh 1 1 0.5\n"));
    EXPECT_EQ(a.riemann, b.riemann);
    EXPECT_EQ(a.second_fundamental, b.second_fundamental);
    EXPECT_DOUBLE_EQ(a.R(0, 1, 1, 0), -1.0 / 3);
}

TEST(TensorFile, ConsistentDuplicatesAreAccepted) {
    EXPECT_NO_THROW(build_curvature<Rational>(parse_tensor_file("dimension 2\nR 0 1 0 1 2\nR 1 0 0 1 -2\nR 1 0 1 0 2\n")));
}

TEST(TensorFile, InconsistentDuplicatesAreRejected) {
    EXPECT_THROW(build_curvature<Rational>(parse_tensor_file("dimension 2\nR 0 1 0 1 2\nR 1 0 1 0 3\n")), InputError);
    EXPECT_THROW(build_curvature<Rational>(parse_tensor_file("dimension 2\nR 0 1 0 1 2\nR 0 1 1 0 2\n")), InputError);
    EXPECT_THROW(build_curvature<Rational>(parse_tensor_file("dimension 3\nh 1 2 1\nh 2 1 2\n")), InputError);
}

TEST(TensorFile, SymmetryClasses) {
    // R_0123 alone breaks the first Bianchi identity.
    const std::string body = "dimension 4\nR 0 1 2 3 1\n";
    EXPECT_THROW(build_curvature<Rational>(parse_tensor_file(body + "symmetry curvature\n")), InputError);
    const auto pair = build_curvature<Rational>(parse_tensor_file(body + "symmetry pair\n"));
    EXPECT_EQ(pair.R(2, 3, 0, 1), Rational(1));
    EXPECT_GT(pair.bianchi_residual(), 0);
    const auto none = build_curvature<Rational>(parse_tensor_file(body + "symmetry none\n"));
    EXPECT_EQ(none.R(2, 3, 0, 1), Rational(0));
    EXPECT_EQ(none.R(0, 1, 2, 3), Rational(1));
}

TEST(TensorFile, MalformedInput) {
    for (const std::string bad : {"R 0 1 0 1 1\n", "dimension 2\nR 0 1 0 2 1\n", "dimension 2\nR 0 1 0 1\n",
                                  "dimension 2\nh 0 1 1\n", "dimension 2\nsymmetry odd\n", "dimension 2\nQ 1\n",
                                  "dimension 2\nR 0 1 0 1 abc\n", "{\"dimension\": 2, \"R\": [[0, 1, 0]]}", "{bad json",
                                  "dimension 0\n"})
        EXPECT_THROW(build_curvature<double>(parse_tensor_file(bad)), InputError) << bad;
}

TEST(TensorFile, DensitiesAgreeAcrossScalarModes) {
    const std::string text = "dimension 3\nR 0 1 0 1 1/2\nR 1 2 1 2 -1/3\nR 0 2 0 2 2\nh 1 1 1\nh 1 2 1/4\nh 2 2 -1/2\n";
    const auto exact = build_curvature<Rational>(parse_tensor_file(text));
    const auto num = build_curvature<double>(parse_tensor_file(text));
    const double phi_exact = to_double(detail::full_coefficient(phi_integrand(exact)));
    EXPECT_NEAR(phi_exact, detail::full_coefficient(phi_integrand(num)), 1e-14);
    const double tr_exact = to_double(detail::full_coefficient(transgression_integrand(exact)));
    EXPECT_NEAR(tr_exact, detail::full_coefficient(transgression_integrand(num)), 1e-14);
}

TEST(ComplexFile, RoundTripAndTorsion) {
    const auto cx = based_complex(cycle_complex(Rational(3), 3));
    const auto back = complex_from_json(Json::parse(to_json(cx).dump()));
    EXPECT_EQ(back.dims, cx.dims);
    ASSERT_EQ(back.d.size(), cx.d.size());
    EXPECT_EQ(back.d[0], cx.d[0]);
    EXPECT_EQ(back.cohomology[1].cocycles, cx.cohomology[1].cocycles);
    EXPECT_EQ(r_torsion(back).log_tau, r_torsion(cx).log_tau);
}

TEST(ComplexFile, HandWritten) {
    // 0 → ℚ --5--> ℚ → 0.
    const Json j = Json::parse(R"({"name": "times five", "dims": [1, 1],
        "coboundaries": [{"degree": 0, "entries": [[0, 0, 5]]}]})");
    const auto v = r_torsion(complex_from_json(j), TorsionConvention::milnor);
    EXPECT_EQ(v.rational_part, Rational(1, 5));
    EXPECT_NEAR(v.log_tau, -std::log(5.0), 1e-15);
    const Json out = to_json(v);
    EXPECT_EQ(out["rational_part"], "1/5");
    EXPECT_EQ(out["convention"], "milnor");
    EXPECT_EQ(out["provenance"], "times five");
}

TEST(ComplexFile, Malformed) {
    for (const char* bad : {R"({"dims": []})", R"({"dims": [1, 1], "coboundaries": [{"degree": 1, "entries": []}]})",
                            R"({"dims": [1, 1], "coboundaries": [{"degree": 0, "entries": [[1, 0, 1]]}]})",
                            R"({"dims": [1], "cohomology": [{"degree": 0, "basis": [[1, 2]]}]})",
                            R"({"dims": [2, 1], "coboundaries": [{"degree": 0, "entries": [[0, 0, 1]]}],
                                "cohomology": [{"degree": 0, "basis": [[1, 0]]}]})",
                            R"({"nodims": 1})"})
        EXPECT_THROW(complex_from_json(Json::parse(bad)), InputError) << bad;
}

TEST(SpectrumCsv, IntervalListing) {
    std::ostringstream out;
    write_spectrum_csv(out, interval_spectrum(1, BoundaryCondition::absolute), 2);
    std::istringstream in(out.str());
    std::string header, zero, first;
    std::getline(in, header);
    std::getline(in, zero);
    std::getline(in, first);
    EXPECT_EQ(header, "lambda,multiplicity,degree");
    EXPECT_EQ(zero, "0,1,0");
    EXPECT_NEAR(std::stod(first.substr(0, first.find(','))), M_PI * M_PI, 1e-12);
    int rows = 0;
    for (std::string line; std::getline(in, line);) ++rows;
    EXPECT_EQ(rows, 3); // one more degree-0 row, two degree-1 rows
}
