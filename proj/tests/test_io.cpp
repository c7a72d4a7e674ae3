#include <gtest/gtest.h>

#include "krein/commands.hpp"
#include "krein/io.hpp"

using namespace krein;
using io::json;

TEST(ParseComplex, Forms) {
  EXPECT_EQ(io::parse_complex("1+2i"), Complex(1, 2));
  EXPECT_EQ(io::parse_complex("0-2i"), Complex(0, -2));
  EXPECT_EQ(io::parse_complex(" -1.5 "), Complex(-1.5, 0));
  EXPECT_EQ(io::parse_complex("i"), Complex(0, 1));
  EXPECT_EQ(io::parse_complex("-i"), Complex(0, -1));
  EXPECT_EQ(io::parse_complex("3i"), Complex(0, 3));
  EXPECT_EQ(io::parse_complex("1e-3+2e+1i"), Complex(1e-3, 20));
  EXPECT_EQ(io::parse_complex("2-j"), Complex(2, -1));
  EXPECT_THROW(io::parse_complex(""), io::SchemaError);
  EXPECT_THROW(io::parse_complex("1+2k"), io::SchemaError);
  EXPECT_THROW(io::parse_complex("abc"), io::SchemaError);
}

TEST(ParseLists, ZerosWithMultiplicity) {
  const auto z = io::parse_zero_list("0+1i:2, 1-1i");
  ASSERT_EQ(z.size(), 2u);
  EXPECT_EQ(z[0].location, Complex(0, 1));
  EXPECT_EQ(z[0].multiplicity, 2);
  EXPECT_EQ(z[1].multiplicity, 1);
  EXPECT_TRUE(io::parse_zero_list("").empty());
  EXPECT_THROW(io::parse_zero_list("1i:0"), io::SchemaError);
  EXPECT_THROW(io::parse_zero_list("1i:1.5"), io::SchemaError);
  EXPECT_THROW(io::parse_zero_list("1i:2:3"), io::SchemaError);
  EXPECT_EQ(io::parse_real_list("1,-1").size(), 2u);
  EXPECT_THROW(io::parse_real_list("1,2i"), io::SchemaError);
}

TEST(JsonFragments, ComplexAndMeasure) {
  EXPECT_EQ(io::complex_from_json(json::parse("[1, -2]")), Complex(1, -2));
  EXPECT_EQ(io::complex_from_json(json::parse("3")), Complex(3, 0));
  EXPECT_THROW(io::complex_from_json(json::parse("[1]")), io::SchemaError);
  EXPECT_THROW(io::complex_from_json(json::parse("\"x\"")), io::SchemaError);

  const auto m = io::nonneg_measure_from_json(json::parse(R"({"atoms":[{"t":1,"w":[2,0]},{"t":-1,"w":0.5}]})"));
  ASSERT_EQ(m.size(), 2u);
  EXPECT_EQ(m.atoms()[0].t, -1.0);
  EXPECT_THROW(io::nonneg_measure_from_json(json::parse(R"({"atoms":[{"t":1,"w":[2,1]}]})")), io::SchemaError);
  EXPECT_THROW(io::nonneg_measure_from_json(json::parse(R"({"atoms":[{"t":1,"w":-1}]})")), io::SchemaError);
  EXPECT_THROW(io::nonneg_measure_from_json(json::parse(R"({"atoms":[{"t":1,"w":1},{"t":1,"w":1}]})")),
               io::SchemaError);

  const QuasiHerglotz q{1.0 + kI, 0.5, ComplexAtomicMeasure({{0.0, -kI}, {2.0, 1.0}})};
  EXPECT_EQ(io::quasi_herglotz_from_json(io::to_json(q)), q);
}

TEST(JsonInstance, RoundTripBothExtensionForms) {
  const auto s = make_space(NonnegAtomicMeasure({{-1.0, 0.5}, {2.0, 0.25}}), 0.3);
  const auto p = make_params(s, SpaceElement(Vector::Constant(2, 1.0 - kI)), 0.5 * kI);
  const auto back = io::instance_from_json(json::parse(io::instance_to_json(s, p).dump()));
  EXPECT_EQ(back.space.atoms(), s.atoms());
  EXPECT_EQ(back.space.a(), s.a());
  EXPECT_EQ(back.params.v.coords, p.v.coords);
  EXPECT_EQ(back.params.c, p.c);

  const auto viag = io::instance_from_json(io::instance_to_json(s, from_extension(s, p)));
  EXPECT_LE((viag.params.v.coords - p.v.coords).norm(), 1e-14);
  EXPECT_LE(std::abs(viag.params.c - p.c), 1e-14);
}

TEST(JsonInstance, SchemaViolations) {
  const std::string space = R"("space":{"a":0,"nu":{"atoms":[{"t":0,"w":1}]}})";
  auto parse = [&](const std::string& ext) { return io::instance_from_json(json::parse("{" + space + "," + ext + "}")); };
  EXPECT_THROW(parse(R"("extension":{"v":{"coords":[[1,0],[0,1]]},"c":0})"), io::SchemaError);
  EXPECT_THROW(parse(R"("extension":{"c":0})"), io::SchemaError);
  EXPECT_THROW(parse(R"("extension":{"v":{"coords":[1]},"c":0,"g":{}})"), io::SchemaError);
  EXPECT_THROW(parse(R"("extension":{"v":{"coords":[1]}})"), io::SchemaError);
  EXPECT_THROW(io::instance_from_json(json::parse(R"({"extension":{}})")), io::SchemaError);
  try {
    parse(R"("extension":{"v":{"coords":[0]},"c":0})");
    FAIL() << "vanishing defining function accepted";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IdenticallyZero);
  }
}

TEST(Digest, DeterministicAndSensitive) {
  const json a = json::parse(R"({"x":[1,2],"y":"z"})");
  const json b = json::parse(R"({"y":"z","x":[1,2]})");
  EXPECT_EQ(io::digest(a), io::digest(b));
  EXPECT_EQ(io::digest(a).size(), 16u);
  EXPECT_NE(io::digest(a), io::digest(json::parse(R"({"x":[1,3],"y":"z"})")));
}

TEST(PlotCsv, Layout) {
  std::vector<io::PlotRow> rows{{"s", Complex(1, 2), false, 1, 1, 0.0, true}, {"s", {}, true, 2, 1, 0.0, true}};
  io::PlotRow r;
  r.series = "p";
  r.has_point = false;
  r.value = 0.5;
  rows.push_back(r);
  const std::string csv = io::plot_csv(rows);
  EXPECT_EQ(csv,
            "series,re,im,inf,alg,geo,value\n"
            "s,1,2,0,1,1,0\n"
            "s,,,1,2,1,0\n"
            "p,,,0,0,0,0.5\n");
}

TEST(Commands, ReportsAreDeterministicModuloClock) {
  const json inst = json::parse(
      R"({"space":{"a":0.2,"nu":{"atoms":[{"t":-1,"w":0.4},{"t":0.5,"w":1.2},{"t":2,"w":0.3}]}},
          "extension":{"v":{"coords":[[1,0.5],[-0.3,0.2],[0.7,-1]]},"c":[0.1,-0.4]}})");
  auto strip = [](json j) {
    j.erase("wall_clock_s");
    return j.dump();
  };
  commands::CommonOptions opt;
  opt.seed = 11;
  const auto a = commands::spectrum(inst, opt), b = commands::spectrum(inst, opt);
  EXPECT_EQ(a.exit_code, 0);
  EXPECT_EQ(strip(a.report), strip(b.report));
  EXPECT_TRUE(a.report.contains("wall_clock_s"));
  EXPECT_EQ(a.report["tolerances"]["rank_tol"], 1e-10);
  EXPECT_EQ(a.report["seed"], 11);
}

TEST(Commands, InterpolateRoundTripThroughSpectrum) {
  const json space = json::parse(R"({"a":0,"nu":{"atoms":[{"t":-2,"w":1},{"t":0,"w":1},{"t":1,"w":0.5},{"t":3,"w":2}]}})");
  const auto r = commands::interpolate(space, "0.5+1i:2,-1-0.5i", {});
  ASSERT_EQ(r.exit_code, 0) << r.report.dump();
  ASSERT_TRUE(r.instance.has_value());
  const auto sp = commands::spectrum(*r.instance, {});
  EXPECT_EQ(sp.exit_code, 0);
  int found = 0;
  for (const auto& e : sp.report["eigenvalues"]) {
    if (e["inf"] || std::abs(e["im"].get<double>()) < 1e-6) continue;
    const Complex z(e["re"].get<double>(), e["im"].get<double>());
    if (std::abs(z - Complex(0.5, 1)) <= 1e-8) {
      EXPECT_EQ(e["alg"], 2);
      ++found;
    } else if (std::abs(z - Complex(-1, -0.5)) <= 1e-8) {
      EXPECT_EQ(e["alg"], 1);
      ++found;
    } else {
      ADD_FAILURE() << "unexpected eigenvalue " << e.dump();
    }
  }
  EXPECT_EQ(found, 2);
}
