#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "srd/example1.hpp"
#include "srd/io.hpp"

using namespace srd;

#ifndef SRD_DATA_DIR
#error "SRD_DATA_DIR must be defined"
#endif

TEST_CASE("instance JSON") {
  SUBCASE("bundled example file matches the built-in example") {
    const auto inst = load_instance(std::filesystem::path(SRD_DATA_DIR) / "example1.json");
    const auto ex = make_example1();
    CHECK(inst.source.texts() == ex.source.texts());
    CHECK(inst.source.pmf() == ex.source.pmf());
    CHECK(inst.distortion.values() == ex.distortion.values());
    REQUIRE(inst.kernel.has_value());
    CHECK(inst.kernel->cond() == ex.kernels[2].cond());
  }
  SUBCASE("round trip") {
    const auto ex = make_example1();
    const auto j = instance_to_json(ex.source, ex.distortion, &ex.kernels[1]);
    const auto back = instance_from_json(nlohmann::json::parse(j.dump()));
    CHECK(back.source.texts() == ex.source.texts());
    CHECK(back.distortion.summaries() == ex.distortion.summaries());
    CHECK(back.distortion.values() == ex.distortion.values());
    CHECK(back.kernel->cond() == ex.kernels[1].cond());
    CHECK_FALSE(instance_from_json(instance_to_json(ex.source, ex.distortion)).kernel.has_value());
  }
  SUBCASE("errors") {
    auto j = instance_to_json(make_example1().source, make_example1().distortion);
    auto missing = j;
    missing.erase("pmf");
    CHECK_THROWS_AS(instance_from_json(missing), ParseError);
    auto ragged = j;
    ragged["distortion"][1] = {1, 0};
    CHECK_THROWS_AS(instance_from_json(ragged), ParseError);
    auto bad_pmf = j;
    bad_pmf["pmf"] = {0.5, 0.5, 0.5, 0.5};
    CHECK_THROWS_AS(instance_from_json(bad_pmf), ParseError);
    auto wrong_type = j;
    wrong_type["alphabet_size"] = "two";
    CHECK_THROWS_AS(instance_from_json(wrong_type), ParseError);
    CHECK_THROWS_AS(load_instance("/nonexistent/instance.json"), ParseError);
  }
}

TEST_CASE("curve CSV and JSON") {
  RDCurve c;
  c.log_base = 2.0;
  RDPoint a;
  a.beta = -0.1;
  a.distortion = 1.0 / 3.0;
  a.rate = std::nextafter(0.5, 1.0);
  RDPoint b;
  b.distortion = 1.5;
  b.rate = 0.0;
  c.points = {a, b};

  const auto csv = curve_to_csv(c);
  CHECK(csv.rfind("beta,distortion,rate,log_base\n", 0) == 0);
  CHECK(csv.find("\n,1.5,0,2") != std::string::npos);
  const auto back = curve_from_csv(csv);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[0].beta == a.beta);
  CHECK(back.points[0].distortion == a.distortion);
  CHECK(back.points[0].rate == a.rate);
  CHECK_FALSE(back.points[1].beta.has_value());

  const auto j = curve_to_json(c);
  CHECK(j["points"][1]["beta"].is_null());
  const auto path = std::filesystem::temp_directory_path() / "srd_curve.json";
  std::ofstream(path) << j.dump();
  const auto from_json = load_curve(path);
  CHECK(from_json.points[0].rate == a.rate);
  CHECK_FALSE(from_json.points[1].beta.has_value());
  std::filesystem::remove(path);

  CHECK_THROWS_AS(curve_from_csv("d,r\n1,2\n"), ParseError);
  CHECK_THROWS_AS(curve_from_csv("beta,distortion,rate,log_base\n1,2\n"), ParseError);
  CHECK_THROWS_AS(curve_from_csv("beta,distortion,rate,log_base\n,x,1,2\n"), ParseError);
}

TEST_CASE("spectrum JSON") {
  SpectrumSet s({SpectrumBin{0.25, {3.0, 1.0}}, SpectrumBin{0.75, {2.0, 0.5}}}, 12.5, 10.0);
  const auto back = spectrum_from_json(nlohmann::json::parse(spectrum_to_json(s).dump()));
  CHECK(back.mean_length() == 12.5);
  CHECK(back.log_base() == 10.0);
  CHECK(back.bins()[1].eigenvalues == s.bins()[1].eigenvalues);
  CHECK(back.total_mass() == s.total_mass());
  CHECK_THROWS_AS(spectrum_from_json(nlohmann::json{{"bins", nlohmann::json::array()},
                                                    {"mean_length", 1.0}, {"log_base", 2.0}}),
                  ParseError);
  CHECK_THROWS_AS(spectrum_from_json(nlohmann::json::object()), ParseError);
}

TEST_CASE("format_number round trips") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, 123456789.125, -2.5})
    CHECK(std::stod(format_number(v)) == v);
}
