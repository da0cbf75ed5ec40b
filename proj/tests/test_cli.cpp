#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "srd/io.hpp"
#include "srd/srde.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = srd::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "srd_cli_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string example_path() { return (fs::path(SRD_DATA_DIR) / "example1.json").string(); }

srd::EmbeddingSet random_set(std::uint64_t seed, std::size_t n, std::size_t m) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> z;
  std::vector<std::uint32_t> lens(n);
  std::vector<float> values(n * m);
  for (std::size_t i = 0; i < n; ++i) lens[i] = 5 + static_cast<std::uint32_t>(i % 3);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = z(rng) * static_cast<float>(1 + i % m);
  return srd::EmbeddingSet(m, std::move(lens), std::move(values));
}

}  // namespace

TEST_CASE("example1") {
  const auto r = run({"example1"});
  CHECK(r.code == 0);
  CHECK(r.err.find("always-0: (D, R) = (1.5, 0.25)") != std::string::npos);
  CHECK(r.err.find("diagonal: (D, R) = (0, 0.5625)") != std::string::npos);
  CHECK(r.err.find("s_4* = 0") != std::string::npos);
  CHECK(r.out.rfind("beta,distortion,rate,log_base\n", 0) == 0);

  const auto checked = run({"example1", "--check", "--seed", "7"});
  CHECK(checked.code == 0);
  CHECK(checked.err.find("checks passed") != std::string::npos);
}

TEST_CASE("rd-discrete") {
  SUBCASE("bundled instance") {
    const auto r = run({"rd-discrete", "--instance", example_path(), "--check"});
    CHECK(r.code == 0);
    CHECK(r.err.find("D_max = 1.5") != std::string::npos);
    const auto curve = srd::curve_from_csv(r.out);
    CHECK(curve.points.size() == 40);
  }
  SUBCASE("json output to a file") {
    const auto path = scratch("curve.json");
    const auto r = run({"rd-discrete", "--instance", example_path(), "--out", path.string()});
    CHECK(r.code == 0);
    CHECK(r.out.empty());
    CHECK(srd::load_curve(path).points.size() == 40);
  }
  SUBCASE("custom beta grid") {
    const auto r = run({"rd-discrete", "--instance", example_path(), "--beta-grid=-0.5,-2,-8", "--format", "json"});
    CHECK(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["points"].size() == 3);
  }
  SUBCASE("constant distortion gives a flat curve") {
    const auto path = scratch("constant.json");
    std::ofstream(path) << R"({"alphabet_size": 2, "texts": ["00", "01"], "pmf": [0.5, 0.5],
      "summaries": ["0", "1"], "distortion": [[1, 1], [1, 1]]})";
    const auto r = run({"rd-discrete", "--instance", path.string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("R_S ≡ 0 (D_max = 1)") != std::string::npos);
  }
  SUBCASE("usage and parse errors") {
    CHECK(run({"rd-discrete", "--instance", example_path(), "--beta-grid="}).code == 2);
    CHECK(run({"rd-discrete", "--instance", example_path(), "--beta-grid=0.5"}).code == 2);
    CHECK(run({"rd-discrete", "--instance", "/nonexistent.json"}).code == 2);
    CHECK(run({"rd-discrete"}).code == 2);
    CHECK(run({"no-such-command"}).code == 2);
    const auto bad = scratch("bad.json");
    std::ofstream(bad) << "{not json";
    CHECK(run({"rd-discrete", "--instance", bad.string()}).code == 2);
  }
  SUBCASE("iteration cap is a numerical failure") {
    const auto r = run({"rd-discrete", "--instance", example_path(), "--max-iters", "1",
                        "--max-unconverged", "0"});
    CHECK(r.code == 3);
  }
  SUBCASE("deterministic output") {
    const auto a = run({"rd-discrete", "--instance", example_path()});
    const auto b = run({"rd-discrete", "--instance", example_path()});
    CHECK(a.out == b.out);
  }
}

TEST_CASE("rd-gaussian") {
  SUBCASE("spectrum file") {
    const auto path = scratch("spectrum.json");
    std::ofstream(path) << R"({"mean_length": 1, "log_base": 2, "bins": [{"weight": 1, "eigenvalues": [4, 1]}]})";
    const auto r = run({"rd-gaussian", "--spectrum", path.string(), "--distortion-grid", "2,5", "--check"});
    CHECK(r.code == 0);
    const auto curve = srd::curve_from_csv(r.out);
    REQUIRE(curve.points.size() == 2);
    CHECK(std::abs(curve.points[0].rate - 1.0) < 1e-8);
    CHECK(curve.points[1].rate == 0.0);

    const auto nats = run({"rd-gaussian", "--spectrum", path.string(), "--distortion-grid", "2",
                           "--log-base", "2.718281828459045"});
    CHECK(std::abs(srd::curve_from_csv(nats.out).points[0].rate - std::log(2.0)) < 1e-8);

    CHECK(run({"rd-gaussian", "--spectrum", path.string(), "--distortion-grid", "0"}).code == 3);
  }
  SUBCASE("embedding file") {
    const auto path = scratch("texts.srde");
    srd::write_embeddings(path, random_set(1, 300, 4));
    const auto r = run({"rd-gaussian", "--embeddings", path.string(), "--min-bin", "100", "--check"});
    CHECK(r.code == 0);
    CHECK(r.err.find("bins = 3") != std::string::npos);
    CHECK(srd::curve_from_csv(r.out).points.size() == 50);
    const auto again = run({"rd-gaussian", "--embeddings", path.string(), "--min-bin", "100"});
    CHECK(again.out == r.out);
  }
  SUBCASE("errors") {
    CHECK(run({"rd-gaussian"}).code == 2);
    const auto junk = scratch("junk.srde");
    std::ofstream(junk) << "not an srde file at all";
    const auto r = run({"rd-gaussian", "--embeddings", junk.string()});
    CHECK(r.code == 2);
    CHECK(r.err.find("offset") != std::string::npos);
  }
}

TEST_CASE("eval") {
  SUBCASE("identical embeddings") {
    const auto path = scratch("same.srde");
    srd::write_embeddings(path, random_set(2, 200, 3));
    const auto r = run({"eval", "--embeddings", path.string(), "--summaries", path.string()});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["distortion"] == 0.0);
    CHECK(j["rate"] == 1.0);
    CHECK(j["bound"].is_null());
  }
  SUBCASE("shortened summaries") {
    const auto texts = random_set(3, 200, 3);
    std::vector<std::uint32_t> lens(texts.lengths());
    for (auto& l : lens) l = 1;
    std::vector<float> values(texts.values());
    for (auto& v : values) v *= 0.5f;
    const auto tp = scratch("t.srde"), sp = scratch("s.srde");
    srd::write_embeddings(tp, texts);
    srd::write_embeddings(sp, srd::EmbeddingSet(3, lens, values));
    const auto r = run({"eval", "--embeddings", tp.string(), "--summaries", sp.string()});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["bound"].is_number());
    CHECK(r.err.find("bound gap R - R_S(D) = ") != std::string::npos);
  }
  SUBCASE("discrete kernel") {
    const auto r = run({"eval", "--instance", example_path()});
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["gap"].get<double>() > 0.0);
  }
  SUBCASE("mismatched dimensions") {
    const auto a = scratch("a.srde"), b = scratch("b.srde");
    srd::write_embeddings(a, random_set(4, 10, 3));
    srd::write_embeddings(b, random_set(5, 10, 2));
    CHECK(run({"eval", "--embeddings", a.string(), "--summaries", b.string()}).code == 2);
  }
}
