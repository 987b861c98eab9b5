#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "uklab/config.hpp"
#include "uklab/io.hpp"
#include "uklab/suite.hpp"

using namespace uklab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("uklab_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("measure binary round trip") {
  TempDir tmp;
  const TorusGrid g(1, 128);
  const GridMeasure mu = build_random_salem(g, 2, 4, 4, 99);
  const std::string path = (tmp.path / "m.bin").string();
  save_measure_binary(path, mu, "salem-test", 99);

  std::string name;
  uint64_t seed = 0;
  const GridMeasure back = load_measure_binary(path, &name, &seed);
  CHECK(back.grid == mu.grid);
  CHECK(back.weights == mu.weights);  // bitwise
  CHECK(name == "salem-test");
  CHECK(seed == 99);
}

TEST_CASE("csv writer emits a header row and round-trippable doubles") {
  TempDir tmp;
  const std::string path = (tmp.path / "t.csv").string();
  write_csv(path, {"x", "y"}, {{1.0, 0.1}, {2.0, 1.0 / 3.0}});
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "x,y");
  std::getline(in, line);
  CHECK(line == "1,0.10000000000000001");
  std::getline(in, line);
  CHECK(line == "2,0.33333333333333331");
}

TEST_CASE("config: defaults validate, json round trip, hash stability") {
  ExperimentConfig cfg;
  CHECK(cfg.validate().empty());

  const nlohmann::json j = cfg.to_json();
  const ExperimentConfig back = ExperimentConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.hash() == cfg.hash());

  // hash is invariant under key reordering in the source text
  const std::string a = R"({"grid": {"d": 1, "n": 512}, "eps": 0.7})";
  const std::string b = R"({"eps": 0.7, "grid": {"n": 512, "d": 1}})";
  const ExperimentConfig ca = ExperimentConfig::from_json(nlohmann::json::parse(a));
  const ExperimentConfig cb = ExperimentConfig::from_json(nlohmann::json::parse(b));
  CHECK(ca.hash() == cb.hash());
  CHECK(ca.hash() != cfg.hash());
}

TEST_CASE("config validation lists every offending field") {
  nlohmann::json j;
  j["grid"] = {{"d", 9}, {"n", 100}};
  j["eps"] = -1.0;
  j["t"] = {{"kind", "nonsense"}, {"value", 3.0}};
  try {
    ExperimentConfig::from_json(j);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.bad_fields.size() >= 5);
  }

  nlohmann::json unknown;
  unknown["grdi"] = {{"d", 1}};
  CHECK_THROWS_AS(ExperimentConfig::from_json(unknown), ConfigError);
}

TEST_CASE("build_measure honors the family switch") {
  ExperimentConfig cfg;
  cfg.measure_family = "cantor";
  cfg.n = 1024;
  cfg.cantor_depth = 4;
  const GridMeasure mu = cfg.build_measure();
  CHECK(mu.mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cfg.measure_name().find("cantor") == 0);
}

TEST_CASE("prop1 runner on lebesgue reports a degenerate pass") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.measure_family = "lebesgue";
  const SuiteOutcome out = run_prop1(cfg, tmp.path.string());
  CHECK(out.pass);
  CHECK(out.summary.at("degenerate").get<bool>());
  CHECK(fs::exists(tmp.path / "prop1.csv"));
}

TEST_CASE("build-measure runner writes the documented artifacts") {
  TempDir tmp;
  ExperimentConfig cfg;
  cfg.measure_family = "cantor";
  cfg.n = 1024;
  cfg.cantor_depth = 4;
  const SuiteOutcome out = run_build_measure(cfg, tmp.path.string());
  CHECK(out.pass);
  CHECK(fs::exists(tmp.path / "measure.bin"));
  CHECK(fs::exists(tmp.path / "measure.csv"));
  CHECK(fs::exists(tmp.path / "ball_condition.csv"));
  CHECK(fs::exists(tmp.path / "build_measure.json"));

  const GridMeasure back = load_measure_binary((tmp.path / "measure.bin").string());
  CHECK(back.weights == cfg.build_measure().weights);
}
