#include <string>

#include "doctest.h"
#include "experiments.hpp"
#include "serialize.hpp"
#include "tractlab/error.hpp"

using namespace tractlab;
using nlohmann::json;

namespace {

ExperimentResult run(const std::string& cmd, std::map<std::string, std::string> kv) {
  return run_experiment(cmd, ExperimentConfig(std::move(kv)));
}

const OutputFile* find(const ExperimentResult& r, const std::string& name) {
  for (const auto& f : r.files)
    if (f.name == name) return &f;
  return nullptr;
}

}  // namespace

TEST_CASE("csv and pgm formats") {
  const std::string csv = write_csv({{"r", {1.0, 0.1}}, {"value", {2.5, -INFINITY}}}, json{{"k", 1}});
  CHECK(csv == "# tractlab " + std::string(library_version()) + "\n# config {\"k\":1}\nr,value\n1,2.5\n0.1,-inf\n");
  CHECK(csv_number(0.1) == "0.1");
  CHECK(std::stod(csv_number(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK_THROWS_AS(write_csv({{"a", {1.0}}, {"b", {}}}, json::object()), Error);

  const std::string pgm = write_pgm({0, 1, 2, 255}, 2, 2, json::object());
  CHECK(pgm.rfind("P5\n", 0) == 0);
  CHECK(pgm.find("\n2 2\n255\n") != std::string::npos);
  CHECK(pgm.substr(pgm.size() - 4) == std::string("\x00\x01\x02\xff", 4));
}

TEST_CASE("config parsing and resolution") {
  ExperimentConfig c({{"a", "1.5"}, {"b", "x"}, {"r", "5:100"}, {"l", "1,2,3"}, {"f", "yes"}});
  CHECK(c.number("a") == 1.5);
  CHECK(c.number("missing", 2.0) == 2.0);
  CHECK(c.range("r", {0, 0}) == std::pair<double, double>{5, 100});
  CHECK(c.numbers("l", {}) == std::vector<double>{1, 2, 3});
  CHECK(c.flag("f", false));
  CHECK(c.unused() == std::vector<std::string>{"b"});
  CHECK(c.resolved()["missing"] == 2.0);
  CHECK_THROWS_AS(c.integer("a", 0), Error);
  CHECK_THROWS_AS(c.number("absent"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(json::array()), Error);
  ExperimentConfig j = ExperimentConfig::from_json(json{{"n", 3}, {"x", 0.25}, {"s", "sin"}, {"b", true}});
  CHECK(j.integer("n", 0) == 3);
  CHECK(j.number("x") == 0.25);
  CHECK(j.flag("b", false));
}

TEST_CASE("eval experiment") {
  const ExperimentResult r = run("eval", {{"spec", "ml:1.0"}, {"z", "1+0i"}});
  CHECK(r.verdict == Verdict::None);
  CHECK(r.report["value"]["re"].get<double>() == doctest::Approx(2.718281828459045).epsilon(1e-15));
  CHECK(r.report["config"]["spec"] == "ml:1.0");
  CHECK(r.report["version"] == library_version());
  REQUIRE(find(r, "eval.json") != nullptr);
}

TEST_CASE("tracts experiment") {
  const ExperimentResult r =
      run("tracts", {{"spec", "sin"}, {"R", "10"}, {"annulus", "5:100"}, {"ntheta", "1024"}, {"expected_n", "2"}});
  CHECK(r.report["n_components"] == 2);
  CHECK(r.verdict == Verdict::Pass);
  const ExperimentResult wrong =
      run("tracts", {{"spec", "sin"}, {"R", "10"}, {"ntheta", "512"}, {"expected_n", "3"}});
  CHECK(wrong.verdict == Verdict::Fail);
}

TEST_CASE("schroeder experiment") {
  const ExperimentResult r = run("schroeder", {{"beta", "0.2"}, {"x", "1e6"}});
  CHECK(r.report["xi"].get<double>() == doctest::Approx(12.713206788867631).epsilon(1e-12));
  CHECK(r.report["max_functional_residual"].get<double>() < 1e-8);
  CHECK(r.verdict == Verdict::Pass);
  const OutputFile* csv = find(r, "schroeder.csv");
  REQUIRE(csv != nullptr);
  CHECK(csv->content.find("x,phi,epsilon,residual\n") != std::string::npos);
}

TEST_CASE("hypothesis experiment verdicts") {
  CHECK(run("hypothesis", {{"spec", "sin"}, {"N", "2"}}).verdict == Verdict::Pass);
  CHECK(run("hypothesis", {{"spec", "exp"}, {"N", "1"}}).verdict == Verdict::Fail);
}

TEST_CASE("escape experiment writes a raster") {
  const ExperimentResult r =
      run("escape", {{"spec", "sin"}, {"resolution", "64"}, {"n_max", "8"}, {"escape_radius", "100"}});
  CHECK(r.verdict == Verdict::Pass);
  const OutputFile* pgm = find(r, "escape.pgm");
  REQUIRE(pgm != nullptr);
  CHECK(pgm->content.rfind("P5\n", 0) == 0);
}

TEST_CASE("outputs are deterministic and independent of the thread count") {
  const std::map<std::string, std::string> base{
      {"spec", "sin"}, {"resolution", "64"}, {"n_max", "8"}, {"escape_radius", "100"}};
  auto with_threads = [&](const char* t) {
    auto kv = base;
    kv["threads"] = t;
    return run("escape", kv);
  };
  const ExperimentResult a = with_threads("1"), b = with_threads("3");
  REQUIRE(a.files.size() == b.files.size());
  for (std::size_t k = 0; k < a.files.size(); ++k) CHECK(a.files[k].content == b.files[k].content);
}

TEST_CASE("experiment errors") {
  CHECK_THROWS_AS(run("nonsense", {}), Error);
  CHECK_THROWS_AS(run("eval", {{"spec", "exp"}}), Error);  // z missing
  CHECK_THROWS_AS(run("eval", {{"spec", "exp"}, {"z", "1"}, {"bogus", "1"}}), Error);
  CHECK_THROWS_AS(run("eval", {{"spec", "zeta"}, {"z", "1"}}), Error);
  CHECK(experiment_commands().size() == 14);
}
