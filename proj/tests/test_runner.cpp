#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qquery/errors.hpp"
#include "qquery/runner.hpp"

using namespace qquery;

TEST_CASE("default configs validate") {
  for (auto e : {Experiment::sim_error, Experiment::trig_fit, Experiment::bernstein, Experiment::evaluation, Experiment::mean,
                 Experiment::perturbation, Experiment::theorem1}) {
    CHECK(validate(default_config(e)).empty());
    CHECK(parse_experiment(to_string(e)) == e);
  }
  CHECK_THROWS_AS(parse_experiment("bogus"), ContractError);
}

TEST_CASE("violations name the field") {
  ExperimentConfig c = default_config(Experiment::sim_error);
  c.n = {5};
  auto v = validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::resource);
  CHECK(v[0].field == "n");
  CHECK(v[0].message.find("exceeds budget 3") != std::string::npos);

  c = default_config(Experiment::sim_error);
  c.seed = -1;
  v = validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].field == "seed");

  c = default_config(Experiment::sim_error);
  c.m.clear();
  v = validate(c);
  REQUIRE(v.size() == 1);
  CHECK(v[0].kind == Violation::Kind::usage);
  CHECK(run(c) == kExitUsage);

  c = default_config(Experiment::evaluation);
  c.t = {9};
  CHECK(run(c) == kExitResource);
  CHECK_THROWS_AS(run_experiment(c), ResourceError);
}

TEST_CASE("sim-error default grid has 640 passing rows") {
  const RunResult r = run_experiment(default_config(Experiment::sim_error));
  CHECK(r.rows.size() == 640);
  CHECK(r.all_pass());
}

TEST_CASE("csv is deterministic and seed dependent") {
  ExperimentConfig c = default_config(Experiment::bernstein);
  c.trials = 30;
  const std::string a = to_csv(run_experiment(c).rows);
  CHECK(a == to_csv(run_experiment(c).rows));
  c.seed = 99;
  CHECK(a != to_csv(run_experiment(c).rows));
  CHECK(a.substr(0, a.find('\n')) == csv_header());
}

TEST_CASE("config file keys") {
  const auto j = nlohmann::json::parse(R"({"experiment":"mean","n":[1],"t":[3],"trials":2,"seed":7,"format":"json"})");
  const ExperimentConfig c = config_from_json(j);
  CHECK(c.experiment == Experiment::mean);
  CHECK(c.n == std::vector<int>{1});
  CHECK(c.trials == 2);
  CHECK(c.seed == 7);
  CHECK(c.format == OutputFormat::json);
  const RunResult r = run_experiment(c);
  CHECK(r.rows.size() == 2);
  const auto out = to_json(c, r);
  CHECK(out["summary"]["rows"] == 2);
  CHECK(out["rows"][0]["parameters"]["t"] == 3);
}

TEST_CASE("run writes the output file") {
  const auto dir = std::filesystem::temp_directory_path() / "qquery_test_runner";
  std::filesystem::remove_all(dir);
  ExperimentConfig c = default_config(Experiment::theorem1);
  c.out = (dir / "t1.csv").string();
  CHECK(run(c) == kExitPass);
  std::ifstream in(c.out);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str().find("theorem1,degree-bound") != std::string::npos);
  std::filesystem::remove_all(dir);
}
