#include <doctest.h>

#include <sstream>
#include <string>

#include "captive/config.hpp"
#include "captive/report.hpp"

using namespace captive;

namespace {

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("full config") {
  const ExperimentConfig c = parse_config(R"(
map:
  degree: 2
  sin: [0.05]
tau:
  constant: 0.3
  coboundary: {sin: [0.1]}
family: {modes: 3, scale: 0.5}
R: 3
R_tilde: 1.5
n: [4, 8]
strategy: {kind: adaptive, points: 32, refine_points: 8, max_rounds: 5}
rho: 0.25
samples: 10
seed: 42
workers: 2
x: [0.1, 0.2]
b: [0.5]
period: 6
witness: {N: 1, q: 3}
jac: {p: 2, nu: 3, trials: 7}
output: {json: out.json, csv: out.csv}
)");
  CHECK(c.map.degree == 2);
  CHECK(c.map.sin == std::vector<double>{0.05});
  CHECK(c.tau.constant == 0.3);
  REQUIRE(c.tau.coboundary);
  CHECK(c.family->modes == 3);
  CHECK(*c.R == 3.0);
  CHECK(c.depths == std::vector<std::size_t>{4, 8});
  REQUIRE(std::holds_alternative<AdaptiveStrategy>(c.strategy));
  CHECK(std::get<AdaptiveStrategy>(c.strategy).refine_points == 8);
  CHECK(*c.seed == 42);
  CHECK(c.max_period == 6);
  CHECK(*c.witness_q == 3);
  CHECK(c.jac_nu == 3);
  CHECK(*c.csv_path == "out.csv");

  const CircleMap m = c.make_map();
  const RoofFunction tau = c.make_tau(m);
  CHECK(tau.has_coboundary_part());
  CHECK(c.make_family(m).size() == 6);
}

TEST_CASE("errors carry positions") {
  CHECK(error_of("map: {degree: 2}\nR: abc\n").rfind("2:4: R:", 0) == 0);
  CHECK(error_of("map: {degree: 2}\nbogus: 1\n").find("bogus: unknown field") != std::string::npos);
  CHECK(error_of("map: {degree: 2}\nn: [0]\n").find("n[0]") != std::string::npos);
  CHECK(error_of("map: {degree: 2}\nstrategy: {kind: fancy}\n").find("strategy.kind") != std::string::npos);
  CHECK(error_of("map: [1, 2\n") != "");
  CHECK_THROWS_AS(load_config("/nonexistent/config.yaml"), ConfigError);
}

TEST_CASE("report serialization") {
  CaptivityReport r;
  r.R = 1;
  r.strategy = "grid";
  CaptivityRecord rec;
  rec.n = 2;
  rec.ncal = 4;
  rec.root = 2;
  rec.witness_words = {Word::from_display({0, 1})};
  r.records.push_back(rec);
  const Json j = to_json(r);
  CHECK(j["records"][0]["ncal"] == 4);
  CHECK(j["records"][0]["witness_words"][0] == "01");
  CHECK(j["sup_semantics"] == "lower_bound");

  std::ostringstream csv;
  write_csv(csv, r);
  CHECK(csv.str().rfind(std::string(kCaptivityCsvHeader) + "\n2,4,2,", 0) == 0);

  CHECK(to_json(proof_constants(0.3, 2, 2))["q"] == 59);
  CHECK(format_number(0.1) == "0.10000000000000001");
}
