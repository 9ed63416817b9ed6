#include "doctest.h"

#include "vireg/experiment.hpp"

#include <cmath>
#include <limits>
#include <sstream>

using namespace vireg;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.models = {Model::dualgap, Model::direct};
  cfg.regularizers = {"l2"};
  cfg.epsilons = {0.5, 0.1};
  return cfg;
}

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("names and parsing") {
  CHECK(parse_model("direct") == Model::direct);
  CHECK(parse_model("dualgap") == Model::dualgap);
  CHECK(to_string(Model::dualgap) == "dualgap");
  CHECK_THROWS_AS(parse_model("gvi"), DomainError);
  CHECK(regularizer_by_name("l1").name() == "l1");
  CHECK_THROWS_AS(regularizer_by_name("l3"), DomainError);
}

TEST_CASE("configuration validation") {
  ExperimentConfig cfg = small_config();
  cfg.epsilons.clear();
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg = small_config();
  cfg.regularizers = {"l1"};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.experimental = true;
  CHECK_NOTHROW(cfg.validate());
  cfg.epsilons = {-0.1};
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("rows are ordered, deterministic and round-trip through CSV and JSON") {
  const ExperimentConfig cfg = small_config();
  const std::vector<ResultRow> rows = run_experiment(cfg);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].model == "dualgap");
  CHECK(rows[0].epsilon == 0.5);
  CHECK(rows[3].model == "direct");
  CHECK(rows[3].epsilon == 0.1);
  for (const ResultRow& r : rows) {
    CHECK(r.error.empty());
    CHECK(r.wall_time_s == 0.0);
    CHECK(r.exactness == "not_exact");
    REQUIRE(r.dist_to_reg_solution.has_value());
    CHECK(*r.dist_to_reg_solution < 1e-5);
  }
  CHECK(csv(run_experiment(cfg)) == csv(rows));

  std::istringstream in(csv(rows));
  CHECK(read_csv(in) == rows);
  std::ostringstream js;
  write_json(js, rows);
  std::istringstream jin(js.str());
  CHECK(read_json(jin) == rows);
}

TEST_CASE("failed cells are recorded, not thrown") {
  ExperimentConfig cfg;
  cfg.models = {Model::direct};
  cfg.epsilons = {0.5};
  cfg.max_iter = 1;
  const std::vector<ResultRow> rows = run_experiment(cfg);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].exactness == "error");
  CHECK_FALSE(rows[0].error.empty());
  // CSV keeps the verdict column only; the message goes to JSON and stderr.
  std::vector<ResultRow> bare = rows;
  bare[0].error.clear();
  std::istringstream in(csv(rows));
  CHECK(read_csv(in) == bare);
  std::ostringstream js;
  write_json(js, rows);
  std::istringstream jin(js.str());
  CHECK(read_json(jin) == rows);
}

TEST_CASE("number formatting round-trips") {
  for (double v : {0.1, 1e-4, 3.0000000000000004, 1.0 / 3.0, -2.5e-300, 0.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("CSV header is fixed") {
  CHECK(std::string(kCsvHeader) ==
        "problem,model,regularizer,epsilon,iterations,wall_time_s,dist_to_reg_solution,dist_to_S0,"
        "final_gap,exactness");
  std::istringstream bad("a,b\n");
  CHECK_THROWS_AS(read_csv(bad), DomainError);
}

TEST_CASE("JSON problem descriptions") {
  const std::string text = R"({
    "name": "bowl",
    "operator": {"type": "affine", "M": [[2, 0], [0, 2]], "q": [-1, 0.5], "mu": 2},
    "set": {"type": "box", "lower": [-1, "-inf"], "upper": [1, "inf"]},
    "solution": [0.5, -0.25]
  })";
  const ProblemInstance inst = parse_problem_spec(text);
  CHECK(inst.name == "bowl");
  CHECK(inst.dimension() == 2);
  CHECK(inst.mu == 2.0);
  CHECK(inst.lipschitz() == doctest::Approx(2.0));
  REQUIRE(inst.oracle.has_value());
  Point x(2);
  x << 0.5, -0.25;
  CHECK(inst.oracle->distance_to_S0(x) == 0.0);
  CHECK(inst.problem.map(x).norm() < 1e-15);
  Point far(2);
  far << 0.0, -1e6;
  CHECK(inst.problem.set.contains(far));

  const ProblemInstance builtin = parse_problem_spec(R"({"operator": {"type": "builtin", "name": "example5_1"}})");
  CHECK(builtin.dimension() == 3);

  const std::string nested = R"({
    "operator": {"type": "affine", "M": [[1, 0, 0], [0, 1, 0], [0, 0, 1]], "q": [0, 0, 0]},
    "set": {"type": "product", "parts": [
      {"type": "ball", "center": [0], "radius": 1},
      {"type": "hyperplane_box", "normal": [1, 1], "rhs": 0, "lower": [-1, -1], "upper": [1, 1]}]},
    "start": [0.5, 0.5, -0.5], "lipschitz": 1.5
  })";
  const ProblemInstance p = parse_problem_spec(nested);
  CHECK(p.start.size() == 3);
  CHECK(p.lipschitz() == 1.5);
}

TEST_CASE("JSON problem descriptions report the offending path") {
  auto message = [](const std::string& text) {
    try {
      parse_problem_spec(text, "t.json");
    } catch (const Error& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("{").find("t.json") != std::string::npos);
  CHECK(message(R"({"operator": {"type": "affine", "M": [[1]], "q": [0]}, "set": {"type": "cone"}})")
            .find("set.type") != std::string::npos);
  CHECK(message(R"({"operator": {"type": "affine", "M": [[1, 2]], "q": [0]}, "set": {"type": "box", "lower": [0], "upper": [1]}})")
            .find("operator.M") != std::string::npos);
  CHECK(message(R"({"operator": {"type": "affine", "M": [[1]], "q": ["x"]}, "set": {"type": "box", "lower": [0], "upper": [1]}})")
            .find("operator.q") != std::string::npos);
  CHECK_THROWS_AS(load_problem_spec("/nonexistent/spec.json"), Error);
}

TEST_CASE("table1 configuration") {
  const ExperimentConfig cfg = table1_config();
  CHECK(cfg.models.size() * cfg.regularizers.size() * cfg.epsilons.size() == 20);
  CHECK(cfg.experimental);
  CHECK(cfg.x0.has_value());
}

}  // TEST_SUITE
