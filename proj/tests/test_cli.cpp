#include "doctest.h"

#include <array>
#include <cstdio>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace {

struct Run {
  int status;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(VIREG_CLI) + " " + args + " 2>&1";
  Run r{-1, {}};
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::array<char, 4096> buf{};
  while (std::fgets(buf.data(), buf.size(), pipe)) r.out += buf.data();
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

std::vector<std::vector<std::string>> rows_of(const std::string& csv) {
  std::vector<std::vector<std::string>> out;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    out.push_back(cells);
  }
  return out;
}

// columns of kCsvHeader
constexpr int kModel = 1, kReg = 2, kEps = 3, kDistS0 = 7, kExact = 9;

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("run: dual-gap l1 rows are exact") {
  const Run r = run("run --problem example5_1 --model dualgap --reg l1 --eps 0.5,0.1,0.01,0.005,0.0001");
  REQUIRE(r.status == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 5);
  for (const auto& row : rows) {
    CHECK(std::stod(row[kDistS0]) <= 1e-6);
    CHECK(row[kExact] == "exact");
  }
}

TEST_CASE("run: direct l2 at eps = 1e-4") {
  const Run r = run("run --problem example5_1 --model direct --reg l2 --eps 0.0001");
  REQUIRE(r.status == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 1);
  const double d = std::stod(rows[0][kDistS0]);
  CHECK(d >= 3.54e-5 * 0.5);
  CHECK(d <= 3.54e-5 * 1.5);
}

TEST_CASE("run: validation errors") {
  CHECK(run("run --eps ''").status != 0);
  CHECK(run("run --eps 0.1 --model direct --reg l1").status != 0);
  CHECK(run("run --eps 0.1,abc").status != 0);
  CHECK(run("run --eps 0.1 --format xml").status != 0);
  const Run r = run("run --eps 0.1 --problem nope");
  CHECK(r.status != 0);
  CHECK(r.out.find("example5_1") != std::string::npos);
}

TEST_CASE("run: output is reproducible and json is available") {
  const std::string args = "run --model dualgap,direct --reg l2 --eps 0.5 --seed 3";
  CHECK(run(args).out == run(args).out);
  const Run j = run(args + " --format json");
  CHECK(j.status == 0);
  CHECK(j.out.find("\"rows\"") != std::string::npos);
}

TEST_CASE("table1: twenty rows with the expected structure") {
  const Run r = run("table1");
  REQUIRE(r.status == 0);
  const auto rows = rows_of(r.out);
  REQUIRE(rows.size() == 20);
  for (const auto& row : rows) {
    if (row[kModel] == "dualgap" && row[kReg] == "l2" && row[kEps] == "0.5") {
      CHECK(std::stod(row[kDistS0]) == doctest::Approx(1.768e-1).epsilon(0.2));
    }
    if (row[kModel] == "direct" && row[kReg] == "l1") CHECK(std::stod(row[kDistS0]) <= 1e-6);
  }
}

TEST_CASE("check suites") {
  const Run g = run("check gap-oracle --seed 7");
  CHECK(g.status == 0);
  CHECK(g.out.find("FAIL") == std::string::npos);
  const Run e = run("check exactness");
  CHECK(e.status == 0);
  const Run u = run("check nonsense");
  CHECK(u.status != 0);
  CHECK(u.out.find("core-geometry") != std::string::npos);
}

}  // TEST_SUITE
