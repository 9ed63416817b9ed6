#include "doctest.h"
#include "oracles.hpp"

#include "vireg/gap.hpp"
#include "vireg/problems.hpp"
#include "vireg/rng.hpp"

#include <cmath>

using namespace vireg;
using oracle::v3;

namespace {

// distance to { (t, -3/4, -1/4) : t in [0, 1] } by scanning t.
double scan_S0(const Point& x) {
  double best = 1e300;
  for (int i = 0; i <= 100000; ++i) best = std::min(best, (x - v3(i * 1e-5, -0.75, -0.25)).norm());
  return best;
}

}  // namespace

TEST_SUITE("problems") {

TEST_CASE("Example 5.1 solution-set oracle") {
  const ProblemInstance ex = example_5_1();
  const auto& d = ex.oracle->distance_to_S0;
  CHECK(d(v3(0.5, -0.75, -0.25)) == 0.0);
  CHECK(d(v3(2, -0.75, -0.25)) == doctest::Approx(1.0));
  CHECK(d(v3(0, 0, 0)) == doctest::Approx(std::sqrt(10.0) / 4.0));
  auto gen = seeded_engine(20, 0);
  for (int i = 0; i < 10; ++i) {
    const Point x = gaussian_vector(gen, 3);
    CHECK(d(x) == doctest::Approx(scan_S0(x)).epsilon(1e-6));
  }
  for (const Point& s : ex.oracle->sample_S0(30, 1)) CHECK(scan_S0(s) < 1e-5);
  CHECK(ex.start == v3(1, -2, 1));
  CHECK(ex.lipschitz() == 2.0);
}

TEST_CASE("Example 5.1 regularized solutions satisfy the optimality conditions") {
  const ProblemInstance ex = example_5_1();
  for (double eps : {0.5, 0.01, 1e-4}) {
    // x1 < 1 is inactive, so T must be a multiple of the normal (0, 1, 1).
    const Point x = *ex.regularized_solution(kDirect, "l2", eps);
    const Point t = oracle::ex_F(x) + eps * x;
    CHECK(std::abs(t(0)) < 1e-15);
    CHECK(t(1) == doctest::Approx(t(2)));
    CHECK(x(1) + x(2) == doctest::Approx(-1.0));
    // dual-gap model: G = w^2 / 2 near S0 (w = x2 + 3/4), so minimize w^2/2 + eps/2 |x|^2 on Omega.
    const Point y = *ex.regularized_solution(kDualGap, "l2", eps);
    const double w = y(1) + 0.75;
    const double grad_w = w + eps * (y(1) - y(2));  // derivative along (0, 1, -1)
    CHECK(std::abs(grad_w) < 1e-14);
    CHECK(y(0) == 0.0);
  }
  CHECK(*ex.regularized_solution(kDirect, "l1", 0.1) == v3(0, -0.75, -0.25));
  CHECK_FALSE(ex.regularized_solution("other", "l2", 0.1).has_value());
  CHECK_FALSE(ex.regularized_solution(kDirect, "l2", 0.0).has_value());
}

TEST_CASE("affine instances with known solution sets") {
  Point c(2);
  c << 0.3, -0.4;
  const ProblemInstance id = affine_instance("id", Eigen::MatrixXd::Identity(2, 2), -c, FeasibleSet::unit_box(2), 1.0, c);
  CHECK(dual_gap(id.problem, c).value <= 1e-12);
  CHECK(theta_alpha(unregularized(id.problem), c, 1.0).value <= 1e-15);
  const ProblemInstance zero =
      affine_instance("zero", Eigen::MatrixXd::Zero(2, 2), Point::Zero(2), FeasibleSet::unit_box(2));
  auto gen = seeded_engine(21, 0);
  for (int i = 0; i < 10; ++i) {
    const Point x = zero.problem.set.project(gaussian_vector(gen, 2));
    CHECK(dual_gap(zero.problem, x).value == 0.0);
  }
  CHECK_THROWS_AS(affine_instance("bad", Eigen::MatrixXd::Zero(3, 3), Point::Zero(3), FeasibleSet::unit_box(2)),
                  DimensionError);
}

TEST_CASE("synthetic affine solutions solve the VI on a dense grid") {
  for (SyntheticSet kind : {SyntheticSet::box, SyntheticSet::shifted_orthant}) {
    const ProblemInstance inst = affine_monotone(2, 5, kind);
    const Point xs = inst.oracle->project_to_S0(Point::Zero(2));
    const Point f = inst.problem.map(xs);
    CHECK(inst.problem.set.contains(xs));
    const double hi = kind == SyntheticSet::box ? 1.0 : 5.0;
    const double worst = -oracle::grid_sup(Point::Constant(2, -1.0), Point::Constant(2, hi), 1e-2,
                                           [&](const Point& y) { return -f.dot(y - xs); });
    CHECK(worst >= -1e-9);
  }
}

TEST_CASE("affine_monotone is deterministic per seed") {
  const ProblemInstance a = affine_monotone(3, 9), b = affine_monotone(3, 9), c = affine_monotone(3, 10);
  const Point x = Point::Constant(3, 0.25);
  CHECK(a.problem.map(x) == b.problem.map(x));
  CHECK(a.problem.map(x) != c.problem.map(x));
  CHECK(a.mu > 0.0);
  CHECK(probe_monotonicity([&](const Point& y) { return a.problem.map(y); }, a.mu * (1 - 1e-9),
                           gaussian_sampler(3, 1), 200)
            .passed(1e-12));
  CHECK_THROWS_AS(affine_monotone(0, 1), DomainError);
}

TEST_CASE("quadratic bowl closed forms") {
  Point c(2);
  c << 0.5, -0.25;
  const ProblemInstance bowl = quadratic_bowl(c, 3.0, Point::Constant(2, -1.0), Point::Constant(2, 1.0));
  for (double eps : {0.1, 1.0}) {
    const Point x = *bowl.regularized_solution(kDirect, "l2", eps);
    CHECK((3.0 * (x - c) + eps * x).norm() < 1e-15);
    const Point y = *bowl.regularized_solution(kDualGap, "l2", eps);
    // G = (3/4) |x - c|^2 on the box: gradient (3/2)(x - c) + eps x = 0
    CHECK((1.5 * (y - c) + eps * y).norm() < 1e-15);
  }
  const ProblemInstance edge = quadratic_bowl(Point::Constant(2, 2.0), 1.0, Point::Zero(2), Point::Constant(2, 1.0));
  CHECK(edge.oracle->project_to_S0(Point::Zero(2)) == Point::Constant(2, 1.0));
  CHECK_FALSE(edge.regularized_solution(kDualGap, "l2", 0.1).has_value());
  CHECK_THROWS_AS(quadratic_bowl(c, 0.0, Point::Zero(2), Point::Constant(2, 1.0)), DomainError);
}

TEST_CASE("brute-force gap") {
  const ProblemInstance seg = segment_1d();
  const RegularizedVI vi = unregularized(seg.problem);
  CHECK(brute_force_gap(vi, Point::Constant(1, 1.0), 1.0) == doctest::Approx(0.5).epsilon(1e-5));
  CHECK(brute_force_gap(vi, Point::Zero(1), 1.0) <= 1e-12);
  const RegularizedVI vi3 = unregularized(example_5_1().problem);
  CHECK_THROWS_AS(brute_force_gap(vi3, Point::Zero(3), 1.0), DimensionError);
  CHECK_THROWS_AS(brute_force_gap(vi, Point::Zero(1), 1.0, 2.0), DomainError);
}

TEST_CASE("problem registry") {
  for (const std::string& name : builtin_problems()) {
    const ProblemInstance inst = problem_by_name(name);
    CHECK(inst.oracle.has_value());
    CHECK(inst.start.size() == inst.dimension());
  }
  try {
    problem_by_name("nope");
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("example5_1") != std::string::npos);
  }
}

}  // TEST_SUITE
