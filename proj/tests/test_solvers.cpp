#include "doctest.h"
#include "oracles.hpp"

#include "vireg/gap.hpp"
#include "vireg/problems.hpp"
#include "vireg/rng.hpp"
#include "vireg/solvers.hpp"

#include <cmath>

using namespace vireg;
using oracle::v3;

namespace {

Point p1(double a) { return Point::Constant(1, a); }

double d_S0(const Point& x) { return (x - v3(std::clamp(x(0), 0.0, 1.0), -0.75, -0.25)).norm(); }

InnerConfig segment_config(double c) {
  InnerConfig cfg;
  cfg.c = c;
  cfg.delta = 0.05;
  return cfg;
}

}  // namespace

TEST_SUITE("solvers") {

TEST_CASE("parameter bounds") {
  CHECK(max_direction_constant(1.0, 2.0, 3.0) == doctest::Approx(0.1));
  CHECK(max_direction_constant(1.0, 3.0, 0.0) == doctest::Approx(1.0 / 3.0));
  CHECK(max_direction_constant(1.0, 100.0, 0.0) == doctest::Approx(0.495));
  CHECK(max_descent_constant(1.0, 2.0, 0.1, 0.5) == doctest::Approx(std::sqrt(2.0) * 0.05));
  CHECK(max_descent_constant(1.0, 2.0, 1.0, 10.0) == doctest::Approx(0.5 * std::sqrt(0.5)));
  const InnerConfig cfg = make_inner_config(3.0, 0.5);
  CHECK(cfg.c == doctest::Approx(0.1));
  CHECK(cfg.delta <= max_descent_constant(1.0, 2.0, cfg.c, 0.5) * (1 + 1e-12));
  InnerConfig bad = cfg;
  bad.c = 0.5;
  CHECK_THROWS_AS(bad.validate(0.5), DomainError);
  bad = cfg;
  bad.gamma = 1.0;
  CHECK_THROWS_AS(bad.validate(0.5), DomainError);
  bad = cfg;
  bad.beta = 0.5;
  CHECK_THROWS_AS(bad.validate(0.5), DomainError);
}

TEST_CASE("Li-Ng direction on the segment") {
  const RegularizedVI vi = unregularized(segment_1d().problem);
  const Direction a = li_ng_direction(vi, p1(1.0), segment_config(0.1));
  CHECK(a.branch == Branch::difference);
  CHECK(a.d(0) == doctest::Approx(-0.5));
  const Direction b = li_ng_direction(vi, p1(1.0), segment_config(0.9));
  CHECK(b.branch == Branch::residual);
  CHECK(b.d(0) == doctest::Approx(-1.0));
  // solution: both maximizers coincide with x
  const Direction z = li_ng_direction(vi, p1(0.0), segment_config(0.1));
  CHECK(z.d.norm() == 0.0);
}

TEST_CASE("Armijo exponent is the smallest one satisfying the decrease") {
  const ProblemInstance seg = segment_1d();
  const RegularizedVI vi = regularize(seg.problem, Regularizer::squared_l2(), 0.2);
  InnerConfig cfg = make_inner_config(estimate_L_theta(vi, p1(1.0), 1.0, 2.0), vi.op.mu());
  for (double x0 : {1.0, -0.7, 3.0}) {
    const Direction dir = li_ng_direction(vi, p1(x0), cfg);
    const ArmijoStep s = armijo_step(vi, p1(x0), dir.d, cfg);
    const double th0 = theta_ab(vi, p1(x0), 1.0, 2.0).value;
    auto holds = [&](int m) {
      const double g = std::pow(cfg.gamma, m);
      const double th = theta_ab(vi, Point(p1(x0) + g * dir.d), 1.0, 2.0).value;
      return std::sqrt(th) - std::sqrt(th0) <= -(cfg.delta / 4.0) * g * dir.d.norm();
    };
    CHECK(holds(s.m));
    if (s.m > 0) CHECK_FALSE(holds(s.m - 1));
    CHECK(s.step == doctest::Approx(std::pow(cfg.gamma, s.m)));
  }
}

TEST_CASE("Armijo rejects a zero direction and fails at a solution") {
  const RegularizedVI vi = unregularized(segment_1d().problem);
  const InnerConfig cfg = segment_config(0.1);
  CHECK_THROWS_AS(armijo_step(vi, p1(0.3), p1(0.0), cfg), DomainError);
  // theta is 0 at the solution; no step can decrease it.
  CHECK_THROWS_AS(armijo_step(vi, p1(0.0), p1(1e-3), cfg), StepFailure);
}

TEST_CASE("solve_inner returns a certified point immediately when x0 qualifies") {
  const ProblemInstance ex = example_5_1();
  const RegularizedVI vi = regularize(ex.problem, Regularizer::squared_l2(), 0.5);
  const double s = 0.5 / 6.0;
  const Point x0 = v3(0, -0.75 + s, -0.25 - s);
  const InnerConfig cfg = make_inner_config(estimate_L_theta(vi, x0, 1.0, 2.0), vi.op.mu());
  const InnerResult r = solve_inner(vi, x0, 1e-6, cfg);
  CHECK(r.iterations == 0);
  CHECK(r.records.empty());
  CHECK(r.x == x0);
}

TEST_CASE("solve_inner reaches tau on a bowl with known solution") {
  Point c(2);
  c << 0.3, -0.2;
  const ProblemInstance bowl = quadratic_bowl(c, 2.0, Point::Constant(2, -1.0), Point::Constant(2, 1.0));
  for (double eps : {1.0, 0.1}) {
    const RegularizedVI vi = regularize(bowl.problem, Regularizer::squared_l2(), eps);
    const Point exact = 2.0 * c / (2.0 + eps);  // root of 2 (x - c) + eps x
    const InnerConfig cfg = make_inner_config(estimate_L_theta(vi, bowl.start, 1.0, 2.0), vi.op.mu());
    for (double tau : {1e-3, 1e-6}) {
      const InnerResult r = solve_inner(vi, bowl.start, tau, cfg);
      CHECK(r.status == InnerStatus::certified);
      CHECK((r.x - exact).norm() <= tau);
      CHECK(r.theta <= r.threshold);
    }
  }
}

TEST_CASE("certified mode refuses nonsmooth phi") {
  const ProblemInstance ex = example_5_1();
  const RegularizedVI vi = regularize(ex.problem, Regularizer::l1(), 0.1);
  InnerConfig cfg = make_inner_config(2.0, 0.1);
  CHECK_THROWS_AS(solve_inner(vi, ex.start, 1e-6, cfg), DomainError);
  cfg.experimental_nonsmooth = true;
  const InnerResult r = solve_inner(vi, ex.start, 1e-6, cfg);
  CHECK((r.x - v3(0, -0.75, -0.25)).norm() < 1e-8);
}

TEST_CASE("iteration budget raises with the partial result") {
  const ProblemInstance ex = example_5_1();
  const RegularizedVI vi = regularize(ex.problem, Regularizer::squared_l2(), 0.01);
  InnerConfig cfg = make_inner_config(estimate_L_theta(vi, ex.start, 1.0, 2.0), vi.op.mu());
  cfg.max_iterations = 3;
  try {
    solve_inner(vi, ex.start, 1e-8, cfg);
    FAIL("expected InnerIterationLimit");
  } catch (const InnerIterationLimit& e) {
    CHECK(e.partial().iterations == 3);
    CHECK(e.partial().records.size() == 3);
  }
}

TEST_CASE("sequential descent on Example 5.1 with l2") {
  const ProblemInstance ex = example_5_1();
  OuterConfig cfg = OuterConfig::down_to(0.01);
  const SequentialResult r = sequential_inexact_descent(ex.problem, Regularizer::squared_l2(), ex.start, cfg);
  CHECK(d_S0(r.x_final) == doctest::Approx(3.5e-3).epsilon(0.05));
  CHECK(r.trace.outer.size() == cfg.epsilons.size());
  CHECK(r.trace.inner.size() == cfg.epsilons.size());
  for (const OuterRecord& o : r.trace.outer) {
    CHECK(o.theta <= o.threshold);
    CHECK(o.radius <= o.tau * (1 + 1e-9));
  }
}

TEST_CASE("one outer step with a huge eps and F = 0 lands on the phi-minimizer") {
  const VIProblem zero{MonotoneMap::zero(2), FeasibleSet::box(Point::Constant(2, 1.0), Point::Constant(2, 2.0))};
  OuterConfig cfg;
  cfg.epsilons = {1e3};
  Point x0(2);
  x0 << 5.0, -3.0;
  const SequentialResult r = sequential_inexact_descent(zero, Regularizer::squared_l2(), x0, cfg);
  CHECK((r.x_final - Point::Constant(2, 1.0)).norm() <= 1e-6);
}

TEST_CASE("outer schedule and hook validation") {
  const ProblemInstance ex = example_5_1();
  OuterConfig cfg;
  cfg.epsilons = {0.1, 0.2};
  CHECK_THROWS_AS(sequential_inexact_descent(ex.problem, Regularizer::squared_l2(), ex.start, cfg), DomainError);
  CHECK_THROWS_AS(sequential_inexact_descent(ex.problem, Regularizer::l1(), ex.start, OuterConfig::down_to(0.1)),
                  DomainError);
  cfg = OuterConfig::down_to(0.1);
  cfg.update_alpha_beta = [](int, double a, double b) { return std::make_pair(a * 0.5, b); };
  CHECK_THROWS_AS(sequential_inexact_descent(ex.problem, Regularizer::squared_l2(), ex.start, cfg), DomainError);
  cfg.update_alpha_beta = [](int, double a, double b) { return std::make_pair(a * 1.1, b * 0.95); };
  const SequentialResult r = sequential_inexact_descent(ex.problem, Regularizer::squared_l2(), ex.start, cfg);
  CHECK(r.trace.outer.back().theta <= r.trace.outer.back().threshold);
}

TEST_CASE("geometric and down_to schedules") {
  const OuterConfig g = OuterConfig::geometric(0.5, 0.5, 3);
  CHECK(g.epsilons == std::vector<double>{0.5, 0.25, 0.125});
  const OuterConfig d = OuterConfig::down_to(0.1);
  CHECK(d.epsilons.front() == 0.5);
  CHECK(d.epsilons.back() == 0.1);
  CHECK_THROWS_AS(OuterConfig::down_to(0.0), DomainError);
}

TEST_CASE("solve_pge on Example 5.1") {
  const ProblemInstance ex = example_5_1();
  const PgeResult l1 = solve_pge(ex.problem, Regularizer::l1(), 0.1, ex.start);
  CHECK(l1.proximal);
  CHECK(d_S0(l1.x) <= 1e-6);
  CHECK((l1.x - v3(0, -0.75, -0.25)).norm() <= 1e-5);
  const PgeResult l2 = solve_pge(ex.problem, Regularizer::squared_l2(), 0.5, ex.start);
  CHECK(d_S0(l2.x) == doctest::Approx(1.768e-1).epsilon(0.01));
  // closed form of argmin G + eps phi: (0, -3/4 + s, -1/4 - s), s = eps / (2 (1 + 2 eps))
  CHECK((l2.x - v3(0, -0.75 + 0.125, -0.25 - 0.125)).norm() < 1e-5);
}

TEST_CASE("solve_pge with eps = 0 minimizes G alone") {
  Point c(2);
  c << 0.2, 0.4;
  const ProblemInstance bowl = quadratic_bowl(c, 4.0, Point::Constant(2, -1.0), Point::Constant(2, 1.0));
  const PgeResult r = solve_pge(bowl.problem, Regularizer::squared_l2(), 0.0, bowl.start);
  CHECK((r.x - c).norm() < 1e-5);
}

TEST_CASE("diminishing step rule and the plain subgradient path") {
  const ProblemInstance ex = example_5_1();
  PgeConfig cfg;
  cfg.rule = StepRule::diminishing;
  cfg.max_iterations = 300;
  const PgeResult a = solve_pge(ex.problem, Regularizer::squared_l2(), 0.5, ex.start, cfg);
  CHECK(a.records.size() == 300);
  for (std::size_t j = 1; j < a.records.size(); ++j) CHECK(a.records[j].best <= a.records[j - 1].best);
  CHECK(a.objective <= a.records.front().objective);
  cfg.prox_regularizer = false;
  const PgeResult b = solve_pge(ex.problem, Regularizer::squared_l2(), 0.5, ex.start, cfg);
  CHECK_FALSE(b.proximal);
  CHECK(d_S0(b.x) < 0.5);
}

}  // TEST_SUITE
