#include "doctest.h"
#include "oracles.hpp"

#include "vireg/bounds.hpp"
#include "vireg/problems.hpp"
#include "vireg/rng.hpp"

#include <cmath>

using namespace vireg;
using oracle::v3;

namespace {

DgapConstants example_constants(double eps) { return DgapConstants{2.0, 1.0, 1.0, 1.0, 2.0, eps}; }

}  // namespace

TEST_SUITE("bounds") {

TEST_CASE("D-gap error bound arithmetic") {
  const DgapConstants c = example_constants(0.5);
  CHECK(dgap_error_bound(0.0, c) == 0.0);
  const double expect = (2.0 + 2.0 + 0.5) / 0.5 * std::sqrt(2.0 * 1e-8 / 1.0);
  CHECK(dgap_error_bound(1e-8, c) == doctest::Approx(expect));
  CHECK(dgap_error_bound(1e-8, c) == doctest::Approx(1.2728e-3).epsilon(1e-4));
  CHECK(dgap_error_bound(2e-6, c) == doctest::Approx(std::sqrt(2.0) * dgap_error_bound(1e-6, c)));
  const BoundReport r = dgap_error_report(1e-8, c);
  CHECK(r.kind == BoundKind::dgap_to_regularized);
  CHECK(r.radius == dgap_error_bound(1e-8, c));
  CHECK(r.epsilon == 0.5);
  CHECK_THROWS_AS(dgap_error_bound(-1.0, c), DomainError);
  CHECK_THROWS_AS(dgap_error_bound(1.0, example_constants(0.0)), DomainError);
}

TEST_CASE("L_k and the stopping threshold") {
  for (double eps : {0.5, 0.1, 1e-4}) {
    CHECK(dgap_bound_constant(example_constants(eps)) == doctest::Approx((4.0 + eps) / eps * std::sqrt(2.0)));
  }
  CHECK(dgap_bound_constant(example_constants(0.5)) == doctest::Approx(9.0 * std::sqrt(2.0)));
  CHECK(stopping_threshold(1e-6, example_constants(0.5)) == doctest::Approx(1e-12 / 162.0));
  double prev = stopping_threshold(1.0, example_constants(0.5));
  for (double tau = 0.5; tau > 1e-9; tau *= 0.5) {
    const double p = stopping_threshold(tau, example_constants(0.5));
    CHECK(p < prev);
    prev = p;
  }
  // theta = p gives radius tau exactly
  const double p = stopping_threshold(1e-4, example_constants(0.1));
  CHECK(dgap_error_bound(p, example_constants(0.1)) == doctest::Approx(1e-4));
}

TEST_CASE("eps error bounds") {
  const SharpnessModel quad{2.0, 1.0};
  CHECK(eps_error_bound_dualgap(quad, 1.0, 0.0) == 0.0);
  CHECK(eps_error_bound_dualgap(quad, 1.0, 0.01) == doctest::Approx(0.01));
  CHECK(eps_error_bound_direct(quad, 1.0, 0.0) == 0.0);
  CHECK(eps_error_bound_direct(quad, 2.0, 0.01) == doctest::Approx(0.02));
  const SharpnessModel cubic{3.0, 4.0};
  CHECK(eps_error_bound_dualgap(cubic, 1.0, 0.01) == doctest::Approx(std::sqrt(0.01 / 4.0)));
  CHECK_THROWS_AS(eps_error_bound_dualgap(SharpnessModel{1.0, 1.0}, 1.0, 0.1), DomainError);
  CHECK_THROWS_AS(eps_error_bound_dualgap(SharpnessModel{2.0, 0.0}, 1.0, 0.1), DomainError);
  CHECK(order1_margin(1.0, 0.1, 0.5, 1.0, 0.7) == doctest::Approx(0.5 * 0.3 - 0.1));
}

TEST_CASE("exactness verdicts on Example 5.1") {
  const ProblemInstance ex = example_5_1();
  CHECK(exactness_check(ex.problem, v3(0, -0.75, -0.25), 1e-11).verdict == Exactness::exact);
  for (const Point& s : ex.oracle->sample_S0(10, 4)) {
    CHECK(exactness_check(ex.problem, s, 1e-11).verdict == Exactness::exact);
  }
  // argmin of G + 0.5 * 0.5 ||x||^2 over Omega
  const double s = 0.5 / 4.0;
  const ExactnessReport r = exactness_check(ex.problem, v3(0, -0.75 + s, -0.25 - s), 1e-11);
  CHECK(r.verdict == Exactness::not_exact);
  CHECK(r.dual_gap == doctest::Approx(s * s / 2.0).epsilon(1e-6));
  // infeasible point is never exact
  CHECK(exactness_check(ex.problem, v3(2, -0.75, -0.25), 1e-11).verdict != Exactness::exact);
}

TEST_CASE("sharpness fit on a problem with G = d^2") {
  Point c(2);
  c << -0.3, 0.2;
  const ProblemInstance bowl = quadratic_bowl(c, 4.0, Point::Constant(2, -1.0), Point::Constant(2, 1.0));
  auto gen = seeded_engine(12, 0);
  std::vector<Point> xs;
  for (int i = 0; i < 40; ++i) {
    const double r = std::exp(std::log(1e-3) * (i / 40.0)) * 0.6;
    xs.push_back(c + r * gaussian_vector(gen, 2).normalized());
  }
  const SharpnessModel m = fit_sharpness(bowl.problem, [&](const Point& x) { return (x - c).norm(); }, xs);
  CHECK(m.source == SharpnessSource::fitted);
  CHECK(m.gamma == doctest::Approx(2.0).epsilon(0.01));
  CHECK(m.alpha_sharp == doctest::Approx(1.0).epsilon(0.01));

  std::vector<Point> ring;
  for (int i = 0; i < 10; ++i) ring.push_back(c + 0.1 * gaussian_vector(gen, 2).normalized());
  CHECK_THROWS_AS(fit_sharpness(bowl.problem, [&](const Point& x) { return (x - c).norm(); }, ring),
                  DegenerateSampleError);
}

TEST_CASE("sharpness fit on Example 5.1 stays near order 2") {
  const ProblemInstance ex = example_5_1();
  auto gen = seeded_engine(13, 0);
  std::uniform_real_distribution<double> t(0.0, 1.0), logr(std::log(1e-3), std::log(0.5));
  std::vector<Point> xs;
  for (int i = 0; i < 200; ++i) {
    const Point base = v3(t(gen), -0.75, -0.25);
    const Point dir = ex.problem.set.reduce_to_affine_hull(gaussian_vector(gen, 3)).normalized();
    xs.push_back(ex.problem.set.project(base + std::exp(logr(gen)) * dir));
  }
  const SharpnessModel m = fit_sharpness(ex.problem, ex.oracle->distance_to_S0, xs);
  CHECK(m.gamma >= 1.8);
  CHECK(m.gamma <= 2.2);
}

}  // TEST_SUITE
