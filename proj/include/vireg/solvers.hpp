// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vireg/bounds.hpp"
#include "vireg/core.hpp"
#include "vireg/gap.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace vireg {

// ---------------------------------------------------------------------------
// D-gap descent (direction choice and Armijo rule on sqrt(theta_ab)) for
// VI(T_eps, Omega).

/// Inner solver constants. `c` and `delta` must respect
///   c     <= min{1, (beta - alpha) / (2 (L_theta + beta))}
///   delta <= min{sqrt((beta - alpha)/2) / 2, sqrt(2) c mu / sqrt(beta - alpha)}
/// with mu the strong monotonicity modulus of T_eps; make_inner_config() sets
/// both to their upper limits.
struct InnerConfig {
  double alpha = 1.0;
  double beta = 2.0;
  double gamma = 0.9;
  double c = 0.0;
  double delta = 0.0;
  double L_theta = 0.0;
  int max_backtracks = 400;
  long max_iterations = 2'000'000;
  /// theta_ab values below this are indistinguishable from rounding noise.
  double floor = 1e-16;
  /// Allows nonsmooth phi in T_eps; stopping falls back to the iteration budget
  /// and stagnation of ||x^{j+1} - x^j||.
  bool experimental_nonsmooth = false;
  double stagnation_tol = 1e-13;
  /// Experimental mode only: when no branch admits an Armijo step, move along
  /// y_alpha - y_beta by the largest step 2^k (k <= 40) that keeps theta_ab
  /// within rounding of its current value, or (at most `nonmonotone_budget`
  /// times per solve) that at most doubles it. Recorded with m = -1. Stops
  /// after `max_flat_steps` consecutive such steps.
  int max_flat_steps = 200;
  int nonmonotone_budget = 200;
  /// Keep per-iteration records (points included) in the result.
  bool keep_trace = true;

  /// Throws DomainError when the parameter invariants fail for modulus mu.
  void validate(double mu) const;
};

double max_direction_constant(double alpha, double beta, double L_theta);
double max_descent_constant(double alpha, double beta, double c, double mu);

InnerConfig make_inner_config(double L_theta, double mu, double alpha = 1.0, double beta = 2.0,
                              double gamma = 0.9);

/// Sampled max of |theta_ab(u) - theta_ab(v)| / ||u - v|| over seeded nearby
/// pairs with u in the level set { theta_ab <= theta_ab(x0) }.
double estimate_L_theta(const RegularizedVI& vi, const Point& x0, double alpha, double beta,
                        int pairs = 200, std::uint64_t seed = 0);

enum class Branch { difference, residual };

std::string to_string(Branch branch);

struct Direction {
  Point d;
  Branch branch;
  GapEvaluation gap;  // theta_ab at x, with y_alpha and y_beta
};

/// d = y_alpha - y_beta when c ||x - y_alpha|| <= ||y_alpha - y_beta||, else y_alpha - x.
Direction li_ng_direction(const RegularizedVI& vi, const Point& x, const InnerConfig& cfg);

struct ArmijoStep {
  int m;
  double step;  // gamma^m
  Point x_next;
  double theta_next;
};

class StepFailure : public Error {
 public:
  StepFailure(const std::string& what, Point x, double theta)
      : Error(what), x_(std::move(x)), theta_(theta) {}
  const Point& point() const { return x_; }
  double theta() const { return theta_; }

 private:
  Point x_;
  double theta_;
};

/// Smallest m >= 0 with
///   sqrt(theta(x + gamma^m d)) - sqrt(theta(x)) <= -(delta/4) gamma^m ||d||.
ArmijoStep armijo_step(const RegularizedVI& vi, const Point& x, const Point& d,
                       const InnerConfig& cfg);
ArmijoStep armijo_step(const RegularizedVI& vi, const Point& x, double theta_x, const Point& d,
                       const InnerConfig& cfg);

struct InnerRecord {
  long j;
  Point point;   // iterate after the step
  double theta_before;
  double theta;  // theta_ab at `point`
  int m;  // Armijo exponent, -1 for a flat step
  double step;
  double direction_norm;
  Branch branch;
};

enum class InnerStatus { certified, numerical_floor, fixed_point, stagnated, iteration_limit };

std::string to_string(InnerStatus status);

struct InnerResult {
  Point x;
  double theta = 0.0;
  /// p = tau^2 / L_k^2 (zero in experimental mode).
  double threshold = 0.0;
  double L_k = 0.0;
  long iterations = 0;
  InnerStatus status = InnerStatus::certified;
  std::vector<InnerRecord> records;
};

class InnerIterationLimit : public Error {
 public:
  InnerIterationLimit(const std::string& what, InnerResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const InnerResult& partial() const { return partial_; }

 private:
  InnerResult partial_;
};

/// Approximately solves VI(T_eps, Omega) by D-gap descent, stopping once
/// theta_ab(x) <= tau^2 / L_k^2 (which certifies ||x - x_eps|| <= tau).
InnerResult solve_inner(const RegularizedVI& vi, const Point& x0, double tau,
                        const InnerConfig& cfg);

/// Bound constants of vi for the (alpha, beta) pair in cfg.
DgapConstants dgap_constants(const RegularizedVI& vi, const InnerConfig& cfg);

// ---------------------------------------------------------------------------
// Sequential inexact descent: inner solves over a decreasing eps sequence, each
// warm-started from the previous approximate solution.

struct OuterConfig {
  std::vector<double> epsilons;
  /// One entry (constant tolerance) or one per epsilon.
  std::vector<double> taus{1e-6};
  double alpha = 1.0;
  double beta = 2.0;
  double gamma = 0.9;
  int L_theta_pairs = 200;
  std::uint64_t seed = 0;
  long max_inner_iterations = 2'000'000;
  double floor = 1e-16;
  int max_outer = 10'000;
  bool keep_inner_trace = true;
  /// Optional hook choosing (alpha_k, beta_k) per outer step; must keep
  /// alpha non-decreasing, beta non-increasing and alpha < beta.
  std::function<std::pair<double, double>(int k, double alpha, double beta)> update_alpha_beta;

  /// eps_k = eps0 * ratio^k for k < count.
  static OuterConfig geometric(double eps0 = 0.5, double ratio = 0.5, int count = 12,
                               double tau = 1e-6);
  /// Geometric from eps0 while above target, then target itself as the final value.
  static OuterConfig down_to(double target, double eps0 = 0.5, double ratio = 0.5,
                             double tau = 1e-6);

  void validate() const;
  double tau(std::size_t k) const { return taus.size() == 1 ? taus.front() : taus.at(k); }
};

struct OuterRecord {
  int k;
  double epsilon;
  double tau;
  Point x;
  double theta;
  double threshold;
  /// dgap_error_bound at x: certified distance to x_eps.
  double radius;
  double L_theta;
  long inner_iterations;
  InnerStatus status;
};

struct SolverTrace {
  std::vector<OuterRecord> outer;
  std::vector<std::vector<InnerRecord>> inner;
};

struct SequentialResult {
  SolverTrace trace;
  Point x_final;
  long total_inner_iterations = 0;
};

class SequentialFailure : public Error {
 public:
  SequentialFailure(const std::string& what, SolverTrace partial)
      : Error(what), partial_(std::move(partial)) {}
  const SolverTrace& partial() const { return partial_; }

 private:
  SolverTrace partial_;
};

SequentialResult sequential_inexact_descent(const VIProblem& problem, const Regularizer& reg,
                                            const Point& x0, const OuterConfig& cfg);

// ---------------------------------------------------------------------------
// Projected subgradient method for min_{x in Omega} G(x) + eps phi(x).

enum class StepRule {
  /// t_j = t0 / sqrt(j + 1).
  diminishing,
  /// t doubled after each accepted step, halved until
  ///   G(x+) <= G(x) + <g, x+ - x> + ||x+ - x||^2 / (2t)
  /// holds (G + eps phi in place of G without the prox step); never below the
  /// diminishing value t0 / sqrt(j + 1), which is taken untested.
  backtracking,
};

std::string to_string(StepRule rule);

struct PgeConfig {
  StepRule rule = StepRule::backtracking;
  int max_iterations = 4000;
  /// t0 of the diminishing schedule (<= 0 selects 1 / (1 + eps)).
  double t0 = 0.0;
  double t_max = 1e6;
  int max_backtracks = 60;
  /// Take the eps phi part through the exact prox of t eps phi + indicator(Omega)
  /// when phi is separable and the set supports it:
  ///   x+ = argmin_{z in Omega} 0.5 ||z - (x - t F(y-bar))||^2 + t eps phi(z).
  /// Otherwise (or when false) x+ = P_Omega(x - t (F(y-bar) + eps g_phi(x))).
  bool prox_regularizer = true;
  /// Stop when ||x+ - x|| <= stationarity_tol (1 + ||x||) after a converged
  /// dual-gap solve.
  double stationarity_tol = 1e-15;
  DualGapConfig dual;
  /// Abort once more than this fraction of dual-gap solves failed to converge
  /// (checked from iteration min_iterations_for_abort on).
  double nonconvergence_fraction = 0.1;
  int min_iterations_for_abort = 100;
  bool keep_trace = true;
};

struct PgeRecord {
  int j;
  Point x;
  double G;
  double phi;
  double objective;
  double best;
  double step;
  bool inner_converged;
};

struct PgeResult {
  Point x;  // best iterate by objective
  bool proximal = false;  // whether the prox step was used
  double objective = 0.0;
  double G = 0.0;
  int iterations = 0;
  int best_iteration = 0;
  int inner_failures = 0;
  std::vector<PgeRecord> records;
};

class PgeAbort : public Error {
 public:
  PgeAbort(const std::string& what, PgeResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const PgeResult& partial() const { return partial_; }

 private:
  PgeResult partial_;
};

/// Subgradient descent on G + eps phi over Omega, with F(y-bar(x)) in dG(x); returns
/// the best iterate by objective.
PgeResult solve_pge(const VIProblem& problem, const Regularizer& reg, double epsilon,
                    const Point& x0, const PgeConfig& cfg = {});

}  // namespace vireg
