// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vireg/core.hpp"

#include <cstdint>

namespace vireg {

/// Result of a gap evaluation. For theta_alpha / theta_ab, `maximizer` is
/// y_alpha(x) (and `beta_maximizer` is y_beta(x)); for the dual gap it is the
/// inner argmax y-bar.
struct GapEvaluation {
  double value = 0.0;
  Point maximizer;
  Point beta_maximizer;
  double alpha = 0.0;
  double beta = 0.0;
  double epsilon = 0.0;
  bool converged = true;
  int inner_iterations = 0;
};

/// y_alpha(x) = P_Omega(x - T_eps(x) / alpha).
///
/// When phi is nonsmooth but separable and Omega supports a separable prox,
/// the gap functions below switch to the mixed form: with t = eps / alpha,
///   y_alpha(x) = argmin_{y in Omega} 1/2 ||y - (x - F(x)/alpha)||^2 + t phi(y),
///   theta_alpha(x) = <F(x), x - y> + eps (phi(x) - phi(y)) - (alpha/2) ||x - y||^2.
/// This is continuous in x and vanishes exactly where 0 in F(x) + eps dphi(x) + N_Omega(x).
Point y_alpha(const RegularizedVI& vi, const Point& x, double alpha);

/// Whether the gap functions of vi use the mixed form above.
bool uses_mixed_form(const RegularizedVI& vi);

/// Regularized gap theta_alpha(x; eps phi) by the explicit projection formula.
GapEvaluation theta_alpha(const RegularizedVI& vi, const Point& x, double alpha);

/// D-gap theta_alpha(x) - theta_beta(x), 0 < alpha < beta. Nonnegative on R^n.
GapEvaluation theta_ab(const RegularizedVI& vi, const Point& x, double alpha, double beta);

/// Inner maximization settings for the dual gap sup_{y in Omega} <F(y), x - y>.
struct DualGapConfig {
  int starts = 8;
  int max_iterations = 2000;
  /// Stationarity tolerance on the projected-gradient residual at y-bar.
  double tolerance = 1e-9;
  /// Multistart perturbation scale, relative to 1 + ||x||.
  double perturbation = 0.25;
  std::uint64_t seed = 0;
  /// Values above this are reported as +inf with converged = false.
  double divergence_cap = 1e12;
};

/// Dual gap G(x), evaluated by multistart projected gradient ascent over Omega.
/// The value is a lower estimate of the supremum; `converged` reports whether
/// first-order stationarity held at the returned maximizer.
GapEvaluation dual_gap(const VIProblem& problem, const Point& x, const DualGapConfig& cfg = {});

class DualGapNonConvergence : public Error {
 public:
  DualGapNonConvergence(const std::string& what, GapEvaluation evaluation)
      : Error(what), evaluation_(std::move(evaluation)) {}
  const GapEvaluation& evaluation() const { return evaluation_; }

 private:
  GapEvaluation evaluation_;
};

/// F(y-bar), an element of the subdifferential of G at x. Throws
/// DualGapNonConvergence when the inner solve did not converge.
Point dual_gap_subgradient(const VIProblem& problem, const Point& x,
                           const DualGapConfig& cfg = {});

/// Same, reusing a finished evaluation.
Point dual_gap_subgradient(const VIProblem& problem, const GapEvaluation& evaluation);

}  // namespace vireg
