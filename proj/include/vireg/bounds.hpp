// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vireg/core.hpp"
#include "vireg/gap.hpp"

#include <functional>
#include <string>
#include <vector>

namespace vireg {

/// Constants of the D-gap error bound for VI(T_eps, Omega).
struct DgapConstants {
  double L;        // Lipschitz constant of F
  double M;        // Lipschitz constant of grad phi
  double rho;      // strong convexity modulus of phi
  double alpha;
  double beta;
  double epsilon;
};

enum class BoundKind { dgap_to_regularized, eps_to_S0_dualgap, eps_to_S0_direct, stopping_threshold };

std::string to_string(BoundKind kind);

struct BoundReport {
  BoundKind kind;
  double radius;
  // Echoed inputs; unused ones stay zero.
  double epsilon = 0.0, alpha = 0.0, beta = 0.0, L = 0.0, M = 0.0, rho = 0.0;
  double gamma = 0.0, alpha_sharp = 0.0;
};

/// L_k = ((beta + L + eps M) / (eps rho)) * sqrt(2 / (beta - alpha)).
double dgap_bound_constant(const DgapConstants& c);

/// Upper bound on ||x - x_eps|| from theta_ab(x; eps phi):
/// ((beta + L + eps M)/(eps rho)) sqrt(2 theta / (beta - alpha)).
double dgap_error_bound(double theta_ab_value, const DgapConstants& c);
BoundReport dgap_error_report(double theta_ab_value, const DgapConstants& c);

/// p = tau^2 / L_k^2. theta_ab(x) <= p certifies ||x - x_eps|| <= tau.
double stopping_threshold(double tau, const DgapConstants& c);

enum class SharpnessSource { user_declared, fitted };

/// G(x) >= alpha_sharp * d(x, S0)^gamma on Omega.
struct SharpnessModel {
  double gamma;
  double alpha_sharp;
  SharpnessSource source = SharpnessSource::user_declared;
  // Fit diagnostics (fitted models only).
  double residual_rms = 0.0;
  int samples_used = 0;
};

void validate(const SharpnessModel& model);

/// d(x_eps, S0) <= (eps M / alpha_sharp)^(1/(gamma-1)) for minimizers of G + eps phi;
/// M bounds the subgradients of phi on S0.
double eps_error_bound_dualgap(const SharpnessModel& sharp, double subgrad_bound_m, double epsilon);

/// Same radius form, for solutions of VI(F + eps grad phi, Omega) under the pointwise
/// condition <F(P_S0 x), x - P_S0 x> >= alpha_sharp d(x,S0)^gamma; M bounds grad phi on S0.
double eps_error_bound_direct(const SharpnessModel& sharp, double grad_bound_m, double epsilon);

/// Order-1 consequence alpha_sharp d(x_eps, S0) <= eps (phi(P_S0 x_eps) - phi(x_eps)).
/// Returns the margin (right side minus left side); nonnegative when it holds.
double order1_margin(double alpha_sharp, double distance_to_s0, double epsilon,
                     double phi_at_projection, double phi_at_x);

enum class Exactness { exact, not_exact, inconclusive };

std::string to_string(Exactness verdict);

struct ExactnessReport {
  Exactness verdict;
  double dual_gap;
  bool inner_converged;
  bool feasible;
};

/// exact: G(x) <= tol and x in Omega; not_exact: G(x) > 10 tol with a converged
/// inner solve; inconclusive otherwise.
ExactnessReport exactness_check(const VIProblem& problem, const Point& x, double tol = 1e-6,
                                const DualGapConfig& cfg = {});

class DegenerateSampleError : public Error {
 public:
  using Error::Error;
};

/// Least-squares fit of log G(x) = log alpha_sharp + gamma log d(x, S0) over samples
/// with d in [1e-4, 1].
SharpnessModel fit_sharpness(const VIProblem& problem,
                             const std::function<double(const Point&)>& distance_to_s0,
                             const std::vector<Point>& samples, const DualGapConfig& cfg = {});

}  // namespace vireg
