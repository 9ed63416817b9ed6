// SPDX-License-Identifier: Apache-2.0
#include "vireg/bounds.hpp"

#include <cmath>

namespace vireg {

namespace {

void validate(const DgapConstants& c) {
  if (!(c.rho > 0.0)) throw DomainError("error bound: rho must be positive");
  if (!(c.epsilon > 0.0)) throw DomainError("error bound: epsilon must be positive");
  if (!(c.alpha > 0.0) || !(c.beta > c.alpha)) {
    throw DomainError("error bound: requires 0 < alpha < beta");
  }
  if (!(c.L >= 0.0) || !(c.M >= 0.0)) throw DomainError("error bound: L and M must be >= 0");
}

}  // namespace

std::string to_string(BoundKind kind) {
  switch (kind) {
    case BoundKind::dgap_to_regularized: return "dgap_to_regularized";
    case BoundKind::eps_to_S0_dualgap: return "eps_to_S0_dualgap";
    case BoundKind::eps_to_S0_direct: return "eps_to_S0_direct";
    case BoundKind::stopping_threshold: return "stopping_threshold";
  }
  return "unknown";
}

double dgap_bound_constant(const DgapConstants& c) {
  validate(c);
  return (c.beta + c.L + c.epsilon * c.M) / (c.epsilon * c.rho) * std::sqrt(2.0 / (c.beta - c.alpha));
}

double dgap_error_bound(double theta_ab_value, const DgapConstants& c) {
  if (!(theta_ab_value >= 0.0)) {
    // Rounding can leave a tiny negative D-gap value at a solution.
    if (theta_ab_value > -1e-12) theta_ab_value = 0.0;
    else throw DomainError("dgap_error_bound: theta_ab must be >= 0");
  }
  return dgap_bound_constant(c) * std::sqrt(theta_ab_value);
}

BoundReport dgap_error_report(double theta_ab_value, const DgapConstants& c) {
  BoundReport r{BoundKind::dgap_to_regularized, dgap_error_bound(theta_ab_value, c)};
  r.epsilon = c.epsilon;
  r.alpha = c.alpha;
  r.beta = c.beta;
  r.L = c.L;
  r.M = c.M;
  r.rho = c.rho;
  return r;
}

double stopping_threshold(double tau, const DgapConstants& c) {
  if (!(tau > 0.0)) throw DomainError("stopping_threshold: tau must be positive");
  const double lk = dgap_bound_constant(c);
  return (tau * tau) / (lk * lk);
}

void validate(const SharpnessModel& model) {
  if (!(model.gamma > 1.0)) throw DomainError("sharpness model: gamma must exceed 1");
  if (!(model.alpha_sharp > 0.0)) throw DomainError("sharpness model: alpha must be positive");
}

double eps_error_bound_dualgap(const SharpnessModel& sharp, double subgrad_bound_m,
                               double epsilon) {
  validate(sharp);
  if (!(subgrad_bound_m > 0.0)) throw DomainError("eps_error_bound_dualgap: M must be positive");
  if (!(epsilon >= 0.0)) throw DomainError("eps_error_bound_dualgap: epsilon must be >= 0");
  return std::pow(epsilon * subgrad_bound_m / sharp.alpha_sharp, 1.0 / (sharp.gamma - 1.0));
}

double eps_error_bound_direct(const SharpnessModel& sharp, double grad_bound_m, double epsilon) {
  validate(sharp);
  if (!(grad_bound_m > 0.0)) throw DomainError("eps_error_bound_direct: M must be positive");
  if (!(epsilon >= 0.0)) throw DomainError("eps_error_bound_direct: epsilon must be >= 0");
  const double tau = grad_bound_m / sharp.alpha_sharp;
  return std::pow(epsilon * tau, 1.0 / (sharp.gamma - 1.0));
}

double order1_margin(double alpha_sharp, double distance_to_s0, double epsilon,
                     double phi_at_projection, double phi_at_x) {
  return epsilon * (phi_at_projection - phi_at_x) - alpha_sharp * distance_to_s0;
}

std::string to_string(Exactness verdict) {
  switch (verdict) {
    case Exactness::exact: return "exact";
    case Exactness::not_exact: return "not_exact";
    case Exactness::inconclusive: return "inconclusive";
  }
  return "unknown";
}

ExactnessReport exactness_check(const VIProblem& problem, const Point& x, double tol,
                                const DualGapConfig& cfg) {
  if (!(tol > 0.0)) throw DomainError("exactness_check: tol must be positive");
  const GapEvaluation g = dual_gap(problem, x, cfg);
  ExactnessReport rep{Exactness::inconclusive, g.value, g.converged,
                      problem.set.contains(x, 1e-8)};
  if (rep.feasible && g.value <= tol) rep.verdict = Exactness::exact;
  else if (g.converged && g.value > 10.0 * tol) rep.verdict = Exactness::not_exact;
  return rep;
}

SharpnessModel fit_sharpness(const VIProblem& problem,
                             const std::function<double(const Point&)>& distance_to_s0,
                             const std::vector<Point>& samples, const DualGapConfig& cfg) {
  std::vector<double> lx, ly;
  for (const Point& x : samples) {
    const double d = distance_to_s0(x);
    if (!(d >= 1e-4 && d <= 1.0)) continue;
    const GapEvaluation g = dual_gap(problem, x, cfg);
    if (!g.converged || !(g.value > 0.0)) continue;
    lx.push_back(std::log(d));
    ly.push_back(std::log(g.value));
  }
  const std::size_t n = lx.size();
  if (n < 2) throw DegenerateSampleError("fit_sharpness: fewer than two usable samples");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (sxx / static_cast<double>(n) < 1e-8) {
    throw DegenerateSampleError("fit_sharpness: samples are (nearly) equidistant from S0");
  }
  SharpnessModel m;
  m.gamma = sxy / sxx;
  m.alpha_sharp = std::exp(my - m.gamma * mx);
  m.source = SharpnessSource::fitted;
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = ly[i] - (std::log(m.alpha_sharp) + m.gamma * lx[i]);
    ss += r * r;
  }
  m.residual_rms = std::sqrt(ss / static_cast<double>(n));
  m.samples_used = static_cast<int>(n);
  return m;
}

}  // namespace vireg
