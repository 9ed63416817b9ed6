// SPDX-License-Identifier: Apache-2.0
#include "vireg/solvers.hpp"

#include "vireg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vireg {

std::string to_string(Branch branch) {
  return branch == Branch::difference ? "difference" : "residual";
}

std::string to_string(InnerStatus status) {
  switch (status) {
    case InnerStatus::certified: return "certified";
    case InnerStatus::numerical_floor: return "numerical_floor";
    case InnerStatus::fixed_point: return "fixed_point";
    case InnerStatus::stagnated: return "stagnated";
    case InnerStatus::iteration_limit: return "iteration_limit";
  }
  return "unknown";
}

std::string to_string(StepRule rule) {
  return rule == StepRule::diminishing ? "diminishing" : "backtracking";
}

double max_direction_constant(double alpha, double beta, double L_theta) {
  return std::min(1.0, (beta - alpha) / (2.0 * (L_theta + beta)));
}

double max_descent_constant(double alpha, double beta, double c, double mu) {
  return std::min(0.5 * std::sqrt((beta - alpha) / 2.0),
                  std::sqrt(2.0) * c * mu / std::sqrt(beta - alpha));
}

void InnerConfig::validate(double mu) const {
  if (!(alpha > 0.0) || !(beta > alpha)) throw DomainError("InnerConfig: requires 0 < alpha < beta");
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("InnerConfig: gamma must lie in (0,1)");
  if (!(L_theta > 0.0)) throw DomainError("InnerConfig: L_theta estimate must be positive");
  const double c_max = max_direction_constant(alpha, beta, L_theta);
  if (!(c > 0.0) || c > c_max * (1.0 + 1e-12)) {
    throw DomainError("InnerConfig: c must lie in (0, min{1, (beta-alpha)/(2(L_theta+beta))}]");
  }
  const double d_max = max_descent_constant(alpha, beta, c, mu);
  if (!(delta > 0.0) || delta > d_max * (1.0 + 1e-12)) {
    throw DomainError("InnerConfig: delta outside its admissible range");
  }
  if (max_backtracks < 1 || max_iterations < 0) throw DomainError("InnerConfig: bad budgets");
}

InnerConfig make_inner_config(double L_theta, double mu, double alpha, double beta, double gamma) {
  InnerConfig cfg;
  cfg.alpha = alpha;
  cfg.beta = beta;
  cfg.gamma = gamma;
  cfg.L_theta = L_theta;
  cfg.c = max_direction_constant(alpha, beta, L_theta);
  cfg.delta = max_descent_constant(alpha, beta, cfg.c, mu);
  return cfg;
}

double estimate_L_theta(const RegularizedVI& vi, const Point& x0, double alpha, double beta,
                        int pairs, std::uint64_t seed) {
  const double theta0 = theta_ab(vi, x0, alpha, beta).value;
  const Eigen::Index n = x0.size();
  double radius = 1.0 + (x0 - y_alpha(vi, x0, alpha)).norm();
  double best = 0.0;
  int found = 0;
  int misses = 0;
  for (std::uint64_t i = 0; found < pairs && i < static_cast<std::uint64_t>(pairs) * 200; ++i) {
    auto gen = seeded_engine(seed, i);
    Point u = x0;
    if (i > 0) {
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      u += radius * unit(gen) * gaussian_vector(gen, n).normalized();
      if (theta_ab(vi, u, alpha, beta).value > theta0) {
        if (++misses % 20 == 0) radius *= 0.5;
        continue;
      }
    }
    const double h = 1e-4 * (1.0 + u.norm());
    const Point v = u + h * gaussian_vector(gen, n).normalized();
    const double du = theta_ab(vi, u, alpha, beta).value;
    const double dv = theta_ab(vi, v, alpha, beta).value;
    best = std::max(best, std::abs(du - dv) / (u - v).norm());
    ++found;
  }
  return std::max(best, 1e-12);
}

Direction li_ng_direction(const RegularizedVI& vi, const Point& x, const InnerConfig& cfg) {
  GapEvaluation g = theta_ab(vi, x, cfg.alpha, cfg.beta);
  const Point& ya = g.maximizer;
  const Point& yb = g.beta_maximizer;
  Direction out;
  if (cfg.c * (x - ya).norm() <= (ya - yb).norm()) {
    out.d = ya - yb;
    out.branch = Branch::difference;
  } else {
    out.d = ya - x;
    out.branch = Branch::residual;
  }
  out.gap = std::move(g);
  return out;
}

ArmijoStep armijo_step(const RegularizedVI& vi, const Point& x, double theta_x, const Point& d,
                       const InnerConfig& cfg) {
  const double dn = d.norm();
  if (!(dn > 0.0)) throw DomainError("armijo_step: direction must be nonzero");
  const double root = std::sqrt(std::max(theta_x, 0.0));
  for (int m = 0; m <= cfg.max_backtracks; ++m) {
    const double step = std::pow(cfg.gamma, m);
    Point xn = x + step * d;
    const double tn = theta_ab(vi, xn, cfg.alpha, cfg.beta).value;
    if (std::sqrt(std::max(tn, 0.0)) - root <= -(cfg.delta / 4.0) * step * dn) {
      return {m, step, std::move(xn), tn};
    }
  }
  std::ostringstream os;
  os << "armijo_step: no acceptable step within " << cfg.max_backtracks
     << " backtracks (theta_ab = " << theta_x << ")";
  throw StepFailure(os.str(), x, theta_x);
}

ArmijoStep armijo_step(const RegularizedVI& vi, const Point& x, const Point& d,
                       const InnerConfig& cfg) {
  return armijo_step(vi, x, theta_ab(vi, x, cfg.alpha, cfg.beta).value, d, cfg);
}

DgapConstants dgap_constants(const RegularizedVI& vi, const InnerConfig& cfg) {
  const Regularizer& reg = vi.op.regularizer();
  return DgapConstants{vi.op.base().lipschitz(), reg.lipschitz_m(), reg.rho(), cfg.alpha,
                       cfg.beta, vi.epsilon()};
}

InnerResult solve_inner(const RegularizedVI& vi, const Point& x0, double tau,
                        const InnerConfig& cfg) {
  require_point(x0, vi.dimension(), "solve_inner");
  const Regularizer& reg = vi.op.regularizer();
  const bool certified_mode = !cfg.experimental_nonsmooth;
  if (certified_mode) {
    if (!reg.smooth() || !(reg.rho() > 0.0) || !(vi.epsilon() > 0.0)) {
      throw DomainError(
          "solve_inner: certified mode needs smooth phi with rho > 0 and eps > 0 "
          "(enable experimental_nonsmooth otherwise)");
    }
    cfg.validate(vi.op.mu());
  } else {
    cfg.validate(std::max(vi.op.mu(), vi.epsilon()));
  }

  InnerResult res;
  if (certified_mode) {
    const DgapConstants constants = dgap_constants(vi, cfg);
    res.L_k = dgap_bound_constant(constants);
    res.threshold = stopping_threshold(tau, constants);
  }

  Point x = x0;
  double theta = theta_ab(vi, x, cfg.alpha, cfg.beta).value;
  auto finish = [&](InnerStatus status) {
    res.x = x;
    res.theta = theta;
    res.status = status;
    return res;
  };

  int flat_run = 0;
  int nonmonotone_left = cfg.nonmonotone_budget;
  for (long j = 0;; ++j) {
    res.iterations = j;
    if (certified_mode && theta <= res.threshold) {
      // Below the floor the comparison is decided by rounding, not by progress.
      return finish(res.threshold < cfg.floor ? InnerStatus::numerical_floor
                                              : InnerStatus::certified);
    }
    // Without a certified threshold, rounding level is as far as descent goes.
    if (!certified_mode && theta <= cfg.floor) return finish(InnerStatus::numerical_floor);
    if (j >= cfg.max_iterations) {
      if (!certified_mode) return finish(InnerStatus::iteration_limit);
      throw InnerIterationLimit("solve_inner: iteration budget exhausted",
                                finish(InnerStatus::iteration_limit));
    }
    const Direction dir = li_ng_direction(vi, x, cfg);
    if (dir.d.norm() == 0.0) return finish(InnerStatus::fixed_point);
    Point d = dir.d;
    Branch branch = dir.branch;
    ArmijoStep step{0, 0.0, x, theta};
    try {
      step = armijo_step(vi, x, theta, d, cfg);
    } catch (const StepFailure&) {
      if (theta <= cfg.floor && (!certified_mode || res.threshold < cfg.floor)) {
        return finish(InnerStatus::numerical_floor);
      }
      if (certified_mode) throw;
      step.step = 0.0;
    }
    auto negligible = [&](const ArmijoStep& s, const Point& dd) {
      return s.step * dd.norm() <= cfg.stagnation_tol * (1.0 + x.norm());
    };
    if (!certified_mode && negligible(step, d)) {
      // Nonsmooth phi: theta_ab can be flat along one branch and not the other.
      const Branch other = branch == Branch::difference ? Branch::residual : Branch::difference;
      const Point alt = other == Branch::difference
                            ? Point(dir.gap.maximizer - dir.gap.beta_maximizer)
                            : Point(dir.gap.maximizer - x);
      bool switched = false;
      if (alt.norm() > 0.0) {
        try {
          ArmijoStep s2 = armijo_step(vi, x, theta, alt, cfg);
          if (!negligible(s2, alt)) {
            step = std::move(s2);
            d = alt;
            branch = other;
            switched = true;
          }
        } catch (const StepFailure&) {
        }
      }
      if (!switched) {
        // theta_ab can also be flat along the difference direction itself (a
        // constant subgradient far from a kink). Walk while it does not rise.
        const Point diff = dir.gap.maximizer - dir.gap.beta_maximizer;
        if (flat_run >= cfg.max_flat_steps || diff.norm() == 0.0) return finish(InnerStatus::stagnated);
        // Largest doubling step with theta below each cap. Rounding-level rises are
        // always allowed (theta is a difference of O(|x|^2) terms); doubling theta
        // is allowed while the nonmonotone budget lasts, Armijo steps on the other
        // components pulling it back afterwards.
        const double noise = theta + 1e-14 * (1.0 + x.squaredNorm());
        const double loose = 2.0 * theta + 1e-14 * (1.0 + x.squaredNorm());
        const bool allow_rise = nonmonotone_left > 0;
        double t = 0.0, th = theta, t_mono = 0.0, th_mono = theta;
        Point xn = x, xn_mono = x;
        bool mono_prefix = true;
        for (int k = 0; k <= 40; ++k) {
          const double tk = std::ldexp(1.0, k);
          Point cand = x + tk * diff;
          const double thc = theta_ab(vi, cand, cfg.alpha, cfg.beta).value;
          if (!(thc <= (allow_rise ? loose : noise))) break;
          mono_prefix = mono_prefix && thc <= noise;
          if (mono_prefix) {
            t_mono = tk;
            th_mono = thc;
            xn_mono = cand;
          }
          t = tk;
          th = thc;
          xn = std::move(cand);
        }
        if (t > t_mono) {
          --nonmonotone_left;
        } else {
          t = t_mono;
          th = th_mono;
          xn = std::move(xn_mono);
        }
        if (t == 0.0 || t * diff.norm() <= cfg.stagnation_tol * (1.0 + x.norm())) {
          return finish(InnerStatus::stagnated);
        }
        step = ArmijoStep{-1, t, std::move(xn), th};
        d = diff;
        branch = Branch::difference;
        ++flat_run;
      } else {
        flat_run = 0;
      }
    } else {
      flat_run = 0;
    }
    if (cfg.keep_trace) {
      res.records.push_back(InnerRecord{j, step.x_next, theta, step.theta_next, step.m, step.step,
                                        d.norm(), branch});
    }
    x = std::move(step.x_next);
    theta = step.theta_next;
  }
}

// ---------------------------------------------------------------------------

OuterConfig OuterConfig::geometric(double eps0, double ratio, int count, double tau) {
  OuterConfig cfg;
  for (int k = 0; k < count; ++k) cfg.epsilons.push_back(eps0 * std::pow(ratio, k));
  cfg.taus = {tau};
  return cfg;
}

OuterConfig OuterConfig::down_to(double target, double eps0, double ratio, double tau) {
  if (!(target > 0.0)) throw DomainError("OuterConfig::down_to: target must be positive");
  OuterConfig cfg;
  for (double e = eps0; e > target * (1.0 + 1e-12); e *= ratio) cfg.epsilons.push_back(e);
  cfg.epsilons.push_back(target);
  cfg.taus = {tau};
  return cfg;
}

void OuterConfig::validate() const {
  if (epsilons.empty()) throw DomainError("OuterConfig: empty epsilon schedule");
  for (std::size_t k = 0; k < epsilons.size(); ++k) {
    if (!(epsilons[k] > 0.0)) throw DomainError("OuterConfig: epsilons must be positive");
    if (k > 0 && !(epsilons[k] < epsilons[k - 1])) {
      throw DomainError("OuterConfig: epsilons must be strictly decreasing");
    }
  }
  if (taus.empty() || (taus.size() != 1 && taus.size() != epsilons.size())) {
    throw DomainError("OuterConfig: taus must have one entry or one per epsilon");
  }
  for (double t : taus) {
    if (!(t > 0.0)) throw DomainError("OuterConfig: taus must be positive");
  }
  if (!(alpha > 0.0) || !(beta > alpha)) throw DomainError("OuterConfig: requires 0 < alpha < beta");
}

SequentialResult sequential_inexact_descent(const VIProblem& problem, const Regularizer& reg,
                                            const Point& x0, const OuterConfig& cfg) {
  cfg.validate();
  if (!reg.smooth() || !(reg.rho() > 0.0)) {
    throw DomainError("sequential_inexact_descent: phi must be smooth and strongly convex");
  }
  require_point(x0, problem.map.dimension(), "sequential_inexact_descent");

  SequentialResult out;
  Point x = x0;
  double alpha = cfg.alpha, beta = cfg.beta;
  const int outer = static_cast<int>(std::min<std::size_t>(cfg.epsilons.size(), cfg.max_outer));
  for (int k = 0; k < outer; ++k) {
    if (k > 0 && cfg.update_alpha_beta) {
      const auto [a, b] = cfg.update_alpha_beta(k, alpha, beta);
      if (!(a >= alpha) || !(b <= beta) || !(a > 0.0) || !(b > a)) {
        throw DomainError("sequential_inexact_descent: alpha/beta update violates monotonicity");
      }
      alpha = a;
      beta = b;
    }
    const double eps = cfg.epsilons[static_cast<std::size_t>(k)];
    const double tau = cfg.tau(static_cast<std::size_t>(k));
    const RegularizedVI vi = regularize(problem, reg, eps);
    const double L_theta =
        estimate_L_theta(vi, x, alpha, beta, cfg.L_theta_pairs, cfg.seed + static_cast<std::uint64_t>(k));
    InnerConfig icfg = make_inner_config(L_theta, vi.op.mu(), alpha, beta, cfg.gamma);
    icfg.max_iterations = cfg.max_inner_iterations;
    icfg.floor = cfg.floor;
    icfg.keep_trace = cfg.keep_inner_trace;

    InnerResult res;
    try {
      res = solve_inner(vi, x, tau, icfg);
    } catch (const InnerIterationLimit& e) {
      out.trace.inner.push_back(e.partial().records);
      throw SequentialFailure(std::string("outer step ") + std::to_string(k) + ": " + e.what(),
                              out.trace);
    } catch (const StepFailure& e) {
      throw SequentialFailure(std::string("outer step ") + std::to_string(k) + ": " + e.what(),
                              out.trace);
    }
    OuterRecord rec;
    rec.k = k;
    rec.epsilon = eps;
    rec.tau = tau;
    rec.x = res.x;
    rec.theta = res.theta;
    rec.threshold = res.threshold;
    rec.radius = dgap_error_bound(std::max(res.theta, 0.0), dgap_constants(vi, icfg));
    rec.L_theta = L_theta;
    rec.inner_iterations = res.iterations;
    rec.status = res.status;
    out.trace.outer.push_back(rec);
    out.trace.inner.push_back(std::move(res.records));
    out.total_inner_iterations += rec.inner_iterations;
    x = res.x;
  }
  out.x_final = x;
  return out;
}

// ---------------------------------------------------------------------------

PgeResult solve_pge(const VIProblem& problem, const Regularizer& reg, double epsilon,
                    const Point& x0, const PgeConfig& cfg) {
  require_point(x0, problem.map.dimension(), "solve_pge");
  if (!(epsilon >= 0.0)) throw DomainError("solve_pge: epsilon must be >= 0");
  if (cfg.max_iterations < 1) throw DomainError("solve_pge: iteration budget must be positive");

  const FeasibleSet& set = problem.set;
  const double t0 = cfg.t0 > 0.0 ? cfg.t0 : 1.0 / (1.0 + epsilon);
  const bool proximal = cfg.prox_regularizer && reg.separable() && set.supports_separable_prox();

  PgeResult res;
  res.proximal = proximal;
  int evaluations = 0;
  auto gap_at = [&](const Point& z) {
    GapEvaluation g = dual_gap(problem, z, cfg.dual);
    ++evaluations;
    if (!g.converged) ++res.inner_failures;
    return g;
  };
  // Smooth part of the model: G alone under the prox step, G + eps phi otherwise.
  auto model_value = [&](const GapEvaluation& g, const Point& z) {
    return proximal ? g.value : g.value + epsilon * reg.value(z);
  };
  auto step_from = [&](const Point& x, const Point& dir, double t) -> Point {
    if (!proximal) return set.project(x - t * dir);
    const double te = t * epsilon;
    return *set.prox_separable(x - t * dir, [&reg, te](double v, Eigen::Index i) {
      return reg.scalar_prox(v, i, te);
    });
  };

  Point x = set.project(x0);
  GapEvaluation g = gap_at(x);
  double best = std::numeric_limits<double>::infinity();
  double t = t0;

  for (int j = 0; j < cfg.max_iterations; ++j) {
    res.iterations = j + 1;
    const double phi = reg.value(x);
    const double f = g.value + epsilon * phi;
    if (f < best) {
      best = f;
      res.x = x;
      res.objective = f;
      res.G = g.value;
      res.best_iteration = j;
    }
    if (evaluations >= cfg.min_iterations_for_abort &&
        res.inner_failures > cfg.nonconvergence_fraction * evaluations) {
      std::ostringstream os;
      os << "solve_pge: dual gap inner solve failed at " << res.inner_failures << " of "
         << evaluations << " evaluations (last G = " << g.value << ")";
      throw PgeAbort(os.str(), res);
    }
    if (!std::isfinite(g.value)) {
      throw PgeAbort("solve_pge: dual gap is unbounded at the current iterate", res);
    }

    const Point fy = problem.map(g.maximizer);
    const Point dir = set.reduce_to_affine_hull(proximal ? fy : Point(fy + epsilon * reg.direction(x)));
    const double t_floor = t0 / std::sqrt(static_cast<double>(j) + 1.0);
    Point xn;
    GapEvaluation gn;
    if (cfg.rule == StepRule::diminishing) {
      t = t_floor;
      xn = step_from(x, dir, t);
      gn = gap_at(xn);
    } else {
      t = std::min(2.0 * t, cfg.t_max);
      const double mx = model_value(g, x);
      bool accepted = false;
      for (int bt = 0; bt < cfg.max_backtracks && t > t_floor; ++bt) {
        xn = step_from(x, dir, t);
        gn = gap_at(xn);
        const Point d = xn - x;
        const double slack = 1e-14 * (1.0 + std::abs(mx));
        if (model_value(gn, xn) <= mx + dir.dot(d) + d.squaredNorm() / (2.0 * t) + slack) {
          accepted = true;
          break;
        }
        t *= 0.5;
      }
      if (!accepted) {
        t = t_floor;
        xn = step_from(x, dir, t);
        gn = gap_at(xn);
      }
    }
    if (cfg.keep_trace) {
      res.records.push_back(PgeRecord{j, x, g.value, phi, f, best, t, g.converged});
    }
    const double moved = (xn - x).norm();
    x = std::move(xn);
    g = std::move(gn);
    if (g.converged && moved <= cfg.stationarity_tol * (1.0 + x.norm())) {
      const double fx = g.value + epsilon * reg.value(x);
      if (fx < best) {
        res.x = x;
        res.objective = fx;
        res.G = g.value;
        res.best_iteration = j + 1;
      }
      break;
    }
  }
  return res;
}

}  // namespace vireg
