// SPDX-License-Identifier: Apache-2.0
#include "vireg/gap.hpp"

#include "vireg/rng.hpp"

#include <cmath>
#include <limits>

namespace vireg {

bool uses_mixed_form(const RegularizedVI& vi) {
  const Regularizer& reg = vi.op.regularizer();
  return !reg.smooth() && reg.separable() && vi.set.supports_separable_prox() && vi.epsilon() > 0.0;
}

namespace {

void require_alpha(double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw DomainError("gap: alpha must be positive");
}

double theta_from(const Point& t, const Point& x, const Point& y, double alpha) {
  const Point r = x - y;
  return t.dot(r) - 0.5 * alpha * r.squaredNorm();
}

// Nonsmooth separable phi: use the gap of the mixed problem
//   <F(x), y - x> + eps phi(y) - eps phi(x) >= 0  for all y in Omega,
// whose maximizer is a prox step instead of a projection.
bool mixed_form(const RegularizedVI& vi) { return uses_mixed_form(vi); }

struct Pieces {
  Point t;  // vi.op(x), or F(x) in mixed form
  double phi_x = 0.0;
};

Pieces pieces(const RegularizedVI& vi, const Point& x) {
  if (!mixed_form(vi)) return {vi.op(x), 0.0};
  return {vi.op.base()(x), vi.op.regularizer().value(x)};
}

Point maximizer(const RegularizedVI& vi, const Point& x, const Pieces& p, double alpha) {
  const Point z = x - p.t / alpha;
  if (!mixed_form(vi)) return vi.set.project(z);
  const Regularizer& reg = vi.op.regularizer();
  const double step = vi.epsilon() / alpha;
  return *vi.set.prox_separable(z, [&reg, step](double v, Eigen::Index i) { return reg.scalar_prox(v, i, step); });
}

double value_at(const RegularizedVI& vi, const Point& x, const Pieces& p, const Point& y, double alpha) {
  double v = theta_from(p.t, x, y, alpha);
  if (mixed_form(vi)) v += vi.epsilon() * (p.phi_x - vi.op.regularizer().value(y));
  return v;
}

}  // namespace

Point y_alpha(const RegularizedVI& vi, const Point& x, double alpha) {
  require_alpha(alpha);
  require_point(x, vi.dimension(), "y_alpha");
  return maximizer(vi, x, pieces(vi, x), alpha);
}

GapEvaluation theta_alpha(const RegularizedVI& vi, const Point& x, double alpha) {
  require_alpha(alpha);
  require_point(x, vi.dimension(), "theta_alpha");
  const Pieces p = pieces(vi, x);
  GapEvaluation ev;
  ev.maximizer = maximizer(vi, x, p, alpha);
  ev.value = value_at(vi, x, p, ev.maximizer, alpha);
  ev.alpha = alpha;
  ev.epsilon = vi.epsilon();
  return ev;
}

GapEvaluation theta_ab(const RegularizedVI& vi, const Point& x, double alpha, double beta) {
  require_alpha(alpha);
  if (!(beta > alpha) || !std::isfinite(beta)) {
    throw DomainError("theta_ab: requires 0 < alpha < beta");
  }
  require_point(x, vi.dimension(), "theta_ab");
  const Pieces p = pieces(vi, x);
  GapEvaluation ev;
  ev.maximizer = maximizer(vi, x, p, alpha);
  ev.beta_maximizer = maximizer(vi, x, p, beta);
  ev.value = value_at(vi, x, p, ev.maximizer, alpha) - value_at(vi, x, p, ev.beta_maximizer, beta);
  ev.alpha = alpha;
  ev.beta = beta;
  ev.epsilon = vi.epsilon();
  return ev;
}

// ---------------------------------------------------------------------------
// Dual gap: maximize h(y) = <F(y), x - y> over Omega.

namespace {

struct InnerObjective {
  const VIProblem& problem;
  const Point& x;

  double value(const Point& y) const { return problem.map(y).dot(x - y); }

  // grad h(y) = J_F(y)^T (x - y) - F(y)
  Point gradient(const Point& y, const Point& fy) const {
    const Point v = x - y;
    if (problem.map.has_adjoint()) return problem.map.adjoint_product(y, v) - fy;
    // Central differences of y -> <F(y), v> with v frozen.
    const double h = 1e-6 * (1.0 + y.norm());
    Point jtv(y.size());
    Point yp = y, ym = y;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      yp(i) = y(i) + h;
      ym(i) = y(i) - h;
      jtv(i) = (problem.map(yp).dot(v) - problem.map(ym).dot(v)) / (2.0 * h);
      yp(i) = y(i);
      ym(i) = y(i);
    }
    return jtv - fy;
  }
};

struct AscentResult {
  Point y;
  double value;
  bool converged;
  int iterations;
};

AscentResult ascend(const InnerObjective& obj, Point y, const DualGapConfig& cfg) {
  const FeasibleSet& set = obj.problem.set;
  const double lip = std::max(obj.problem.map.lipschitz(), 1e-6);
  const double t_max = 1e6 / lip;
  double t = 1.0 / (2.0 * lip);
  Point fy = obj.problem.map(y);
  double hy = fy.dot(obj.x - y);
  AscentResult res{y, hy, false, 0};
  for (int it = 0; it < cfg.max_iterations; ++it) {
    res.iterations = it;
    const Point g = obj.gradient(y, fy);
    const double residual = (set.project(y + g) - y).norm();
    if (residual <= cfg.tolerance) {
      res.converged = true;
      break;
    }
    bool accepted = false;
    Point y_next;
    double h_next = 0.0;
    for (int bt = 0; bt < 80; ++bt) {
      y_next = set.project(y + t * g);
      const Point dy = y_next - y;
      h_next = obj.value(y_next);
      const double model = hy + g.dot(dy) - 0.5 * dy.squaredNorm() / t;
      if (h_next >= model) {
        accepted = true;
        break;
      }
      // Near the maximizer the gain drops below rounding in h; fall back to
      // the curvature form of the same condition, which uses gradients only.
      if (h_next >= model - 1e-12 * (1.0 + std::abs(hy)) &&
          -(obj.gradient(y_next, obj.problem.map(y_next)) - g).dot(dy) <= dy.squaredNorm() / t) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;
    y = y_next;
    hy = h_next;
    fy = obj.problem.map(y);
    t = std::min(2.0 * t, t_max);
    if (!std::isfinite(hy) || hy > cfg.divergence_cap) {
      res.y = y;
      res.value = std::numeric_limits<double>::infinity();
      res.converged = false;
      res.iterations = it + 1;
      return res;
    }
  }
  res.y = y;
  res.value = hy;
  return res;
}

}  // namespace

GapEvaluation dual_gap(const VIProblem& problem, const Point& x, const DualGapConfig& cfg) {
  require_point(x, problem.map.dimension(), "dual_gap");
  if (cfg.starts < 1) throw DomainError("dual_gap: at least one start required");
  const InnerObjective obj{problem, x};
  const double scale = cfg.perturbation * (1.0 + x.norm());

  GapEvaluation best;
  best.value = -std::numeric_limits<double>::infinity();
  best.converged = false;
  int total = 0;
  for (int s = 0; s < cfg.starts; ++s) {
    Point start = x;
    if (s > 0) {
      auto gen = seeded_engine(cfg.seed, static_cast<std::uint64_t>(s));
      start += scale * gaussian_vector(gen, x.size());
    }
    const AscentResult r = ascend(obj, problem.set.project(start), cfg);
    total += r.iterations;
    if (r.value > best.value || (r.value == best.value && r.converged && !best.converged)) {
      best.value = r.value;
      best.maximizer = r.y;
      best.converged = r.converged;
    }
    if (std::isinf(r.value)) break;
  }
  best.inner_iterations = total;
  return best;
}

Point dual_gap_subgradient(const VIProblem& problem, const GapEvaluation& evaluation) {
  if (!evaluation.converged) {
    throw DualGapNonConvergence("dual_gap_subgradient: inner maximization did not converge",
                                evaluation);
  }
  return problem.map(evaluation.maximizer);
}

Point dual_gap_subgradient(const VIProblem& problem, const Point& x, const DualGapConfig& cfg) {
  return dual_gap_subgradient(problem, dual_gap(problem, x, cfg));
}

}  // namespace vireg
