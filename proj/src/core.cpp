// SPDX-License-Identifier: Apache-2.0
#include "vireg/core.hpp"

#include "vireg/rng.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace vireg {

bool all_finite(const Point& x) { return x.allFinite(); }

void require_point(const Point& x, Eigen::Index dim, const char* what) {
  if (x.size() != dim) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(dim) +
                         ", got " + std::to_string(x.size()));
  }
  if (!x.allFinite()) throw DomainError(std::string(what) + ": non-finite entry");
}

// ---------------------------------------------------------------------------

MonotoneMap::MonotoneMap(Eigen::Index dimension, Evaluator evaluate, double lipschitz,
                         Monotonicity monotonicity, double mu, AdjointProduct adjoint)
    : dim_(dimension),
      evaluate_(std::move(evaluate)),
      lipschitz_(lipschitz),
      monotonicity_(monotonicity),
      mu_(mu),
      adjoint_(std::move(adjoint)) {
  if (dim_ < 1) throw DimensionError("MonotoneMap: dimension must be positive");
  if (!(lipschitz_ >= 0.0)) throw DomainError("MonotoneMap: Lipschitz constant must be >= 0");
  if (!(mu_ >= 0.0)) throw DomainError("MonotoneMap: mu must be >= 0");
  if (monotonicity_ == Monotonicity::strongly_monotone && !(mu_ > 0.0)) {
    throw DomainError("MonotoneMap: strongly monotone map needs mu > 0");
  }
  if (monotonicity_ == Monotonicity::monotone) mu_ = 0.0;
}

Point MonotoneMap::operator()(const Point& x) const {
  require_point(x, dim_, "MonotoneMap");
  Point fx = evaluate_(x);
  if (fx.size() != dim_) throw DimensionError("MonotoneMap: operator returned wrong dimension");
  if (!fx.allFinite()) throw DomainError("MonotoneMap: operator output contains NaN/Inf");
  return fx;
}

Point MonotoneMap::adjoint_product(const Point& y, const Point& v) const {
  if (!adjoint_) throw Error("MonotoneMap: no adjoint product registered");
  return adjoint_(y, v);
}

MonotoneMap MonotoneMap::zero(Eigen::Index dimension) {
  return MonotoneMap(
      dimension, [dimension](const Point&) { return Point::Zero(dimension); }, 0.0,
      Monotonicity::monotone, 0.0,
      [dimension](const Point&, const Point&) { return Point::Zero(dimension); });
}

MonotoneMap MonotoneMap::affine(Eigen::MatrixXd m, Point q, double mu) {
  if (m.rows() != m.cols() || m.rows() != q.size()) {
    throw DimensionError("MonotoneMap::affine: M must be n x n and q of length n");
  }
  const Eigen::Index n = q.size();
  const double lip = n > 0 ? Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues()(0) : 0.0;
  const auto cls = mu > 0.0 ? Monotonicity::strongly_monotone : Monotonicity::monotone;
  return MonotoneMap(
      n, [m, q](const Point& x) -> Point { return m * x + q; }, lip, cls, mu,
      [m](const Point&, const Point& v) -> Point { return m.transpose() * v; });
}

// ---------------------------------------------------------------------------

Regularizer::Regularizer(std::string name, Value value, Direction direction, bool smooth,
                         double rho, double lipschitz_m, SeparableProx prox)
    : name_(std::move(name)),
      value_(std::move(value)),
      direction_(std::move(direction)),
      smooth_(smooth),
      rho_(rho),
      lipschitz_m_(lipschitz_m),
      prox_(std::move(prox)) {
  if (!(rho_ >= 0.0)) throw DomainError("Regularizer: rho must be >= 0");
  if (!(lipschitz_m_ >= 0.0)) throw DomainError("Regularizer: M must be >= 0");
}

Regularizer Regularizer::squared_l2(std::optional<Point> center) {
  if (center) {
    Point c = *center;
    return Regularizer(
        "l2", [c](const Point& x) { return 0.5 * (x - c).squaredNorm(); },
        [c](const Point& x) -> Point { return x - c; }, true, 1.0, 1.0,
        [c](double v, Eigen::Index i, double t) { return (v + t * c(i)) / (1.0 + t); });
  }
  return Regularizer(
      "l2", [](const Point& x) { return 0.5 * x.squaredNorm(); },
      [](const Point& x) -> Point { return x; }, true, 1.0, 1.0,
      [](double v, Eigen::Index, double t) { return v / (1.0 + t); });
}

Regularizer Regularizer::l1() {
  return Regularizer(
      "l1", [](const Point& x) { return x.lpNorm<1>(); },
      [](const Point& x) -> Point {
        return x.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
      },
      false, 0.0, 0.0, [](double v, Eigen::Index, double t) {
        return v > t ? v - t : (v < -t ? v + t : 0.0);
      });
}

Regularizer Regularizer::zero() {
  return Regularizer(
      "zero", [](const Point&) { return 0.0; },
      [](const Point& x) -> Point { return Point::Zero(x.size()); }, true, 0.0, 0.0,
      [](double v, Eigen::Index, double) { return v; });
}

// ---------------------------------------------------------------------------

RegularizedMap::RegularizedMap(MonotoneMap base, Regularizer reg, double epsilon)
    : base_(std::move(base)), reg_(std::move(reg)), epsilon_(epsilon) {
  if (!(epsilon_ >= 0.0) || !std::isfinite(epsilon_)) {
    throw DomainError("RegularizedMap: epsilon must be finite and >= 0");
  }
}

Point RegularizedMap::operator()(const Point& x) const {
  Point t = base_(x);
  if (epsilon_ != 0.0) t += epsilon_ * reg_.direction(x);
  if (!t.allFinite()) throw DomainError("RegularizedMap: output contains NaN/Inf");
  return t;
}

double RegularizedMap::lipschitz() const {
  return base_.lipschitz() + epsilon_ * reg_.lipschitz_m();
}

double RegularizedMap::mu() const {
  return base_.mu() + (reg_.smooth() ? epsilon_ * reg_.rho() : 0.0);
}

Point evaluate_T(const RegularizedMap& map, const Point& x) { return map(x); }

RegularizedVI regularize(const VIProblem& problem, Regularizer reg, double epsilon) {
  if (problem.map.dimension() != problem.set.dimension()) {
    throw DimensionError("regularize: operator and set dimensions differ");
  }
  return RegularizedVI{RegularizedMap(problem.map, std::move(reg), epsilon), problem.set};
}

RegularizedVI unregularized(const VIProblem& problem) {
  return regularize(problem, Regularizer::zero(), 0.0);
}

// ---------------------------------------------------------------------------

PointSampler gaussian_sampler(Eigen::Index dimension, std::uint64_t seed, double scale,
                              std::optional<Point> center) {
  Point c = center ? *center : Point::Zero(dimension);
  return [dimension, seed, scale, c](std::uint64_t index) {
    auto gen = seeded_engine(seed, index);
    return Point(c + scale * gaussian_vector(gen, dimension));
  };
}

namespace {

template <typename Margin>
ProbeResult run_pairs(const PointSampler& sampler, int pairs, Margin&& margin) {
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 0; i < pairs; ++i) {
    const Point x = sampler(2 * static_cast<std::uint64_t>(i));
    const Point y = sampler(2 * static_cast<std::uint64_t>(i) + 1);
    worst = std::min(worst, margin(x, y));
  }
  return {worst, pairs};
}

}  // namespace

ProbeResult probe_monotonicity(const std::function<Point(const Point&)>& f, double mu,
                               const PointSampler& sampler, int pairs) {
  return run_pairs(sampler, pairs, [&](const Point& x, const Point& y) {
    const Point d = x - y;
    return (f(x) - f(y)).dot(d) - mu * d.squaredNorm();
  });
}

ProbeResult probe_lipschitz(const std::function<Point(const Point&)>& f, double lipschitz,
                            const PointSampler& sampler, int pairs) {
  return run_pairs(sampler, pairs, [&](const Point& x, const Point& y) {
    return lipschitz * (x - y).norm() - (f(x) - f(y)).norm();
  });
}

ProbeResult probe_regularizer(const Regularizer& reg, const PointSampler& sampler, int pairs) {
  return run_pairs(sampler, pairs, [&](const Point& x, const Point& y) {
    const double mid = 0.5 * reg.value(x) + 0.5 * reg.value(y) - reg.value(0.5 * (x + y));
    const double sub = reg.value(y) - reg.value(x) - reg.direction(x).dot(y - x);
    double margin = std::min(mid, sub);
    if (reg.smooth() && reg.rho() > 0.0) {
      const Point d = x - y;
      margin = std::min(margin,
                        (reg.direction(x) - reg.direction(y)).dot(d) - reg.rho() * d.squaredNorm());
    }
    return margin;
  });
}

}  // namespace vireg
