// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace vireg {

using Point = Eigen::VectorXd;

// Error types. Everything thrown by the library derives from vireg::Error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedSetError : public Error {
 public:
  using Error::Error;
};

/// Throws DimensionError unless x has `dim` entries, DomainError on NaN/Inf.
void require_point(const Point& x, Eigen::Index dim, const char* what);

bool all_finite(const Point& x);

enum class Monotonicity { monotone, strongly_monotone };

/// A single-valued operator F on R^n with declared Lipschitz constant and
/// monotonicity class. An optional adjoint Jacobian product y, v -> J_F(y)^T v
/// may be registered; callers fall back to finite differences otherwise.
class MonotoneMap {
 public:
  using Evaluator = std::function<Point(const Point&)>;
  using AdjointProduct = std::function<Point(const Point& y, const Point& v)>;

  MonotoneMap(Eigen::Index dimension, Evaluator evaluate, double lipschitz,
              Monotonicity monotonicity = Monotonicity::monotone, double mu = 0.0,
              AdjointProduct adjoint = {});

  Point operator()(const Point& x) const;

  Eigen::Index dimension() const { return dim_; }
  double lipschitz() const { return lipschitz_; }
  Monotonicity monotonicity() const { return monotonicity_; }
  /// Strong monotonicity modulus; zero for merely monotone maps.
  double mu() const { return mu_; }
  bool has_adjoint() const { return static_cast<bool>(adjoint_); }
  /// J_F(y)^T v. Only valid when has_adjoint().
  Point adjoint_product(const Point& y, const Point& v) const;

  static MonotoneMap zero(Eigen::Index dimension);
  /// F(x) = M x + q. Monotone iff the symmetric part of M is PSD; the caller
  /// supplies the classification through `mu`.
  static MonotoneMap affine(Eigen::MatrixXd m, Point q, double mu = 0.0);

 private:
  Eigen::Index dim_;
  Evaluator evaluate_;
  double lipschitz_;
  Monotonicity monotonicity_;
  double mu_;
  AdjointProduct adjoint_;
};

enum class SetKind { box, shifted_orthant, hyperplane_box, ball, product, intersection, custom };

std::string to_string(SetKind kind);

/// Closed convex set exposed through a projection oracle and a membership test.
///
/// Built-in kinds have exact closed-form projections. `product` stacks
/// coordinate blocks and projects blockwise. `intersection` has no embedded
/// projector: projecting it throws UnsupportedSetError unless one is registered.
class FeasibleSet {
 public:
  using Projector = std::function<Point(const Point&)>;
  using Membership = std::function<bool(const Point&, double)>;
  /// (v, i) -> prox of a convex psi_i on R evaluated at v.
  using ScalarProx = std::function<double(double v, Eigen::Index i)>;

  static FeasibleSet box(Point lower, Point upper);
  static FeasibleSet unit_box(Eigen::Index dimension);
  static FeasibleSet whole_space(Eigen::Index dimension);
  /// { x : x >= shift } componentwise.
  static FeasibleSet shifted_orthant(Point shift);
  /// { x : <normal, x> = rhs, lower <= x <= upper }.
  static FeasibleSet hyperplane_box(Point normal, double rhs, Point lower, Point upper);
  static FeasibleSet ball(Point center, double radius);
  /// Cartesian product; block i occupies the next parts[i].dimension() coordinates.
  static FeasibleSet product(std::vector<FeasibleSet> parts);
  static FeasibleSet intersection(std::vector<FeasibleSet> parts,
                                  std::optional<Projector> projector = std::nullopt);
  static FeasibleSet custom(Eigen::Index dimension, Projector projector, Membership contains,
                            std::string description = "custom");

  Eigen::Index dimension() const { return dim_; }
  SetKind kind() const { return kind_; }
  const std::string& description() const { return description_; }

  Point project(const Point& z) const;
  bool contains(const Point& x, double tol = 1e-10) const;

  /// Removes from v its components along the equality-constraint normals of
  /// the set; the result differs from v by an element of the normal cone at
  /// every point, and project(x - t v) is unchanged by the reduction.
  Point reduce_to_affine_hull(const Point& v) const;

  /// Optional axis-aligned bounding box (finite sets only; used by grid oracles).
  std::optional<std::pair<Point, Point>> bounds() const;

  /// argmin over x in the set of 0.5 ||x - z||^2 + sum_i psi_i(x_i), given the
  /// scalar proxes of psi_i. Available for boxes, orthants, hyperplane-boxes and
  /// products of those; nullopt otherwise.
  std::optional<Point> prox_separable(const Point& z, const ScalarProx& prox) const;
  bool supports_separable_prox() const { return static_cast<bool>(prox_); }

 private:
  FeasibleSet() = default;

  Eigen::Index dim_ = 0;
  SetKind kind_ = SetKind::custom;
  std::string description_;
  Projector project_;
  Membership contains_;
  std::function<Point(const Point&, const ScalarProx&)> prox_;
  // Unit normals of affine equality constraints (reduce_to_affine_hull).
  std::vector<Point> normals_;
  std::optional<std::pair<Point, Point>> bounds_;
};

/// Convex regularizer phi with value, gradient (smooth) or a deterministic
/// subgradient selection (nonsmooth).
class Regularizer {
 public:
  using Value = std::function<double(const Point&)>;
  using Direction = std::function<Point(const Point&)>;
  /// (v, i, t) -> prox of t * phi_i at v, for phi = sum_i phi_i(x_i).
  using SeparableProx = std::function<double(double v, Eigen::Index i, double t)>;

  Regularizer(std::string name, Value value, Direction direction, bool smooth, double rho,
              double lipschitz_m, SeparableProx prox = {});

  /// 0.5 * ||x - center||^2; rho = M = 1.
  static Regularizer squared_l2(std::optional<Point> center = std::nullopt);
  /// ||x||_1 with selection sign(x_i), zero at x_i = 0.
  static Regularizer l1();
  static Regularizer zero();

  double value(const Point& x) const { return value_(x); }
  /// Gradient in the smooth case, selected subgradient otherwise.
  Point direction(const Point& x) const { return direction_(x); }

  const std::string& name() const { return name_; }
  bool smooth() const { return smooth_; }
  double rho() const { return rho_; }
  double lipschitz_m() const { return lipschitz_m_; }
  bool separable() const { return static_cast<bool>(prox_); }
  double scalar_prox(double v, Eigen::Index i, double t) const { return prox_(v, i, t); }

 private:
  std::string name_;
  Value value_;
  Direction direction_;
  bool smooth_;
  double rho_;
  double lipschitz_m_;
  SeparableProx prox_;
};

/// T_eps = F + eps * (gradient or selected subgradient of phi).
class RegularizedMap {
 public:
  RegularizedMap(MonotoneMap base, Regularizer reg, double epsilon);

  Point operator()(const Point& x) const;

  const MonotoneMap& base() const { return base_; }
  const Regularizer& regularizer() const { return reg_; }
  double epsilon() const { return epsilon_; }
  Eigen::Index dimension() const { return base_.dimension(); }
  /// L + eps * M.
  double lipschitz() const;
  /// Declared strong monotonicity modulus mu_F + eps * rho.
  double mu() const;

 private:
  MonotoneMap base_;
  Regularizer reg_;
  double epsilon_;
};

Point evaluate_T(const RegularizedMap& map, const Point& x);

struct VIProblem {
  MonotoneMap map;
  FeasibleSet set;
};

/// A VI(T_eps, Omega) instance.
struct RegularizedVI {
  RegularizedMap op;
  FeasibleSet set;

  double epsilon() const { return op.epsilon(); }
  Eigen::Index dimension() const { return op.dimension(); }
};

RegularizedVI regularize(const VIProblem& problem, Regularizer reg, double epsilon);
/// VI(F, Omega) viewed as the eps = 0 member of the family.
RegularizedVI unregularized(const VIProblem& problem);

// Sampling probes for declared properties. Each returns the worst observed margin
// (negative means violated) over `pairs` seeded random pairs drawn from `sampler`.
struct ProbeResult {
  double worst_margin;
  int pairs;
  bool passed(double tol) const { return worst_margin >= -tol; }
};

using PointSampler = std::function<Point(std::uint64_t index)>;

/// <F(x)-F(y), x-y> - mu ||x-y||^2.
ProbeResult probe_monotonicity(const std::function<Point(const Point&)>& f, double mu,
                               const PointSampler& sampler, int pairs);
/// L ||x-y|| - ||F(x)-F(y)||.
ProbeResult probe_lipschitz(const std::function<Point(const Point&)>& f, double lipschitz,
                            const PointSampler& sampler, int pairs);
/// Midpoint convexity and subgradient inequality of phi.
ProbeResult probe_regularizer(const Regularizer& reg, const PointSampler& sampler, int pairs);

/// Gaussian sampler with seeded per-index streams: sample(i) is a pure function of (seed, i).
PointSampler gaussian_sampler(Eigen::Index dimension, std::uint64_t seed, double scale = 1.0,
                              std::optional<Point> center = std::nullopt);

}  // namespace vireg
