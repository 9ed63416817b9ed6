// SPDX-License-Identifier: Apache-2.0
#include "vireg/problems.hpp"

#include "vireg/gap.hpp"
#include "vireg/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <tuple>

namespace vireg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Point vec3(double a, double b, double c) {
  Point v(3);
  v << a, b, c;
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

Point example_5_1_start() { return vec3(1.0, -2.0, 1.0); }

ProblemInstance example_5_1() {
  const Point c = vec3(0.0, -0.25, 0.25);
  // x - max(x, c) = min(x - c, 0)
  auto f = [c](const Point& x) -> Point { return (x - c).cwiseMin(0.0); };
  auto adjoint = [c](const Point& y, const Point& v) -> Point {
    Point out(3);
    for (Eigen::Index i = 0; i < 3; ++i) out(i) = y(i) < c(i) ? v(i) : 0.0;
    return out;
  };
  MonotoneMap map(3, f, 2.0, Monotonicity::monotone, 0.0, adjoint);
  FeasibleSet set = FeasibleSet::hyperplane_box(vec3(0.0, 1.0, 1.0), -1.0, vec3(-kInf, -kInf, -kInf),
                                                vec3(1.0, kInf, kInf));

  SolutionOracle oracle;
  oracle.project_to_S0 = [](const Point& x) {
    require_point(x, 3, "example_5_1: project_to_S0");
    return vec3(std::clamp(x(0), 0.0, 1.0), -0.75, -0.25);
  };
  oracle.distance_to_S0 = [proj = oracle.project_to_S0](const Point& x) {
    return (x - proj(x)).norm();
  };
  oracle.sample_S0 = [](int count, std::uint64_t seed) {
    std::vector<Point> out;
    auto gen = seeded_engine(seed, 51);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < count; ++i) {
      double t = unit(gen);
      if (i == 0) t = 0.0;
      if (i == 1) t = 1.0;
      out.push_back(vec3(t, -0.75, -0.25));
    }
    return out;
  };

  ProblemInstance inst{"example5_1", VIProblem{std::move(map), std::move(set)}, oracle, 0.0, {}, {}};
  inst.regularized_solution = [](const std::string& model, const std::string& reg,
                                 double eps) -> std::optional<Point> {
    if (!(eps > 0.0)) return std::nullopt;
    if (reg == "l1") return vec3(0.0, -0.75, -0.25);
    if (reg != "l2") return std::nullopt;
    // S_eps lies on (0, -3/4 + s, -1/4 - s), s > 0.
    double s;
    if (model == kDirect) s = eps / (4.0 * (1.0 + eps));
    else if (model == kDualGap) s = eps / (2.0 * (1.0 + 2.0 * eps));
    else return std::nullopt;
    return vec3(0.0, -0.75 + s, -0.25 - s);
  };
  inst.start = example_5_1_start();
  return inst;
}

// ---------------------------------------------------------------------------

std::string to_string(SyntheticSet kind) {
  return kind == SyntheticSet::box ? "box" : "shifted_orthant";
}

ProblemInstance affine_instance(std::string name, Eigen::MatrixXd m, Point q, FeasibleSet set,
                                double mu, std::optional<Point> solution) {
  if (m.rows() != set.dimension()) throw DimensionError("affine_instance: M and set dimensions differ");
  MonotoneMap map = MonotoneMap::affine(std::move(m), std::move(q), mu);
  ProblemInstance inst{std::move(name), VIProblem{std::move(map), std::move(set)}, std::nullopt, mu,
                       {}, {}};
  inst.start = inst.problem.set.project(Point::Zero(inst.dimension()));
  if (solution) {
    const Point xs = *solution;
    SolutionOracle oracle;
    oracle.project_to_S0 = [xs](const Point&) { return xs; };
    oracle.distance_to_S0 = [xs](const Point& x) { return (x - xs).norm(); };
    oracle.sample_S0 = [xs](int count, std::uint64_t) { return std::vector<Point>(count, xs); };
    inst.oracle = oracle;
  }
  return inst;
}

namespace {

// Projected gradient on x^T M x / 2 + q^T x (M symmetric PD), step 1/L.
Point solve_symmetric_affine(const Eigen::MatrixXd& m, const Point& q, const FeasibleSet& set,
                             double lmax) {
  Point x = set.project(Point::Zero(q.size()));
  for (long it = 0; it < 5'000'000; ++it) {
    const Point xn = set.project(x - (m * x + q) / lmax);
    const double moved = (xn - x).norm();
    x = xn;
    if (moved <= 1e-17 * (1.0 + x.norm())) break;
  }
  return x;
}

struct AffineData {
  Eigen::MatrixXd m;
  Point q;
  double mu;
  double L;
  Point solution;
};

std::mutex cache_mutex;
std::map<std::tuple<int, std::uint64_t, int>, AffineData> cache;

FeasibleSet synthetic_set(int n, SyntheticSet kind) {
  if (kind == SyntheticSet::box) return FeasibleSet::box(Point::Constant(n, -1.0), Point::Constant(n, 1.0));
  return FeasibleSet::shifted_orthant(Point::Constant(n, -1.0));
}

}  // namespace

ProblemInstance affine_monotone(int n, std::uint64_t seed, SyntheticSet kind) {
  if (n < 1) throw DomainError("affine_monotone: n must be >= 1");
  FeasibleSet set = synthetic_set(n, kind);
  const auto key = std::make_tuple(n, seed, static_cast<int>(kind));
  AffineData data;
  {
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = cache.find(key);
    if (it != cache.end()) {
      data = it->second;
    } else {
      auto gen = seeded_engine(seed, 0xaff1);
      Eigen::MatrixXd a(2 * n, n);
      for (int j = 0; j < n; ++j) a.col(j) = gaussian_vector(gen, 2 * n);
      data.m = a.transpose() * a / (2.0 * n);
      data.q = gaussian_vector(gen, n);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(data.m);
      data.mu = eig.eigenvalues().minCoeff();
      data.L = eig.eigenvalues().maxCoeff();
      data.solution = solve_symmetric_affine(data.m, data.q, set, data.L);
      cache.emplace(key, data);
    }
  }
  return affine_instance("affine" + std::to_string(n) + "_" + to_string(kind), data.m, data.q,
                         std::move(set), data.mu, data.solution);
}

ProblemInstance quadratic_bowl(Point center, double kappa, Point lower, Point upper) {
  if (!(kappa > 0.0)) throw DomainError("quadratic_bowl: kappa must be positive");
  const Eigen::Index n = center.size();
  const Point c = center;
  MonotoneMap map(
      n, [c, kappa](const Point& x) -> Point { return kappa * (x - c); }, kappa,
      Monotonicity::strongly_monotone, kappa,
      [kappa](const Point&, const Point& v) -> Point { return kappa * v; });
  FeasibleSet set = FeasibleSet::box(lower, upper);
  const Point xs = set.project(c);
  ProblemInstance inst{"quadratic_bowl", VIProblem{std::move(map), set}, std::nullopt, kappa, {}, {}};
  inst.start = upper;
  SolutionOracle oracle;
  oracle.project_to_S0 = [xs](const Point&) { return xs; };
  oracle.distance_to_S0 = [xs](const Point& x) { return (x - xs).norm(); };
  oracle.sample_S0 = [xs](int count, std::uint64_t) { return std::vector<Point>(count, xs); };
  inst.oracle = oracle;
  const bool interior = ((c.array() > lower.array()) && (c.array() < upper.array())).all();
  const bool zero_inside = ((lower.array() <= 0.0) && (upper.array() >= 0.0)).all();
  inst.regularized_solution = [set, c, kappa, interior, zero_inside](
                                  const std::string& model, const std::string& reg,
                                  double eps) -> std::optional<Point> {
    if (reg != "l2" || !(eps >= 0.0)) return std::nullopt;
    if (model == kDirect) return set.project(kappa * c / (kappa + eps));
    if (model == kDualGap && interior && zero_inside) return Point(kappa * c / (kappa + 2.0 * eps));
    return std::nullopt;
  };
  return inst;
}

ProblemInstance segment_1d() {
  ProblemInstance inst = quadratic_bowl(Point::Zero(1), 1.0, Point::Constant(1, -1.0),
                                        Point::Constant(1, 1.0));
  inst.name = "segment1d";
  return inst;
}

// ---------------------------------------------------------------------------

double brute_force_gap(const RegularizedVI& vi, const Point& x, double alpha, double resolution) {
  const Eigen::Index n = vi.dimension();
  if (n > 2) throw DimensionError("brute_force_gap: dimension must be <= 2");
  if (!(alpha > 0.0)) throw DomainError("brute_force_gap: alpha must be positive");
  if (!(resolution > 0.0 && resolution < 1.0)) {
    throw DomainError("brute_force_gap: resolution must lie in (0, 1)");
  }
  const auto box = vi.set.bounds();
  if (!box) throw UnsupportedSetError("brute_force_gap: set has no bounding box");
  require_point(x, n, "brute_force_gap");
  const bool mixed = uses_mixed_form(vi);
  const Point t = mixed ? vi.op.base()(x) : vi.op(x);
  const double phi_x = mixed ? vi.op.regularizer().value(x) : 0.0;
  const Point& lo = box->first;
  const Point& hi = box->second;
  const double h = resolution * (hi - lo).norm();
  std::vector<long> counts(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    counts[static_cast<std::size_t>(i)] = static_cast<long>(std::ceil((hi(i) - lo(i)) / h)) + 1;
  }
  double best = -kInf;
  Point y(n);
  const long total = n == 1 ? counts[0] : counts[0] * counts[1];
  for (long k = 0; k < total; ++k) {
    long rem = k;
    for (Eigen::Index i = 0; i < n; ++i) {
      const long ci = counts[static_cast<std::size_t>(i)];
      const long idx = rem % ci;
      rem /= ci;
      y(i) = std::min(lo(i) + static_cast<double>(idx) * h, hi(i));
    }
    if (!vi.set.contains(y, 1e-12)) continue;
    const Point r = x - y;
    double v = t.dot(r) - 0.5 * alpha * r.squaredNorm();
    if (mixed) v += vi.epsilon() * (phi_x - vi.op.regularizer().value(y));
    best = std::max(best, v);
  }
  return best;
}

// ---------------------------------------------------------------------------

std::vector<std::string> builtin_problems() {
  return {"example5_1", "segment1d", "affine2_box", "affine2_orthant", "affine5_box"};
}

ProblemInstance problem_by_name(const std::string& name, std::uint64_t seed) {
  if (name == "example5_1") return example_5_1();
  if (name == "segment1d") return segment_1d();
  if (name == "affine2_box") return affine_monotone(2, seed, SyntheticSet::box);
  if (name == "affine2_orthant") return affine_monotone(2, seed, SyntheticSet::shifted_orthant);
  if (name == "affine5_box") return affine_monotone(5, seed, SyntheticSet::box);
  std::string known;
  for (const auto& n : builtin_problems()) known += (known.empty() ? "" : ", ") + n;
  throw DomainError("unknown problem '" + name + "' (available: " + known + ")");
}

}  // namespace vireg
