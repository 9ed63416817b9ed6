// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vireg/core.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace vireg {

/// Known solution set S0 of VI(F, Omega).
struct SolutionOracle {
  std::function<double(const Point&)> distance_to_S0;
  std::function<Point(const Point&)> project_to_S0;
  /// `count` seeded points of S0.
  std::function<std::vector<Point>(int count, std::uint64_t seed)> sample_S0;
};

/// Model / regularizer keys accepted by ProblemInstance::regularized_solution.
inline constexpr const char* kDirect = "direct";
inline constexpr const char* kDualGap = "dualgap";

struct ProblemInstance {
  std::string name;
  VIProblem problem;
  std::optional<SolutionOracle> oracle;
  /// Declared strong monotonicity modulus of F (0 when merely monotone).
  double mu = 0.0;
  /// Closed-form solution of the regularized model, where one is known:
  /// (model, regularizer name, eps) -> x_eps.
  std::function<std::optional<Point>(const std::string& model, const std::string& reg, double eps)>
      regularized_solution;

  /// Default initial point for runs.
  Point start;

  Eigen::Index dimension() const { return problem.map.dimension(); }
  double lipschitz() const { return problem.map.lipschitz(); }
};

/// F(x) = x - P_C(x), C = R^3_+ + (0, -1/4, 1/4), over
/// Omega = { x2 + x3 = -1, x1 <= 1 }. S0 = { (t, -3/4, -1/4) : t in [0, 1] }.
ProblemInstance example_5_1();

/// Initial point used for the tabulated runs.
Point example_5_1_start();

enum class SyntheticSet { box, shifted_orthant };

std::string to_string(SyntheticSet kind);

/// F(x) = M x + q with M = A^T A / (2n), A a seeded (2n x n) Gaussian matrix, over
/// [-1, 1]^n or { x >= -1 }. S0 = {x*} is computed once per (n, seed, set) by
/// projected gradient iteration and cached.
ProblemInstance affine_monotone(int n, std::uint64_t seed, SyntheticSet set = SyntheticSet::box);

/// F(x) = M x + q over `set`. When `solution` is given it is exposed as the
/// singleton S0.
ProblemInstance affine_instance(std::string name, Eigen::MatrixXd m, Point q, FeasibleSet set,
                                double mu = 0.0, std::optional<Point> solution = std::nullopt);

/// F(x) = kappa (x - center) over the box [lower, upper]; S0 = {P_box(center)}.
/// For center in the interior, G(x) = (kappa/4) ||x - center||^2 on the box.
ProblemInstance quadratic_bowl(Point center, double kappa, Point lower, Point upper);

/// F(x) = x on [-1, 1].
ProblemInstance segment_1d();

/// max over a uniform grid of Omega's bounding box (grid points outside Omega
/// skipped) of <T_eps(x), x - y> - (alpha/2) ||y - x||^2 (the mixed form of
/// theta_alpha when uses_mixed_form(vi)). Grid spacing is
/// `resolution` times the box diameter. Dimension <= 2 only.
double brute_force_gap(const RegularizedVI& vi, const Point& x, double alpha,
                       double resolution = 1e-3);

/// Names accepted by problem_by_name.
std::vector<std::string> builtin_problems();

/// "example5_1", "segment1d", "affine2_box", "affine2_orthant", "affine5_box".
/// Synthetic instances use `seed`.
ProblemInstance problem_by_name(const std::string& name, std::uint64_t seed = 0);

}  // namespace vireg
