// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "vireg/problems.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace vireg {

enum class Model { direct, dualgap };

std::string to_string(Model model);
Model parse_model(const std::string& text);

/// "l1" or "l2"; throws DomainError otherwise.
Regularizer regularizer_by_name(const std::string& name);

struct ExperimentConfig {
  std::string problem = "example5_1";
  /// JSON problem description; replaces `problem` when non-empty.
  std::string spec_path;
  std::vector<Model> models{Model::dualgap};
  std::vector<std::string> regularizers{"l2"};
  std::vector<double> epsilons;
  /// Initial point; the problem's default start when absent.
  std::optional<Point> x0;
  /// Certified distance to x_eps for the direct model.
  double tau = 1e-6;
  /// Exactness threshold on G(x).
  double tol = 1e-11;
  /// Iteration budget override (0 keeps solver defaults).
  long max_iter = 0;
  std::uint64_t seed = 0;
  /// Allow the direct model with a nonsmooth regularizer.
  bool experimental = false;
  /// Measure wall time; when false the column is written as 0 so that output
  /// depends on (config, seed) only.
  bool timing = false;

  /// Throws DomainError describing the first offending field.
  void validate() const;
};

struct ResultRow {
  std::string problem;
  std::string model;
  std::string regularizer;
  double epsilon = 0.0;
  long iterations = 0;
  double wall_time_s = 0.0;
  std::optional<double> dist_to_reg_solution;
  std::optional<double> dist_to_S0;
  std::optional<double> final_gap;
  /// exact / not_exact / inconclusive, or "error" when the cell failed.
  std::string exactness;
  std::string error;

  bool operator==(const ResultRow&) const = default;
};

/// Problem description file (JSON):
///   { "name": ..., "operator": {"type": "affine", "M": [[...]], "q": [...], "mu": 0}
///                           | {"type": "builtin", "name": "example5_1"},
///     "set": {"type": "box", "lower": [...], "upper": [...]}
///          | {"type": "shifted_orthant", "shift": [...]}
///          | {"type": "hyperplane_box", "normal": [...], "rhs": r, "lower": [...], "upper": [...]}
///          | {"type": "ball", "center": [...], "radius": r}
///          | {"type": "product", "parts": [set, ...]},
///     "lipschitz": L (optional override), "start": [...], "solution": [...] }
/// Infinite bounds are written as "inf" / "-inf".
ProblemInstance parse_problem_spec(const std::string& text, const std::string& origin = "problem description");
ProblemInstance load_problem_spec(const std::string& path);

ProblemInstance resolve_problem(const ExperimentConfig& cfg);

/// One row per (model, regularizer, eps) in configuration order. Cell failures
/// are recorded in the row.
std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg);

/// The 20-cell comparison on Example 5.1 from (1, -2, 1), rows ordered by
/// model (dualgap, direct), regularizer (l1, l2) and decreasing eps.
ExperimentConfig table1_config();
std::vector<ResultRow> table1(bool timing = false);

/// Shortest decimal text that parses back to the same double.
std::string format_number(double v);

extern const char* const kCsvHeader;

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_csv(std::istream& is);
void write_json(std::ostream& os, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_json(std::istream& is);

}  // namespace vireg
