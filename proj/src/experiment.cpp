// SPDX-License-Identifier: Apache-2.0
#include "vireg/experiment.hpp"

#include "vireg/bounds.hpp"
#include "vireg/solvers.hpp"

#include "json.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace vireg {

using nlohmann::json;

std::string to_string(Model model) { return model == Model::direct ? kDirect : kDualGap; }

Model parse_model(const std::string& text) {
  if (text == kDirect) return Model::direct;
  if (text == kDualGap) return Model::dualgap;
  throw DomainError("unknown model '" + text + "' (expected direct or dualgap)");
}

Regularizer regularizer_by_name(const std::string& name) {
  if (name == "l1") return Regularizer::l1();
  if (name == "l2") return Regularizer::squared_l2();
  throw DomainError("unknown regularizer '" + name + "' (expected l1 or l2)");
}

void ExperimentConfig::validate() const {
  if (models.empty()) throw DomainError("config: model list is empty");
  if (regularizers.empty()) throw DomainError("config: regularizer list is empty");
  if (epsilons.empty()) throw DomainError("config: epsilon list is empty");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || !std::isfinite(epsilons[i])) {
      throw DomainError("config: eps[" + std::to_string(i) + "] must be positive and finite");
    }
  }
  for (const auto& r : regularizers) regularizer_by_name(r);
  for (Model m : models) {
    for (const auto& r : regularizers) {
      if (m == Model::direct && !regularizer_by_name(r).smooth() && !experimental) {
        throw DomainError("config: model direct with regularizer " + r +
                          " has no convergence theory; pass --experimental to run it");
      }
    }
  }
  if (!(tau > 0.0)) throw DomainError("config: tau must be positive");
  if (!(tol > 0.0)) throw DomainError("config: tol must be positive");
  if (max_iter < 0) throw DomainError("config: max-iter must be >= 0");
}

// ---------------------------------------------------------------------------
// Problem description files.

namespace {

struct SpecReader {
  std::string origin;

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    throw DomainError(origin + ": " + path + ": " + what);
  }

  const json& field(const json& obj, const std::string& path, const char* key) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path, std::string("missing field '") + key + "'");
    return *it;
  }

  double number(const json& v, const std::string& path) const {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
      if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    fail(path, "expected a number");
  }

  Point vector(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty array of numbers");
    Point p(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      p(static_cast<Eigen::Index>(i)) = number(v[i], path + "[" + std::to_string(i) + "]");
    }
    return p;
  }

  Eigen::MatrixXd matrix(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected an array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(v.size());
    Eigen::MatrixXd m;
    for (Eigen::Index i = 0; i < rows; ++i) {
      const std::string rp = path + "[" + std::to_string(i) + "]";
      const Point row = vector(v[static_cast<std::size_t>(i)], rp);
      if (i == 0) m.resize(rows, row.size());
      else if (row.size() != m.cols()) fail(rp, "row length differs from row 0");
      m.row(i) = row.transpose();
    }
    return m;
  }

  FeasibleSet set(const json& v, const std::string& path) const {
    const std::string type = field(v, path, "type").is_string()
                                 ? field(v, path, "type").get<std::string>()
                                 : std::string();
    try {
      if (type == "box") {
        return FeasibleSet::box(vector(field(v, path, "lower"), path + ".lower"),
                                vector(field(v, path, "upper"), path + ".upper"));
      }
      if (type == "shifted_orthant") {
        return FeasibleSet::shifted_orthant(vector(field(v, path, "shift"), path + ".shift"));
      }
      if (type == "hyperplane_box") {
        return FeasibleSet::hyperplane_box(vector(field(v, path, "normal"), path + ".normal"),
                                           number(field(v, path, "rhs"), path + ".rhs"),
                                           vector(field(v, path, "lower"), path + ".lower"),
                                           vector(field(v, path, "upper"), path + ".upper"));
      }
      if (type == "ball") {
        return FeasibleSet::ball(vector(field(v, path, "center"), path + ".center"),
                                 number(field(v, path, "radius"), path + ".radius"));
      }
      if (type == "product") {
        const json& parts = field(v, path, "parts");
        if (!parts.is_array() || parts.empty()) fail(path + ".parts", "expected a non-empty array");
        std::vector<FeasibleSet> sets;
        for (std::size_t i = 0; i < parts.size(); ++i) {
          sets.push_back(set(parts[i], path + ".parts[" + std::to_string(i) + "]"));
        }
        return FeasibleSet::product(std::move(sets));
      }
    } catch (const DomainError& e) {
      if (std::string(e.what()).rfind(origin, 0) == 0) throw;
      fail(path, e.what());
    } catch (const DimensionError& e) {
      fail(path, e.what());
    }
    fail(path + ".type", "unknown set type '" + type +
                             "' (box, shifted_orthant, hyperplane_box, ball, product)");
  }
};

}  // namespace

ProblemInstance parse_problem_spec(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DomainError(origin + ": " + e.what());
  }
  const SpecReader rd{origin};
  const json& op = rd.field(doc, "$", "operator");
  const json& type = rd.field(op, "operator", "type");
  if (!type.is_string()) rd.fail("operator.type", "expected a string");

  std::optional<ProblemInstance> inst;
  if (type == "builtin") {
    const json& name = rd.field(op, "operator", "name");
    if (!name.is_string()) rd.fail("operator.name", "expected a string");
    try {
      inst = problem_by_name(name.get<std::string>());
    } catch (const DomainError& e) {
      rd.fail("operator.name", e.what());
    }
    if (doc.contains("set")) rd.fail("set", "builtin problems carry their own set");
  } else if (type == "affine") {
    const Eigen::MatrixXd m = rd.matrix(rd.field(op, "operator", "M"), "operator.M");
    const Point q = rd.vector(rd.field(op, "operator", "q"), "operator.q");
    if (m.rows() != m.cols()) rd.fail("operator.M", "must be square");
    if (q.size() != m.rows()) rd.fail("operator.q", "length differs from M");
    const double mu = op.contains("mu") ? rd.number(op["mu"], "operator.mu") : 0.0;
    FeasibleSet set = rd.set(rd.field(doc, "$", "set"), "set");
    if (set.dimension() != m.rows()) rd.fail("set", "dimension differs from operator");
    std::optional<Point> solution;
    if (doc.contains("solution")) {
      solution = rd.vector(doc["solution"], "solution");
      if (solution->size() != m.rows()) rd.fail("solution", "dimension differs from operator");
    }
    const std::string name = doc.contains("name") && doc["name"].is_string()
                                 ? doc["name"].get<std::string>()
                                 : std::string("custom");
    try {
      inst = affine_instance(name, m, q, std::move(set), mu, solution);
    } catch (const Error& e) {
      rd.fail("operator", e.what());
    }
  } else {
    rd.fail("operator.type", "unknown operator type (affine, builtin)");
  }

  if (doc.contains("lipschitz")) {
    const double L = rd.number(doc["lipschitz"], "lipschitz");
    if (!(L >= 0.0) || !std::isfinite(L)) rd.fail("lipschitz", "must be finite and >= 0");
    const MonotoneMap& old = inst->problem.map;
    inst->problem.map = MonotoneMap(
        old.dimension(), [old](const Point& x) { return old(x); }, L, old.monotonicity(), old.mu(),
        old.has_adjoint() ? MonotoneMap::AdjointProduct(
                                [old](const Point& y, const Point& v) { return old.adjoint_product(y, v); })
                          : MonotoneMap::AdjointProduct());
  }
  if (doc.contains("start")) {
    inst->start = rd.vector(doc["start"], "start");
    if (inst->start.size() != inst->dimension()) rd.fail("start", "dimension differs from operator");
  }
  return *inst;
}

ProblemInstance load_problem_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open problem description '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_problem_spec(buf.str(), path);
}

ProblemInstance resolve_problem(const ExperimentConfig& cfg) {
  if (!cfg.spec_path.empty()) return load_problem_spec(cfg.spec_path);
  return problem_by_name(cfg.problem, cfg.seed);
}

// ---------------------------------------------------------------------------

namespace {

DualGapConfig dual_config(const ExperimentConfig& cfg) {
  DualGapConfig d;
  d.seed = cfg.seed;
  return d;
}

struct CellOutcome {
  Point x;
  long iterations;
};

CellOutcome run_direct(const ProblemInstance& inst, const Regularizer& reg, double eps,
                       const Point& x0, const ExperimentConfig& cfg) {
  if (reg.smooth() && reg.rho() > 0.0) {
    OuterConfig oc = OuterConfig::down_to(eps, 0.5, 0.5, cfg.tau);
    oc.seed = cfg.seed;
    oc.keep_inner_trace = false;
    if (cfg.max_iter > 0) oc.max_inner_iterations = cfg.max_iter;
    const SequentialResult r = sequential_inexact_descent(inst.problem, reg, x0, oc);
    return {r.x_final, r.total_inner_iterations};
  }
  // Nonsmooth phi: single eps, stagnation-based stopping.
  const RegularizedVI vi = regularize(inst.problem, reg, eps);
  const double L_theta = estimate_L_theta(vi, x0, 1.0, 2.0, 200, cfg.seed);
  InnerConfig ic = make_inner_config(L_theta, std::max(vi.op.mu(), eps));
  ic.experimental_nonsmooth = true;
  ic.keep_trace = false;
  ic.max_iterations = cfg.max_iter > 0 ? cfg.max_iter : 100'000;
  const InnerResult r = solve_inner(vi, x0, cfg.tau, ic);
  return {r.x, r.iterations};
}

CellOutcome run_dualgap(const ProblemInstance& inst, const Regularizer& reg, double eps,
                        const Point& x0, const ExperimentConfig& cfg) {
  PgeConfig pc;
  pc.dual = dual_config(cfg);
  pc.keep_trace = false;
  if (cfg.max_iter > 0) pc.max_iterations = static_cast<int>(cfg.max_iter);
  const PgeResult r = solve_pge(inst.problem, reg, eps, x0, pc);
  return {r.x, r.iterations};
}

}  // namespace

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const ProblemInstance inst = resolve_problem(cfg);
  const Point x0 = cfg.x0 ? *cfg.x0 : inst.start;
  require_point(x0, inst.dimension(), "run_experiment: initial point");

  std::vector<ResultRow> rows;
  for (Model model : cfg.models) {
    for (const std::string& rname : cfg.regularizers) {
      const Regularizer reg = regularizer_by_name(rname);
      for (double eps : cfg.epsilons) {
        ResultRow row;
        row.problem = inst.name;
        row.model = to_string(model);
        row.regularizer = rname;
        row.epsilon = eps;
        const auto start = std::chrono::steady_clock::now();
        try {
          const CellOutcome out = model == Model::direct ? run_direct(inst, reg, eps, x0, cfg)
                                                         : run_dualgap(inst, reg, eps, x0, cfg);
          row.iterations = out.iterations;
          const ExactnessReport rep = exactness_check(inst.problem, out.x, cfg.tol, dual_config(cfg));
          row.final_gap = rep.dual_gap;
          row.exactness = to_string(rep.verdict);
          if (inst.oracle) row.dist_to_S0 = inst.oracle->distance_to_S0(out.x);
          if (inst.regularized_solution) {
            if (auto ref = inst.regularized_solution(row.model, rname, eps)) {
              row.dist_to_reg_solution = (out.x - *ref).norm();
            }
          }
        } catch (const std::exception& e) {
          row.exactness = "error";
          row.error = e.what();
        }
        if (cfg.timing) {
          row.wall_time_s =
              std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        }
        rows.push_back(std::move(row));
      }
    }
  }
  return rows;
}

ExperimentConfig table1_config() {
  ExperimentConfig cfg;
  cfg.problem = "example5_1";
  cfg.models = {Model::dualgap, Model::direct};
  cfg.regularizers = {"l1", "l2"};
  cfg.epsilons = {0.5, 0.1, 0.01, 0.005, 1e-4};
  cfg.experimental = true;
  cfg.x0 = example_5_1_start();
  return cfg;
}

std::vector<ResultRow> table1(bool timing) {
  ExperimentConfig cfg = table1_config();
  cfg.timing = timing;
  return run_experiment(cfg);
}

// ---------------------------------------------------------------------------
// Serialization.

const char* const kCsvHeader =
    "problem,model,regularizer,epsilon,iterations,wall_time_s,dist_to_reg_solution,dist_to_S0,"
    "final_gap,exactness";

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_number(const std::string& s, const std::string& where) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw DomainError("cannot parse number '" + s + "' in " + where);
  }
  return v;
}

std::string csv_text(const std::string& s) {
  std::string out = s;
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return out;
}

std::string optional_text(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

json json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_number(v.get<std::string>(), where);
  throw DomainError("expected a number in " + where);
}

std::optional<double> optional_from_json(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  return number_from_json(*it, key);
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    os << csv_text(r.problem) << ',' << r.model << ',' << r.regularizer << ','
       << format_number(r.epsilon) << ',' << r.iterations << ',' << format_number(r.wall_time_s)
       << ',' << optional_text(r.dist_to_reg_solution) << ',' << optional_text(r.dist_to_S0) << ','
       << optional_text(r.final_gap) << ',' << r.exactness << '\n';
  }
}

std::vector<ResultRow> read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader) {
    throw DomainError("read_csv: missing or unexpected header");
  }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    const std::string where = "line " + std::to_string(lineno);
    if (f.size() != 10) throw DomainError("read_csv: expected 10 fields on " + where);
    ResultRow r;
    r.problem = f[0];
    r.model = f[1];
    r.regularizer = f[2];
    r.epsilon = parse_number(f[3], where);
    r.iterations = static_cast<long>(parse_number(f[4], where));
    r.wall_time_s = parse_number(f[5], where);
    if (!f[6].empty()) r.dist_to_reg_solution = parse_number(f[6], where);
    if (!f[7].empty()) r.dist_to_S0 = parse_number(f[7], where);
    if (!f[8].empty()) r.final_gap = parse_number(f[8], where);
    r.exactness = f[9];
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_json(std::ostream& os, const std::vector<ResultRow>& rows) {
  json arr = json::array();
  for (const ResultRow& r : rows) {
    json o;
    o["problem"] = r.problem;
    o["model"] = r.model;
    o["regularizer"] = r.regularizer;
    o["epsilon"] = json_number(r.epsilon);
    o["iterations"] = r.iterations;
    o["wall_time_s"] = json_number(r.wall_time_s);
    o["dist_to_reg_solution"] = r.dist_to_reg_solution ? json_number(*r.dist_to_reg_solution) : json();
    o["dist_to_S0"] = r.dist_to_S0 ? json_number(*r.dist_to_S0) : json();
    o["final_gap"] = r.final_gap ? json_number(*r.final_gap) : json();
    o["exactness"] = r.exactness;
    if (!r.error.empty()) o["error"] = r.error;
    arr.push_back(std::move(o));
  }
  os << json{{"rows", arr}}.dump(2) << '\n';
}

std::vector<ResultRow> read_json(std::istream& is) {
  json doc;
  try {
    doc = json::parse(is);
  } catch (const json::parse_error& e) {
    throw DomainError(std::string("read_json: ") + e.what());
  }
  std::vector<ResultRow> rows;
  for (const json& o : doc.at("rows")) {
    ResultRow r;
    r.problem = o.at("problem").get<std::string>();
    r.model = o.at("model").get<std::string>();
    r.regularizer = o.at("regularizer").get<std::string>();
    r.epsilon = number_from_json(o.at("epsilon"), "epsilon");
    r.iterations = o.at("iterations").get<long>();
    r.wall_time_s = number_from_json(o.at("wall_time_s"), "wall_time_s");
    r.dist_to_reg_solution = optional_from_json(o, "dist_to_reg_solution");
    r.dist_to_S0 = optional_from_json(o, "dist_to_S0");
    r.final_gap = optional_from_json(o, "final_gap");
    r.exactness = o.at("exactness").get<std::string>();
    if (o.contains("error")) r.error = o["error"].get<std::string>();
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace vireg
