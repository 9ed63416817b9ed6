// SPDX-License-Identifier: Apache-2.0
#include "vireg/checks.hpp"

#include "vireg/bounds.hpp"
#include "vireg/experiment.hpp"
#include "vireg/gap.hpp"
#include "vireg/problems.hpp"
#include "vireg/rng.hpp"
#include "vireg/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>

namespace vireg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

class Collector {
 public:
  explicit Collector(CheckReport& r) : report_(r) {}

  // Records min over samples of `margin`; passes when the minimum is >= 0.
  void add(const std::string& name, double worst, int samples) {
    report_.properties.push_back({name, worst >= 0.0, worst, samples});
  }

 private:
  CheckReport& report_;
};

Point vec3(double a, double b, double c) {
  Point v(3);
  v << a, b, c;
  return v;
}

void core_geometry(CheckReport& rep) {
  Collector out(rep);
  const std::uint64_t seed = rep.seed;
  const double tol = 1e-10;
  struct Named {
    std::string name;
    FeasibleSet set;
  };
  std::vector<Named> sets{
      {"box", FeasibleSet::box(Point::Constant(3, -1.0), Point::Constant(3, 1.0))},
      {"shifted_orthant", FeasibleSet::shifted_orthant(vec3(0.0, -0.25, 0.25))},
      {"hyperplane_box", example_5_1().problem.set},
      {"ball", FeasibleSet::ball(vec3(0.5, 0.0, -0.5), 0.75)},
      {"product", FeasibleSet::product({FeasibleSet::box(Point::Zero(1), Point::Ones(1)),
                                        FeasibleSet::ball(Point::Zero(2), 1.0)})},
  };
  for (const auto& [name, set] : sets) {
    const PointSampler sample = gaussian_sampler(set.dimension(), seed, 2.0);
    double idem = kInf, nonexp = kInf, member = kInf;
    const int pairs = 1000;
    for (int i = 0; i < pairs; ++i) {
      const Point z = sample(2 * static_cast<std::uint64_t>(i));
      const Point w = sample(2 * static_cast<std::uint64_t>(i) + 1);
      const Point pz = set.project(z), pw = set.project(w);
      idem = std::min(idem, tol - (set.project(pz) - pz).norm());
      nonexp = std::min(nonexp, (z - w).norm() + tol - (pz - pw).norm());
      member = std::min(member, set.contains(pz, tol) ? 0.0 : -1.0);
    }
    out.add("projection idempotence: " + name, idem, pairs);
    out.add("projection nonexpansive: " + name, nonexp, pairs);
    out.add("projection lands in set: " + name, member, pairs);
  }

  const ProblemInstance ex = example_5_1();
  const PointSampler s3 = gaussian_sampler(3, seed + 1, 1.0);
  const ProbeResult mono = probe_monotonicity([&](const Point& x) { return ex.problem.map(x); }, 0.0,
                                              s3, 1000);
  out.add("example5_1 F monotone", mono.worst_margin + 1e-12, mono.pairs);
  const ProbeResult lip =
      probe_lipschitz([&](const Point& x) { return ex.problem.map(x); }, 2.0 + 1e-9, s3, 1000);
  out.add("example5_1 F Lipschitz 2", lip.worst_margin, lip.pairs);
  for (const char* r : {"l1", "l2"}) {
    const ProbeResult pr = probe_regularizer(regularizer_by_name(r), s3, 1000);
    out.add(std::string("regularizer convexity and subgradient: ") + r, pr.worst_margin + 1e-12,
            pr.pairs);
  }
  for (double eps : {0.5, 0.01}) {
    const RegularizedVI vi = regularize(ex.problem, Regularizer::squared_l2(), eps);
    const ProbeResult sm =
        probe_monotonicity([&](const Point& x) { return vi.op(x); }, eps, s3, 1000);
    out.add("T_eps strongly monotone eps=" + format_number(eps), sm.worst_margin + 1e-12, sm.pairs);
  }
}

void gap_oracle(CheckReport& rep) {
  Collector out(rep);
  const std::uint64_t seed = rep.seed;
  const ProblemInstance ex = example_5_1();
  {
    double worst = kInf;
    const PointSampler s = gaussian_sampler(3, seed, 2.0);
    int n = 0;
    for (const char* r : {"l1", "l2"}) {
      for (double eps : {0.0, 0.1, 0.5}) {
        const RegularizedVI vi = regularize(ex.problem, regularizer_by_name(r), eps);
        for (int i = 0; i < 2000; ++i, ++n) {
          worst = std::min(worst, theta_ab(vi, s(static_cast<std::uint64_t>(n)), 1.0, 2.0).value + 1e-12);
        }
      }
    }
    out.add("theta_ab >= -1e-12 on R^n", worst, n);
  }
  {
    const RegularizedVI vi = unregularized(ex.problem);
    double theta = kInf, gap = kInf;
    const auto pts = ex.oracle->sample_S0(100, seed);
    for (const Point& x : pts) {
      theta = std::min(theta, 1e-10 - theta_ab(vi, x, 1.0, 2.0).value);
      gap = std::min(gap, 1e-6 - dual_gap(ex.problem, x).value);
    }
    out.add("theta_ab <= 1e-10 on S0 samples", theta, static_cast<int>(pts.size()));
    out.add("G <= 1e-6 on S0 samples", gap, static_cast<int>(pts.size()));
  }
  {
    auto gen = seeded_engine(seed, 7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const ProblemInstance seg = segment_1d();
    const ProblemInstance aff = affine_monotone(2, seed, SyntheticSet::box);
    const double res = 2e-3;
    double worst = kInf;
    int n = 0;
    for (const ProblemInstance* inst : {&seg, &aff}) {
      const auto box = inst->problem.set.bounds();
      const double h = res * (box->second - box->first).norm();
      for (int i = 0; i < 25; ++i, ++n) {
        const Point x = uniform_vector(gen, Point(box->first.array() - 0.5),
                                       Point(box->second.array() + 0.5));
        const double alpha = 0.25 + 3.0 * unit(gen);
        const double eps = i % 3 == 0 ? 0.0 : unit(gen);
        const RegularizedVI vi = regularize(inst->problem, regularizer_by_name(i % 2 ? "l1" : "l2"), eps);
        const double diff = std::abs(theta_alpha(vi, x, alpha).value - brute_force_gap(vi, x, alpha, res));
        worst = std::min(worst, 5.0 * h - diff);
      }
    }
    out.add("explicit theta_alpha = grid maximum within 5h", worst, n);
  }
  {
    const PointSampler s = gaussian_sampler(3, seed + 3, 2.0);
    const RegularizedVI vi = regularize(ex.problem, Regularizer::squared_l2(), 0.1);
    double worst = kInf;
    for (int i = 0; i < 500; ++i) {
      const Point x = s(static_cast<std::uint64_t>(i));
      worst = std::min(worst, theta_alpha(vi, x, 0.5).value - theta_alpha(vi, x, 2.0).value + 1e-12);
    }
    out.add("theta_alpha non-increasing in alpha", worst, 500);
  }
  {
    // Convexity of G by midpoints on Example 5.1.
    auto gen = seeded_engine(seed, 11);
    double worst = kInf;
    const int pairs = 100;
    for (int i = 0; i < pairs; ++i) {
      const Point x = ex.problem.set.project(Point(3.0 * gaussian_vector(gen, 3)));
      const Point z = ex.problem.set.project(Point(3.0 * gaussian_vector(gen, 3)));
      const double gm = dual_gap(ex.problem, 0.5 * (x + z)).value;
      worst = std::min(worst, 0.5 * dual_gap(ex.problem, x).value + 0.5 * dual_gap(ex.problem, z).value -
                                  gm + 1e-8);
    }
    out.add("G midpoint convexity", worst, pairs);
  }
}

void bounds_soundness(CheckReport& rep) {
  Collector out(rep);
  const ProblemInstance ex = example_5_1();
  double sound = kInf, threshold = kInf, consistent = kInf;
  int runs = 0;
  for (double eps : {0.5, 0.1, 0.01}) {
    const RegularizedVI vi = regularize(ex.problem, Regularizer::squared_l2(), eps);
    const Point ref = *ex.regularized_solution(kDirect, "l2", eps);
    for (int s = 0; s < 17; ++s, ++runs) {
      auto gen = seeded_engine(rep.seed, 100 + static_cast<std::uint64_t>(runs));
      const Point x0 = example_5_1_start() + gaussian_vector(gen, 3);
      const double tau = 1e-4;
      const double L_theta = estimate_L_theta(vi, x0, 1.0, 2.0, 200, rep.seed + runs);
      InnerConfig ic = make_inner_config(L_theta, vi.op.mu());
      ic.keep_trace = false;
      const InnerResult r = solve_inner(vi, x0, tau, ic);
      const double radius = dgap_error_bound(std::max(r.theta, 0.0), dgap_constants(vi, ic));
      sound = std::min(sound, radius - (r.x - ref).norm());
      const double lk = (4.0 + eps) / eps * std::sqrt(2.0);
      threshold = std::min(threshold, tau * tau / (lk * lk) * (1.0 + 1e-12) - r.theta);
      consistent = std::min(
          consistent, stopping_threshold(tau, dgap_constants(vi, ic)) == r.threshold ? 0.0 : -1.0);
    }
  }
  out.add("true distance to x_eps <= dgap_error_bound radius", sound, runs);
  out.add("exit theta_ab <= tau^2 / L_k^2 with L_k = (4+eps)/eps sqrt 2", threshold, runs);
  out.add("stopping threshold identical to stopping_threshold()", consistent, runs);

  const SharpnessModel model{2.0, 1.0};
  double mono = kInf;
  double prev = -1.0;
  for (double eps = 1e-4; eps <= 1.0; eps *= 1.5) {
    const double r1 = eps_error_bound_dualgap(model, 1.0, eps);
    mono = std::min(mono, r1 - prev);
    prev = r1;
  }
  out.add("eps error bound strictly increasing in eps", mono > 0.0 ? mono : -1.0, 23);
}

void exactness(CheckReport& rep) {
  Collector out(rep);
  ExperimentConfig cfg;
  cfg.seed = rep.seed;
  cfg.epsilons = {0.5, 0.1, 0.01, 0.005, 1e-4};
  cfg.x0 = example_5_1_start();
  cfg.experimental = true;
  struct Cell {
    Model model;
    const char* reg;
    Exactness expected;
  };
  for (const Cell& c : {Cell{Model::dualgap, "l1", Exactness::exact},
                        Cell{Model::dualgap, "l2", Exactness::not_exact},
                        Cell{Model::direct, "l1", Exactness::exact},
                        Cell{Model::direct, "l2", Exactness::not_exact}}) {
    cfg.models = {c.model};
    cfg.regularizers = {c.reg};
    for (const ResultRow& row : run_experiment(cfg)) {
      out.add(row.model + " " + row.regularizer + " eps=" + format_number(row.epsilon) +
                  " verdict " + to_string(c.expected) + " (got " + row.exactness + ")",
              row.exactness == to_string(c.expected) ? 0.0 : -1.0, 1);
    }
  }
  const ProblemInstance ex = example_5_1();
  const auto pts = ex.oracle->sample_S0(20, rep.seed);
  double worst = kInf;
  for (const Point& x : pts) {
    worst = std::min(worst, exactness_check(ex.problem, x, cfg.tol).verdict == Exactness::exact ? 0.0 : -1.0);
  }
  out.add("points of S0 verdict exact", worst, static_cast<int>(pts.size()));
}

}  // namespace

bool CheckReport::passed() const {
  return std::all_of(properties.begin(), properties.end(),
                     [](const PropertyResult& p) { return p.passed; });
}

std::vector<std::string> check_suites() {
  return {"core-geometry", "gap-oracle", "bounds-soundness", "exactness"};
}

CheckReport run_check(const std::string& suite, std::uint64_t seed) {
  CheckReport rep{suite, seed, {}};
  if (suite == "core-geometry") core_geometry(rep);
  else if (suite == "gap-oracle") gap_oracle(rep);
  else if (suite == "bounds-soundness") bounds_soundness(rep);
  else if (suite == "exactness") exactness(rep);
  else {
    std::string names;
    for (const auto& s : check_suites()) names += (names.empty() ? "" : ", ") + s;
    throw DomainError("unknown suite '" + suite + "' (available: " + names + ")");
  }
  return rep;
}

void print_report(std::ostream& os, const CheckReport& report) {
  os << "suite " << report.suite << " (seed " << report.seed << ")\n";
  for (const PropertyResult& p : report.properties) {
    os << (p.passed ? "  pass  " : "  FAIL  ") << p.name << "  [worst margin "
       << std::setprecision(3) << std::scientific << p.worst_margin << std::defaultfloat
       << ", n=" << p.samples << "]\n";
  }
  os << (report.passed() ? "all properties hold\n" : "violations found\n");
}

}  // namespace vireg
