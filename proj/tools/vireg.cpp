// SPDX-License-Identifier: Apache-2.0
// vireg: run regularized VI experiments on built-in or user-described problems.
#include "vireg/checks.hpp"
#include "vireg/experiment.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size()) throw vireg::DomainError("cannot parse '" + item + "' as a number");
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> parse_names(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int emit(const std::vector<vireg::ResultRow>& rows, const std::string& format,
         const std::string& path) {
  std::ofstream file;
  std::ostream* os = &std::cout;
  if (!path.empty() && path != "-") {
    file.open(path);
    if (!file) {
      std::cerr << "error: cannot write " << path << "\n";
      return 2;
    }
    os = &file;
  }
  if (format == "json") vireg::write_json(*os, rows);
  else vireg::write_csv(*os, rows);
  int failed = 0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      std::cerr << "cell " << r.model << "/" << r.regularizer << "/eps=" << vireg::format_number(r.epsilon)
                << " failed: " << r.error << "\n";
      ++failed;
    }
  }
  return failed ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solvers and experiments for regularized monotone variational inequalities"};
  app.require_subcommand(1);

  vireg::ExperimentConfig cfg;
  std::string models = "dualgap", regs = "l2", eps_text, x0_text, format = "csv", out;

  auto* run = app.add_subcommand("run", "Run an eps sweep and print one row per cell");
  run->add_option("--problem", cfg.problem, "Built-in problem name")->default_val(cfg.problem);
  run->add_option("--spec", cfg.spec_path, "JSON problem description (replaces --problem)")
      ->check(CLI::ExistingFile);
  run->add_option("--model", models, "direct, dualgap or a comma list")->default_val(models);
  run->add_option("--reg", regs, "l1, l2 or a comma list")->default_val(regs);
  run->add_option("--eps", eps_text, "Comma-separated eps values")->required();
  run->add_option("--x0", x0_text, "Comma-separated initial point");
  run->add_option("--tol", cfg.tol, "Exactness threshold on G")->default_val(cfg.tol);
  run->add_option("--tau", cfg.tau, "Certified accuracy of the direct model")->default_val(cfg.tau);
  run->add_option("--max-iter", cfg.max_iter, "Iteration budget override (0: defaults)")
      ->default_val(cfg.max_iter);
  run->add_option("--seed", cfg.seed, "Seed for all randomized components")->default_val(cfg.seed);
  run->add_option("--out", out, "Output path (stdout when omitted)");
  run->add_option("--format", format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val(format);
  run->add_flag("--experimental", cfg.experimental, "Allow direct + l1");
  run->add_flag("--timing", cfg.timing, "Record wall time (output then varies between runs)");

  bool t1_timing = false;
  std::string t1_out, t1_format = "csv";
  std::uint64_t t1_seed = 0;
  auto* t1 = app.add_subcommand("table1", "Twenty-cell model comparison on Example 5.1");
  t1->add_option("--out", t1_out, "Output path (stdout when omitted)");
  t1->add_option("--format", t1_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}))
      ->default_val(t1_format);
  t1->add_option("--seed", t1_seed, "Seed")->default_val(t1_seed);
  t1->add_flag("--timing", t1_timing, "Record wall time");

  std::string suite;
  std::uint64_t check_seed = 0;
  auto* check = app.add_subcommand("check", "Run an invariant suite");
  std::string suites;
  for (const auto& s : vireg::check_suites()) suites += (suites.empty() ? "" : ", ") + s;
  check->add_option("suite", suite, "One of: " + suites)->required();
  check->add_option("--seed", check_seed, "Seed")->default_val(check_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run) {
      cfg.models.clear();
      for (const auto& m : parse_names(models)) cfg.models.push_back(vireg::parse_model(m));
      cfg.regularizers = parse_names(regs);
      cfg.epsilons = parse_list(eps_text);
      if (!x0_text.empty()) {
        const auto v = parse_list(x0_text);
        cfg.x0 = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
      }
      return emit(vireg::run_experiment(cfg), format, out);
    }
    if (*t1) {
      vireg::ExperimentConfig tc = vireg::table1_config();
      tc.timing = t1_timing;
      tc.seed = t1_seed;
      return emit(vireg::run_experiment(tc), t1_format, t1_out);
    }
    if (*check) {
      const vireg::CheckReport rep = vireg::run_check(suite, check_seed);
      vireg::print_report(std::cout, rep);
      return rep.passed() ? 0 : 1;
    }
  } catch (const vireg::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
