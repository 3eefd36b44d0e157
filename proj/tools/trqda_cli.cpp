// Command-line driver: run, sweep, audit, compare.
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "trqda/trqda.hpp"

namespace fs = std::filesystem;
using namespace trqda;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kCapExhausted = 3, kAuditViolation = 4 };

struct Args {
  std::string spec_file;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_spec_options(CLI::App* app, Args& args) {
  app->add_option("--spec", args.spec_file, "key = value spec file (flags override it)");
  for (const auto& key : spec_keys()) {
    std::string flag = key;
    for (char& c : flag) c = c == '_' ? '-' : c;
    args.options[key] = app->add_option("--" + flag, args.values[key]);
  }
}

RunSpec spec_from(const Args& args) {
  std::map<std::string, std::string> kv;
  if (!args.spec_file.empty()) kv = read_spec_file(args.spec_file);
  for (const auto& [key, opt] : args.options)
    if (opt->count() > 0) kv[key] = args.values.at(key);
  if (!kv.count("output")) {
    if (const char* env = std::getenv("TRQDA_OUTPUT_DIR")) kv["output"] = env;
  }
  return build_spec(kv);
}

std::string stem(const RunSpec& spec) {
  return spec.label.empty() ? spec.problem : spec.label;
}

fs::path out_path(const RunSpec& spec, const std::string& name) {
  fs::path dir(spec.output_dir);
  fs::create_directories(dir);
  return dir / name;
}

void write_json(const fs::path& p, const nlohmann::json& j) {
  std::ofstream os(p);
  os << j.dump(2) << '\n';
}

void print_audit(const AuditReport& a) {
  for (const auto& name : audit_checks()) {
    const long n = a.checked.count(name) ? a.checked.at(name) : 0;
    const long v = a.count(name);
    std::cout << "  " << std::left << std::setw(18) << name << (v == 0 ? "ok" : "VIOLATED")
              << "  (" << n << " checked, " << v << " violations)\n";
  }
  for (const auto& v : a.violations)
    std::cout << "  - " << v.check << " @" << v.iteration << ": " << v.detail << '\n';
}

int single_run(const RunSpec& spec, bool verbose_audit) {
  const Execution ex = execute(spec);
  const auto csv = out_path(spec, stem(spec) + "_history.csv");
  {
    std::ofstream os(csv);
    write_history_csv(os, ex.result.history);
  }
  const auto js = out_path(spec, stem(spec) + "_summary.json");
  write_json(js, summary_json(spec, ex));

  const RunResult& r = ex.result;
  std::cout << spec.problem << ": " << (r.terminated ? "terminated" : "iteration cap reached")
            << " after " << r.iterations() << " iterations (" << r.successful()
            << " successful)\n"
            << "  f(x_eps) = " << std::setprecision(10) << ex.problem->value(r.x_eps)
            << ", delta_eps = " << r.delta_eps << '\n'
            << "  f evaluations " << r.evals.f_evals() << ", derivative evaluations "
            << r.evals.deriv_evals() << " in " << r.deriv_rounds << " rounds\n"
            << "  wrote " << csv.string() << " and " << js.string() << '\n';
  if (ex.audit) {
    std::cout << "  audit: " << (ex.audit->ok() ? "no violations" : "VIOLATIONS") << '\n';
    if (verbose_audit || !ex.audit->ok()) print_audit(*ex.audit);
  }
  if (!r.terminated) return kCapExhausted;
  if (ex.audit && !ex.audit->ok()) return kAuditViolation;
  return kOk;
}

int sweep(RunSpec spec) {
  if (spec.mode == StudyMode::Single) spec.mode = spec.eps_grid.empty() ? StudyMode::SeedSweep
                                                                        : StudyMode::EpsSweep;
  if (spec.seeds.empty()) spec.seeds = {spec.oracle_seed};
  std::vector<double> grid = spec.eps_grid;
  if (spec.mode == StudyMode::SeedSweep) grid.assign(1, spec.config.eps_min());

  SweepSummary s;
  if (spec.mode == StudyMode::EpsSweep) {
    s = eps_scaling_study(spec, grid, spec.seeds, spec.workers);
  } else {
    std::vector<RunSpec> specs;
    for (auto seed : spec.seeds) {
      RunSpec sp = spec;
      sp.config.seed = seed;
      sp.oracle_seed = seed;
      specs.push_back(sp);
    }
    const auto runs = execute_all(specs, spec.workers);
    for (std::size_t i = 0; i < runs.size(); ++i) {
      s.rows.push_back(sweep_row(grid[0], spec.seeds[i], runs[i]));
      if (!s.rows.back().terminated) ++s.excluded;
    }
  }

  const auto csv = out_path(spec, stem(spec) + "_sweep.csv");
  {
    std::ofstream os(csv);
    os << "eps,seed,terminated,iterations,successful,f_evals,deriv_evals,deriv_rounds,"
          "total_evals,cost,audit_violations\n";
    for (const auto& r : s.rows) {
      os << detail::fmt17(r.eps) << ',' << r.seed << ',' << r.terminated << ',' << r.iterations
         << ',' << r.successful << ',' << r.f_evals << ',' << r.deriv_evals << ','
         << r.deriv_rounds << ',' << r.total_evals << ',' << detail::fmt17(r.cost) << ','
         << r.audit_violations << '\n';
    }
  }
  nlohmann::json j;
  j["problem"] = spec.problem;
  j["mode"] = std::string(to_string(spec.mode));
  j["q"] = spec.config.q;
  j["excluded"] = s.excluded;
  if (spec.mode == StudyMode::EpsSweep) {
    j["eps"] = s.eps;
    j["mean_evals"] = s.mean_evals;
    j["slope"] = s.slope;
    j["slope_limit"] = s.slope_limit;
    j["pass"] = s.pass;
  }
  write_json(out_path(spec, stem(spec) + "_sweep.json"), j);

  std::cout << std::left << std::setw(12) << "eps" << std::setw(8) << "seed" << std::setw(8)
            << "term" << std::setw(10) << "iters" << std::setw(12) << "evals" << "audit\n";
  long violations = 0;
  for (const auto& r : s.rows) {
    violations += r.audit_violations;
    std::cout << std::setw(12) << r.eps << std::setw(8) << r.seed << std::setw(8) << r.terminated
              << std::setw(10) << r.iterations << std::setw(12) << r.total_evals
              << (r.audit_violations == 0 ? "ok" : "VIOLATED") << '\n';
  }
  if (spec.mode == StudyMode::EpsSweep) {
    std::cout << "log-log slope of evaluations vs 1/eps: " << s.slope << " (limit "
              << s.slope_limit << "): " << (s.pass ? "PASS" : "FAIL") << '\n';
  }
  std::cout << "wrote " << csv.string() << '\n';
  if (s.excluded > 0) return kCapExhausted;
  if (violations > 0) return kAuditViolation;
  if (spec.mode == StudyMode::EpsSweep && !s.pass) return kAuditViolation;
  return kOk;
}

int compare(const RunSpec& spec) {
  const CostReport c = cost_savings_report(spec);
  nlohmann::json j = {{"problem", spec.problem},
                      {"dynamic_cost", c.dynamic_cost},
                      {"fixed_cost", c.fixed_cost},
                      {"ratio", c.ratio},
                      {"dynamic_calls", c.dynamic_calls},
                      {"fixed_calls", c.fixed_calls},
                      {"fixed_zeta0", c.fixed_zeta0},
                      {"fixed_f_accuracy", c.fixed_f_accuracy},
                      {"dynamic_terminated", c.dynamic_terminated},
                      {"fixed_terminated", c.fixed_terminated}};
  write_json(out_path(spec, stem(spec) + "_compare.json"), j);
  std::cout << "dynamic accuracy: cost " << c.dynamic_cost << " over " << c.dynamic_calls
            << " calls\nfixed accuracy:   cost " << c.fixed_cost << " over " << c.fixed_calls
            << " calls\nratio dynamic/fixed = " << c.ratio << '\n';
  if (!c.dynamic_terminated || !c.fixed_terminated) return kCapExhausted;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trust-region minimization with dynamic accuracy"};
  app.require_subcommand(1);
  Args run_args, sweep_args, audit_args, compare_args;
  auto* run_cmd = app.add_subcommand("run", "single run; writes iteration CSV and JSON summary");
  add_spec_options(run_cmd, run_args);
  auto* sweep_cmd = app.add_subcommand("sweep", "tolerance or seed sweep");
  add_spec_options(sweep_cmd, sweep_args);
  auto* audit_cmd = app.add_subcommand("audit", "single run with the full audit table");
  add_spec_options(audit_cmd, audit_args);
  auto* compare_cmd = app.add_subcommand("compare", "dynamic vs fixed accuracy cost");
  add_spec_options(compare_cmd, compare_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  try {
    if (*run_cmd) return single_run(spec_from(run_args), false);
    if (*audit_cmd) {
      RunSpec spec = spec_from(audit_args);
      spec.audit = true;
      return single_run(spec, true);
    }
    if (*sweep_cmd) return sweep(spec_from(sweep_args));
    if (*compare_cmd) return compare(spec_from(compare_args));
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kOk;
}
