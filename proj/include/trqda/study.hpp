#ifndef TRQDA_STUDY_HPP
#define TRQDA_STUDY_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "trqda/audit.hpp"
#include "trqda/driver.hpp"
#include "trqda/runspec.hpp"

namespace trqda {

/// One executed run with everything needed to report on it.
struct Execution {
  std::shared_ptr<const Problem> problem;
  Vector x0;
  TrConfig config;
  RunResult result;
  std::optional<AuditReport> audit;
};

inline Execution execute(const RunSpec& spec, const IterationSink& sink = {}) {
  validate_spec(spec);
  Execution ex;
  ex.problem = make_problem(spec.problem, spec.params);
  ex.x0 = spec.x0 ? *spec.x0 : ex.problem->default_start();
  if (ex.x0.size() != ex.problem->dim()) {
    throw SpecError("x0 has " + std::to_string(ex.x0.size()) + " entries, problem dimension is " +
                    std::to_string(ex.problem->dim()));
  }
  ex.config = spec.config;
  if (ex.config.q > ex.problem->max_order()) {
    throw SpecError("problem '" + spec.problem + "' supplies derivatives up to order " +
                    std::to_string(ex.problem->max_order()));
  }
  InexactOracle oracle(ex.problem, spec.policy, spec.oracle_seed, ex.config.exact_orders, spec.cost);
  ex.result = run(oracle, ex.config, ex.x0, sink);
  if (spec.audit) ex.audit = check_history(ex.result, *ex.problem, ex.config, ex.x0);
  return ex;
}

inline nlohmann::json to_json(const BoundConstants& b) {
  return {{"L_f", b.L_f},
          {"kappa_Delta", b.kappa_Delta},
          {"kappa_delta", b.kappa_delta},
          {"kappa_s", b.kappa_s},
          {"kappa_a", b.kappa_a},
          {"kappa_b", b.kappa_b},
          {"kappa_c", b.kappa_c},
          {"kappa_d", b.kappa_d},
          {"kappa_e", b.kappa_e},
          {"kappa_f", b.kappa_f},
          {"kappa_acc", b.kappa_acc},
          {"i_zeta_min", b.i_zeta_min},
          {"successful_bound", b.successful_bound},
          {"eval_bound_f", b.eval_bound_f},
          {"eval_bound_d", b.eval_bound_d},
          {"eval_bound_d_direct", b.eval_bound_d_direct},
          {"decrease_floor", b.decrease_floor},
          {"radius_floor", b.radius_floor}};
}

inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline nlohmann::json summary_json(const RunSpec& spec, const Execution& ex) {
  using nlohmann::json;
  const RunResult& r = ex.result;
  const TrConfig& c = ex.config;
  json j;
  j["problem"] = spec.problem;
  j["label"] = spec.label;
  j["policy"] = std::string(to_string(spec.policy));
  j["oracle_seed"] = spec.oracle_seed;
  j["config"] = {{"q", c.q},           {"eps", c.eps},         {"Delta0", c.Delta0},
                 {"Delta_max", c.Delta_max}, {"vartheta", c.vartheta}, {"eta1", c.eta1},
                 {"eta2", c.eta2},     {"gamma1", c.gamma1},   {"gamma2", c.gamma2},
                 {"gamma3", c.gamma3}, {"omega", c.omega},     {"varsigma", c.varsigma},
                 {"gamma_zeta", c.gamma_zeta}, {"kappa_zeta", c.kappa_zeta},
                 {"zeta0", c.zeta0},   {"seed", c.seed},       {"max_iterations", c.max_iterations},
                 {"exact_orders", std::vector<int>(c.exact_orders.begin(), c.exact_orders.end())}};
  j["terminated"] = r.terminated;
  j["x0"] = to_std(ex.x0);
  j["x_eps"] = to_std(r.x_eps);
  j["delta_eps"] = r.delta_eps;
  j["f_x_eps"] = ex.problem->value(r.x_eps);
  j["grad_norm_x_eps"] = ex.problem->derivative(r.x_eps, 1).vector().norm();
  j["iterations"] = r.iterations();
  j["successful"] = r.successful();
  j["f_evals"] = r.evals.f_evals();
  std::vector<long> per_order;
  for (int i = 1; i <= c.q; ++i) per_order.push_back(r.evals.deriv_evals(i));
  j["deriv_evals"] = per_order;
  j["deriv_rounds"] = r.deriv_rounds;
  j["i_zeta"] = r.i_zeta;
  j["tightenings_per_order"] = r.tightenings_per_order;
  j["final_zetas"] = r.final_zetas;
  j["cost"] = r.evals.total_cost();
  j["warnings"] = r.trace.warnings;
  if (ex.audit) {
    const AuditReport& a = *ex.audit;
    j["bounds"] = to_json(a.bounds);
    json verdicts = json::object();
    for (const auto& name : audit_checks()) {
      verdicts[name] = {{"checked", a.checked.count(name) ? a.checked.at(name) : 0},
                        {"violations", a.count(name)}};
    }
    j["audit"] = {{"ok", a.ok()},
                  {"L_f", a.lipschitz.L_f},
                  {"iteration_bound", a.iteration_bound},
                  {"checks", verdicts}};
    json v = json::array();
    for (const auto& viol : a.violations)
      v.push_back({{"check", viol.check}, {"iteration", viol.iteration}, {"detail", viol.detail}});
    j["audit"]["violations"] = v;
  }
  return j;
}

/// Least-squares slope of log(y) against log(x).
inline double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit: need >= 2 points");
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) throw std::invalid_argument("fit: values must be positive");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit: x values are all equal");
  return sxy / sxx;
}

struct SweepRow {
  double eps = 0.0;
  std::uint64_t seed = 0;
  bool terminated = false;
  long iterations = 0;
  long successful = 0;
  long f_evals = 0;
  long deriv_evals = 0;
  long deriv_rounds = 0;
  long total_evals = 0;   // f_evals + deriv_evals
  double cost = 0.0;
  bool audit_ok = true;
  long audit_violations = 0;
  long step2_absolute = 0;
  long step2_over_cap = 0;
};

struct SweepSummary {
  std::vector<SweepRow> rows;
  std::vector<double> eps;          // grid points with at least one terminated run
  std::vector<double> mean_evals;   // mean total evaluations per grid point
  long excluded = 0;                // non-terminated runs
  double slope = 0.0;
  double slope_limit = 0.0;
  bool pass = false;
};

/// Runs the specs concurrently (at most `workers` at a time); results keep input order.
inline std::vector<Execution> execute_all(const std::vector<RunSpec>& specs, int workers) {
  std::vector<Execution> out(specs.size());
  workers = std::max(1, workers);
  for (std::size_t start = 0; start < specs.size(); start += workers) {
    std::vector<std::future<Execution>> futs;
    const std::size_t stop = std::min(specs.size(), start + static_cast<std::size_t>(workers));
    for (std::size_t i = start; i < stop; ++i) {
      futs.push_back(std::async(workers > 1 ? std::launch::async : std::launch::deferred,
                                [&specs, i] { return execute(specs[i]); }));
    }
    for (std::size_t i = start; i < stop; ++i) out[i] = futs[i - start].get();
  }
  return out;
}

inline SweepRow sweep_row(double eps, std::uint64_t seed, const Execution& ex) {
  SweepRow row;
  const RunResult& r = ex.result;
  row.eps = eps;
  row.seed = seed;
  row.terminated = r.terminated;
  row.iterations = r.iterations();
  row.successful = r.successful();
  row.f_evals = r.evals.f_evals();
  row.deriv_evals = r.evals.deriv_evals();
  row.deriv_rounds = r.deriv_rounds;
  row.total_evals = row.f_evals + row.deriv_evals;
  row.cost = r.evals.total_cost();
  if (ex.audit) {
    row.audit_ok = ex.audit->ok();
    row.audit_violations = static_cast<long>(ex.audit->violations.size());
  }
  for (const auto& ev : r.trace.step2) {
    row.step2_absolute += ev.absolute_outcomes;
    if (ev.tighten_count > ev.tighten_cap) ++row.step2_over_cap;
  }
  return row;
}

/// Evaluation counts over a tolerance grid (every eps_j set to the grid value)
/// and seeds; the fitted slope of log(evaluations) against log(1/eps) passes
/// when it does not exceed q + 1.25.
inline SweepSummary eps_scaling_study(const RunSpec& base, const std::vector<double>& grid,
                                      const std::vector<std::uint64_t>& seeds, int workers = 1) {
  if (grid.size() < 4) throw SpecError("eps sweep needs at least 4 grid points");
  if (seeds.empty()) throw SpecError("eps sweep needs at least one seed");
  std::vector<RunSpec> specs;
  for (double e : grid) {
    for (std::uint64_t s : seeds) {
      RunSpec sp = base;
      sp.config.eps.assign(base.config.q, e);
      sp.config.vartheta = std::max(std::min(sp.config.vartheta, 1.0), e);
      sp.config.seed = s;
      sp.oracle_seed = s;
      specs.push_back(sp);
    }
  }
  const auto runs = execute_all(specs, workers);
  SweepSummary out;
  out.slope_limit = base.config.q + 1.25;
  std::size_t idx = 0;
  for (double e : grid) {
    double sum = 0.0;
    long n = 0;
    for (std::uint64_t s : seeds) {
      out.rows.push_back(sweep_row(e, s, runs[idx++]));
      const SweepRow& row = out.rows.back();
      if (!row.terminated) {
        ++out.excluded;
        continue;
      }
      sum += static_cast<double>(row.total_evals);
      ++n;
    }
    if (n > 0) {
      out.eps.push_back(e);
      out.mean_evals.push_back(sum / n);
    }
  }
  if (out.eps.size() >= 2) {
    std::vector<double> inv;
    for (double e : out.eps) inv.push_back(1.0 / e);
    out.slope = fit_loglog_slope(inv, out.mean_evals);
    out.pass = out.eps.size() >= 4 && out.slope <= out.slope_limit;
  }
  return out;
}

struct CostReport {
  double dynamic_cost = 0.0;
  double fixed_cost = 0.0;
  double ratio = 1.0;   // dynamic / fixed
  long dynamic_calls = 0;
  long fixed_calls = 0;
  bool dynamic_terminated = false;
  bool fixed_terminated = false;
  std::vector<double> fixed_zeta0;
  double fixed_f_accuracy = 0.0;
};

/// Prices a dynamic-accuracy run against a counterpart that requests every
/// derivative at the smallest accuracy the dynamic run needed and every value
/// at the smallest accuracy it requested, from the first iteration on.
inline CostReport cost_savings_report(const RunSpec& spec) {
  RunSpec dyn = spec;
  dyn.audit = false;
  const Execution d = execute(dyn);
  CostReport rep;
  rep.dynamic_cost = d.result.evals.total_cost(spec.cost);
  rep.dynamic_calls = d.result.evals.total_calls();
  rep.dynamic_terminated = d.result.terminated;

  RunSpec fixed = dyn;
  TrConfig& c = fixed.config;
  for (int i = 1; i <= c.q; ++i) {
    if (c.exact_orders.count(i)) continue;
    const double m = d.result.evals.min_requested(i);
    c.zeta0[i - 1] = std::isfinite(m) ? std::min(m, c.kappa_zeta) : c.zeta0[i - 1];
  }
  const double fmin = d.result.evals.min_requested(0);
  if (std::isfinite(fmin) && fmin > 0.0) c.f_accuracy_cap = fmin;
  rep.fixed_zeta0 = c.zeta0;
  rep.fixed_f_accuracy = c.f_accuracy_cap;
  const Execution f = execute(fixed);
  rep.fixed_cost = f.result.evals.total_cost(spec.cost);
  rep.fixed_calls = f.result.evals.total_calls();
  rep.fixed_terminated = f.result.terminated;
  rep.ratio = rep.fixed_cost > 0.0 ? rep.dynamic_cost / rep.fixed_cost : 1.0;
  return rep;
}

}  // namespace trqda

#endif  // TRQDA_STUDY_HPP
