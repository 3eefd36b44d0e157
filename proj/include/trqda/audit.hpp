#ifndef TRQDA_AUDIT_HPP
#define TRQDA_AUDIT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "trqda/bounds.hpp"
#include "trqda/driver.hpp"
#include "trqda/reference.hpp"

namespace trqda {

struct Violation {
  std::string check;
  long iteration = -1;
  std::string detail;
};

/// Per-order Lipschitz constants used for an audit and where they came from.
struct LipschitzInfo {
  std::vector<double> per_order;   // L_{f,j}, j = 1..q
  std::vector<bool> estimated;
  double L_f = 1.0;                // max(1, max_j L_{f,j})
};

struct AuditReport {
  BoundConstants bounds;
  LipschitzInfo lipschitz;
  std::vector<Violation> violations;
  std::map<std::string, long> checked;   // number of items examined per check
  double f0 = 0.0;
  long iterations = 0;
  long successes = 0;
  double iteration_bound = 0.0;
  long f_evals = 0;
  long deriv_rounds = 0;
  long deriv_evals = 0;
  int i_zeta = 0;
  std::vector<int> tightenings_per_order;
  double min_decrease = std::numeric_limits<double>::infinity();
  double min_radius = std::numeric_limits<double>::infinity();

  bool ok() const { return violations.empty(); }
  long count(const std::string& check) const {
    return std::count_if(violations.begin(), violations.end(),
                         [&](const Violation& v) { return v.check == check; });
  }
};

/// Check names, in report order.
inline const std::vector<std::string>& audit_checks() {
  static const std::vector<std::string> names = {
      "decrease_floor", "radius_floor",     "iteration_bound", "successful_bound",
      "eval_bound_f",   "eval_bound_d",     "zeta_count",      "accuracy_floor",
      "step_verify",    "monotone_f",       "f_accuracy",      "model_accuracy",
      "termination"};
  return names;
}

/// Axis-aligned box around every iterate and trial point of a run, padded.
inline std::pair<Vector, Vector> trajectory_box(const RunResult& r, const Vector& x0,
                                                double pad = 0.1) {
  Vector lo = x0, hi = x0;
  auto grow = [&](const Vector& v) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  };
  for (const auto& rec : r.history) {
    grow(rec.x);
    if (rec.s.size() == rec.x.size()) grow(rec.x + rec.s);
  }
  if (r.x_eps.size() == x0.size()) grow(r.x_eps);
  const Vector w = (hi - lo).cwiseMax(1e-3);
  return {lo - pad * w, hi + pad * w};
}

/// Exact per-order Lipschitz constants when the problem knows them, otherwise
/// inflated sampled estimates on the trajectory box.
inline LipschitzInfo audit_lipschitz(const Problem& p, const RunResult& r, const TrConfig& cfg,
                                     const Vector& x0, int samples = 4000) {
  LipschitzInfo info;
  std::optional<std::pair<Vector, Vector>> box;
  for (int j = 1; j <= cfg.q; ++j) {
    if (auto L = p.lipschitz(j)) {
      info.per_order.push_back(*L);
      info.estimated.push_back(false);
      continue;
    }
    if (!box) box = trajectory_box(r, x0);
    const auto est = lipschitz_estimate(p, box->first, box->second, j, samples, 17u + j);
    info.per_order.push_back(est.inflated);
    info.estimated.push_back(true);
  }
  info.L_f = 1.0;
  for (double L : info.per_order) info.L_f = std::max(info.L_f, L);
  return info;
}

struct AuditOptions {
  std::optional<double> L_f;   // overrides audit_lipschitz when set
  bool check_termination = true;
  double termination_slack = 1e-8;
  int lipschitz_samples = 4000;
};

/// Audits a completed run against exact problem data and the complexity
/// constants of the method. Violations are listed, never thrown.
inline AuditReport check_history(const RunResult& r, const Problem& p, const TrConfig& cfg,
                                 const Vector& x0, const AuditOptions& opt = {}) {
  AuditReport rep;
  auto add = [&](const std::string& check, long it, const std::string& detail) {
    rep.violations.push_back({check, it, detail});
  };
  auto fmt = [](double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
  };

  if (opt.L_f) {
    rep.lipschitz.L_f = std::max(1.0, *opt.L_f);
  } else {
    rep.lipschitz = audit_lipschitz(p, r, cfg, x0, opt.lipschitz_samples);
  }
  rep.f0 = p.value(x0);
  std::vector<double> norms;
  for (int i = 1; i <= cfg.q; ++i) norms.push_back(operator_norm(p.derivative(x0, i)));
  rep.bounds = compute_bounds(cfg, rep.lipschitz.L_f, rep.f0, p.f_low(), norms);
  const BoundConstants& B = rep.bounds;

  rep.iterations = r.iterations();
  rep.successes = r.successful();
  rep.f_evals = r.evals.f_evals();
  rep.deriv_rounds = r.deriv_rounds;
  rep.deriv_evals = r.evals.deriv_evals();
  rep.i_zeta = r.i_zeta;
  rep.tightenings_per_order = r.tightenings_per_order;

  // Exact f agrees with a correctly rounded value to a few ulps only.
  auto fp_slack = [](double a, double b) {
    return 8.0 * std::numeric_limits<double>::epsilon() * std::max({1.0, std::abs(a), std::abs(b)});
  };

  for (const auto& rec : r.history) {
    const double fx = p.value(rec.x);
    const double fxs = p.value(rec.x + rec.s);

    // (a), (i)
    if (rec.successful) {
      const double dec = fx - fxs;
      rep.min_decrease = std::min(rep.min_decrease, dec);
      ++rep.checked["decrease_floor"];
      if (dec + fp_slack(fx, fxs) < B.decrease_floor) {
        add("decrease_floor", rec.k, "decrease " + fmt(dec) + " < " + fmt(B.decrease_floor));
      }
      ++rep.checked["monotone_f"];
      if (!(fxs < fx + fp_slack(fx, fxs))) {
        add("monotone_f", rec.k, "exact f did not decrease on an accepted step");
      }
    }
    // (b)
    rep.min_radius = std::min(rep.min_radius, rec.Delta);
    ++rep.checked["radius_floor"];
    if (rec.Delta < B.radius_floor) {
      add("radius_floor", rec.k, "Delta " + fmt(rec.Delta) + " < " + fmt(B.radius_floor));
    }
    // (j) function-value contracts
    ++rep.checked["f_accuracy"];
    if (rec.f_acc > cfg.omega * rec.dT_s * (1.0 + 1e-15)) {
      add("f_accuracy", rec.k, "request above omega * dT_s");
    }
    if (std::abs(rec.f_bar_new - fxs) > rec.f_acc + fp_slack(fxs, rec.f_bar_new)) {
      add("f_accuracy", rec.k, "|fbar(x+s) - f(x+s)| = " + fmt(std::abs(rec.f_bar_new - fxs)) +
                                   " > " + fmt(rec.f_acc));
    }
    if (std::abs(rec.f_bar_old - fx) > rec.f_acc_old + fp_slack(fx, rec.f_bar_old)) {
      add("f_accuracy", rec.k, "|fbar(x) - f(x)| above its accuracy");
    }
    if (rec.f_acc_old > cfg.omega * rec.dT_s * (1.0 + 1e-15)) {
      add("f_accuracy", rec.k, "stored fbar(x) less accurate than omega * dT_s");
    }
    // relative accuracy of the inexact model decrease against exact tensors
    if (rec.j >= 1 && rec.j <= p.max_order()) {
      ++rep.checked["model_accuracy"];
      DerivativeBundle exact;
      exact.x = rec.x;
      for (int i = 1; i <= rec.j; ++i) exact.tensors.push_back(p.derivative(rec.x, i));
      const double dT_exact = taylor_decrement(exact, rec.s, rec.j);
      if (std::abs(rec.dT_s - dT_exact) > cfg.omega * rec.dT_s * (1.0 + 1e-9) + 1e-14 * std::abs(dT_exact)) {
        add("model_accuracy", rec.k, "|dT_bar - dT| = " + fmt(std::abs(rec.dT_s - dT_exact)) +
                                         " > omega * dT_bar = " + fmt(cfg.omega * rec.dT_s));
      }
    }
  }
  if (r.terminated) {
    ++rep.checked["radius_floor"];
    if (r.final_Delta < B.radius_floor) {
      add("radius_floor", rep.iterations, "final Delta " + fmt(r.final_Delta) + " below floor");
    }
  }

  // (c), (d), (e)
  rep.iteration_bound = B.iteration_bound(cfg, static_cast<double>(rep.successes));
  ++rep.checked["iteration_bound"];
  if (static_cast<double>(rep.iterations) > rep.iteration_bound) {
    add("iteration_bound", -1, fmt(rep.iterations) + " iterations > " + fmt(rep.iteration_bound));
  }
  ++rep.checked["successful_bound"];
  if (static_cast<double>(rep.successes) > B.successful_bound) {
    add("successful_bound", -1, fmt(rep.successes) + " successes > " + fmt(B.successful_bound));
  }
  ++rep.checked["eval_bound_f"];
  if (static_cast<double>(rep.f_evals) > B.eval_bound_f) {
    add("eval_bound_f", -1, fmt(rep.f_evals) + " f-evaluations > " + fmt(B.eval_bound_f));
  }
  ++rep.checked["eval_bound_d"];
  if (static_cast<double>(rep.deriv_rounds) > B.eval_bound_d) {
    add("eval_bound_d", -1, fmt(rep.deriv_rounds) + " derivative rounds > " + fmt(B.eval_bound_d));
  }

  // (f) every order is tightened at most i_zeta_min + 1 times
  for (int i = 1; i <= cfg.q; ++i) {
    ++rep.checked["zeta_count"];
    if (i - 1 < static_cast<int>(r.tightenings_per_order.size()) &&
        r.tightenings_per_order[i - 1] > B.i_zeta_min + 1.0) {
      add("zeta_count", -1, "order " + std::to_string(i) + " tightened " +
                                std::to_string(r.tightenings_per_order[i - 1]) + " times > " +
                                fmt(B.i_zeta_min + 1.0));
    }
  }
  // (g)
  for (const auto& ev : r.trace.tightenings) {
    ++rep.checked["accuracy_floor"];
    const double floor = B.accuracy_floor(cfg, ev.j);
    if (ev.max_zeta_after < floor * (1.0 - 1e-12)) {
      add("accuracy_floor", ev.iteration, "order-" + std::to_string(ev.j) + " tightening to " +
                                              fmt(ev.max_zeta_after) + " < " + fmt(floor));
    }
  }
  // (h)
  for (const auto& ev : r.trace.step2) {
    ++rep.checked["step_verify"];
    if (ev.absolute_outcomes > 0) add("step_verify", ev.iteration, "VERIFY returned absolute");
    if (ev.tighten_count > ev.tighten_cap) {
      add("step_verify", ev.iteration, std::to_string(ev.tighten_count) + " tightenings > cap " +
                                           std::to_string(ev.tighten_cap));
    }
    const double xi_floor = cfg.eps[ev.j - 1] / (4.0 * (1.0 + cfg.omega)) *
                            std::pow(cfg.vartheta / std::max(1.0, cfg.Delta_max), ev.j);
    if (ev.min_xi < xi_floor * (1.0 - 1e-12)) {
      add("step_verify", ev.iteration, "xi below its floor");
    }
  }
  // (k)
  if (opt.check_termination && r.terminated) {
    for (int j = 1; j <= std::min(cfg.q, 2); ++j) {
      ++rep.checked["termination"];
      const double phi = phi_exact(p, r.x_eps, j, r.delta_eps);
      const double lim = cfg.eps[j - 1] * std::pow(r.delta_eps, j) / factorial(j);
      if (phi > lim + opt.termination_slack) {
        add("termination", rep.iterations, "phi_" + std::to_string(j) + " = " + fmt(phi) +
                                               " > " + fmt(lim));
      }
    }
  }
  return rep;
}

}  // namespace trqda

#endif  // TRQDA_AUDIT_HPP
