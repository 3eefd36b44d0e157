#ifndef TRQDA_DRIVER_HPP
#define TRQDA_DRIVER_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <stdexcept>
#include <variant>
#include <vector>

#include "trqda/certify.hpp"
#include "trqda/config.hpp"
#include "trqda/step.hpp"

namespace trqda {

struct IterationRecord {
  long k = 0;
  double Delta = 0.0;   // radius used in this iteration
  double delta = 0.0;   // min(Delta, vartheta)
  int j = 0;            // order whose decrement drove the step
  double rho = 0.0;
  bool successful = false;
  double dT_s = 0.0;
  double f_bar_old = 0.0;
  double f_bar_new = 0.0;
  double f_acc = 0.0;       // accuracy requested for f at x_k + s_k
  double f_acc_old = 0.0;   // accuracy of the stored f-bar(x_k)
  int i_zeta = 0;
  long f_evals = 0;         // cumulative
  long deriv_evals = 0;     // cumulative oracle calls for orders >= 1
  long deriv_rounds = 0;    // cumulative bundle requests that evaluated
  bool step1_skipped = false;
  int step2_tightenings = 0;
  bool step_fallback = false;
  Vector x;                 // iterate x_k
  Vector s;                 // trial step
};

struct RunResult {
  Vector x_eps;
  double delta_eps = 0.0;
  double final_Delta = 0.0;
  bool terminated = false;
  std::vector<IterationRecord> history;
  EvalLedger evals;
  RunTrace trace;
  std::vector<double> final_zetas;
  std::vector<int> tightenings_per_order;
  int i_zeta = 0;
  long deriv_rounds = 0;
  std::vector<CertifiedDecrement> certificates;   // termination certificates

  long iterations() const { return static_cast<long>(history.size()); }
  long successful() const {
    return std::count_if(history.begin(), history.end(),
                         [](const IterationRecord& r) { return r.successful; });
  }
};

using IterationSink = std::function<void(const IterationRecord&)>;

/// Radius update after an iteration with ratio rho.
inline double update_radius(const TrConfig& cfg, double Delta, double rho) {
  if (rho < cfg.eta1) return cfg.gamma2 * Delta;
  if (rho < cfg.eta2) return Delta;
  return std::min(cfg.Delta_max, cfg.gamma3 * Delta);
}

/// Runs the trust-region method with dynamic accuracy from x0.
inline RunResult run(InexactOracle& oracle, const TrConfig& cfg, const Vector& x0,
                     const IterationSink& sink = {}, const SubproblemOptions& sub = {}) {
  cfg.validate();
  if (x0.size() != oracle.problem().dim()) {
    throw std::invalid_argument("run: starting point has the wrong dimension");
  }
  if (cfg.q > oracle.problem().max_order()) {
    throw std::invalid_argument("run: problem provides derivatives only up to order " +
                                std::to_string(oracle.problem().max_order()));
  }

  RunResult res;
  AccuracyLedger accuracy(cfg.zeta0, cfg.gamma_zeta, cfg.kappa_zeta, cfg.exact_orders);
  DerivativeCache cache;
  SubproblemOptions opt = sub;
  opt.seed ^= cfg.seed * 0x9E3779B97F4A7C15ull;
  EvalContext ctx{oracle, res.evals, accuracy, cache, &res.trace, opt};

  Vector x = x0;
  double Delta = cfg.Delta0;
  bool have_fbar = false;
  double fbar = 0.0;
  double fbar_acc = 0.0;
  bool skip_step1 = false;
  Continue cont;

  for (long k = 0;; ++k) {
    if (k >= cfg.max_iterations) {
      res.terminated = false;
      res.x_eps = x;
      res.delta_eps = std::min(Delta, cfg.vartheta);
      break;
    }
    res.trace.iteration = static_cast<int>(k);
    const double delta = std::min(Delta, cfg.vartheta);

    IterationRecord rec;
    rec.k = k;
    rec.Delta = Delta;
    rec.delta = delta;
    rec.x = x;
    rec.step1_skipped = skip_step1;

    // Step 1
    if (!skip_step1) {
      auto outcome = termination_test(x, delta, cfg.eps, cfg.varsigma, cfg.omega, ctx);
      if (auto* done = std::get_if<Terminated>(&outcome)) {
        res.terminated = true;
        res.x_eps = done->x;
        res.delta_eps = done->delta;
        res.certificates = std::move(done->certificates);
        break;
      }
      cont = std::get<Continue>(std::move(outcome));
    }
    const int j = cont.j;
    rec.j = j;

    // Step 2
    const StepResult step =
        compute_step(x, Delta, cfg.vartheta, cont.cert, cfg.eps[j - 1], cfg.omega, ctx);
    if (!(step.dT_s > 0.0)) throw std::logic_error("run: nonpositive model decrease");
    rec.dT_s = step.dT_s;
    rec.s = step.s;
    rec.step2_tightenings = step.tighten_count;
    rec.step_fallback = step.used_fallback;

    // Step 3
    const double acc = std::min(cfg.omega * step.dT_s, cfg.f_accuracy_cap);
    if (!(acc >= std::numeric_limits<double>::min())) {
      throw std::runtime_error("run: requested function accuracy " + std::to_string(acc) +
                               " underflowed at iteration " + std::to_string(k) +
                               "; the tolerance is below what double precision resolves here");
    }
    const Vector trial = x + step.s;
    const double fbar_new = oracle.eval_f(trial, acc, res.evals);
    if (!have_fbar || fbar_acc > acc) {
      fbar = oracle.eval_f(x, acc, res.evals);
      fbar_acc = acc;
      have_fbar = true;
    }
    const double rho = (fbar - fbar_new) / step.dT_s;
    rec.f_bar_old = fbar;
    rec.f_bar_new = fbar_new;
    rec.f_acc = acc;
    rec.f_acc_old = fbar_acc;
    rec.rho = rho;
    rec.successful = rho >= cfg.eta1;

    // Step 4
    const double Delta_next = update_radius(cfg, Delta, rho);
    if (rec.successful) {
      x = trial;
      fbar = fbar_new;
      fbar_acc = acc;
    }
    skip_step1 = !rec.successful && Delta_next >= cfg.vartheta;
    Delta = Delta_next;

    rec.i_zeta = accuracy.i_zeta();
    rec.f_evals = res.evals.f_evals();
    rec.deriv_evals = res.evals.deriv_evals();
    rec.deriv_rounds = cache.rounds();
    if (sink) sink(rec);
    res.history.push_back(std::move(rec));
  }

  res.final_Delta = Delta;
  res.final_zetas = accuracy.zetas();
  for (int i = 1; i <= cfg.q; ++i) res.tightenings_per_order.push_back(accuracy.tightenings(i));
  res.i_zeta = accuracy.i_zeta();
  res.deriv_rounds = cache.rounds();
  return res;
}

}  // namespace trqda

#endif  // TRQDA_DRIVER_HPP
