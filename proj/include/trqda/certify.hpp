#ifndef TRQDA_CERTIFY_HPP
#define TRQDA_CERTIFY_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "trqda/oracle.hpp"
#include "trqda/subproblem.hpp"
#include "trqda/verify.hpp"

namespace trqda {

/// Current absolute accuracies zeta_1..zeta_q requested from the oracle.
///
/// Accuracies only ever shrink: tighten(j) multiplies zeta_1..zeta_j by
/// gamma_zeta and bumps the global counter i_zeta. Orders in the exact set keep
/// zeta = 0.
class AccuracyLedger {
 public:
  AccuracyLedger(std::vector<double> zeta0, double gamma_zeta, double kappa_zeta,
                 std::set<int> exact_orders = {})
      : zetas_(std::move(zeta0)),
        tightenings_(zetas_.size(), 0),
        gamma_zeta_(gamma_zeta),
        kappa_zeta_(kappa_zeta),
        exact_(std::move(exact_orders)) {
    if (zetas_.empty() || zetas_.size() > static_cast<std::size_t>(kMaxOrder)) {
      throw std::invalid_argument("AccuracyLedger: need 1..3 initial accuracies");
    }
    if (!(gamma_zeta > 0.0 && gamma_zeta < 1.0)) {
      throw std::invalid_argument("AccuracyLedger: gamma_zeta must lie in (0, 1)");
    }
    for (int i = 1; i <= order(); ++i) {
      if (exact_.count(i)) {
        zetas_[i - 1] = 0.0;
        continue;
      }
      if (!(zetas_[i - 1] > 0.0)) {
        throw std::invalid_argument("AccuracyLedger: zeta_" + std::to_string(i) +
                                    " must be positive");
      }
      if (zetas_[i - 1] > kappa_zeta) {
        throw std::invalid_argument("AccuracyLedger: zeta_" + std::to_string(i) +
                                    " exceeds kappa_zeta");
      }
    }
  }

  int order() const { return static_cast<int>(zetas_.size()); }
  double zeta(int i) const { return zetas_.at(i - 1); }
  const std::vector<double>& zetas() const { return zetas_; }
  std::vector<double> zetas(int j) const { return {zetas_.begin(), zetas_.begin() + j}; }
  int i_zeta() const { return i_zeta_; }
  int tightenings(int i) const { return tightenings_.at(i - 1); }
  double gamma_zeta() const { return gamma_zeta_; }
  double kappa_zeta() const { return kappa_zeta_; }
  bool is_exact(int i) const { return exact_.count(i) > 0; }

  double max_zeta(int j) const {
    return *std::max_element(zetas_.begin(), zetas_.begin() + j);
  }

  void tighten(int j) {
    if (j < 1 || j > order()) throw std::invalid_argument("AccuracyLedger: bad order");
    for (int i = 1; i <= j; ++i) {
      if (exact_.count(i)) continue;
      zetas_[i - 1] *= gamma_zeta_;
      ++tightenings_[i - 1];
    }
    ++i_zeta_;
  }

 private:
  std::vector<double> zetas_;
  std::vector<int> tightenings_;
  int i_zeta_ = 0;
  double gamma_zeta_;
  double kappa_zeta_;
  std::set<int> exact_;
};

/// Derivative tensors at the current iterate, reused while both the point and
/// the accuracy requested for their order are unchanged.
class DerivativeCache {
 public:
  /// Returns tensors of orders 1..j at x meeting the ledger's current accuracies,
  /// calling the oracle only for orders whose cached entry is stale.
  DerivativeBundle bundle(const Vector& x, int j, const AccuracyLedger& acc,
                          InexactOracle& oracle, EvalLedger& evals) {
    if (entries_.size() < static_cast<std::size_t>(j)) entries_.resize(j);
    bool evaluated = false;
    DerivativeBundle b;
    b.x = x;
    for (int i = 1; i <= j; ++i) {
      Entry& e = entries_[i - 1];
      const double zeta = acc.zeta(i);
      if (!e.valid || e.zeta != zeta || e.x.size() != x.size() || e.x != x) {
        e.tensor = oracle.eval_deriv(x, i, zeta, evals);
        e.x = x;
        e.zeta = zeta;
        e.valid = true;
        evaluated = true;
      }
      b.tensors.push_back(e.tensor);
      b.error_bounds.push_back(zeta);
    }
    if (evaluated) ++rounds_;
    return b;
  }

  /// Number of bundle requests that triggered at least one oracle call.
  long rounds() const { return rounds_; }

 private:
  struct Entry {
    bool valid = false;
    Vector x;
    double zeta = 0.0;
    SymTensor tensor;
  };
  std::vector<Entry> entries_;
  long rounds_ = 0;
};

/// One accuracy tightening, kept for the accuracy-floor audit.
struct TighteningEvent {
  int iteration = 0;
  int j = 0;
  double delta = 0.0;           // radius of the VERIFY call that failed
  double max_zeta_after = 0.0;  // max_{i<=j} zeta_i after tightening
  bool in_step2 = false;
};

/// Outcome summary of one detailed Step-2 solve.
struct Step2Event {
  int iteration = 0;
  int j = 0;
  int tighten_count = 0;
  int tighten_cap = 0;
  int absolute_outcomes = 0;
  double min_xi = 0.0;
};

/// Instrumentation shared by the certification, step and driver layers.
struct RunTrace {
  int iteration = 0;
  std::vector<TighteningEvent> tightenings;
  std::vector<Step2Event> step2;
  std::vector<std::string> warnings;
};

/// Mutable state threaded through one run.
struct EvalContext {
  InexactOracle& oracle;
  EvalLedger& evals;
  AccuracyLedger& accuracy;
  DerivativeCache& cache;
  RunTrace* trace = nullptr;
  SubproblemOptions subproblem{};
};

struct CertifiedDecrement {
  int j = 0;
  Vector d;
  double dT = 0.0;
  VerifyOutcome outcome = VerifyOutcome::Insufficient;
  double varsigma_used = 1.0;
  int tightenings = 0;
  DerivativeBundle bundle;   // the tensors dT was computed from
};

/// Bound on the tightenings one certified_decrement call can need when
/// starting from accuracies no larger than kappa_zeta.
inline int certified_decrement_tighten_cap(int j, double delta, double eps_j, double varsigma,
                                           double omega, double gamma_zeta, double kappa_zeta) {
  const double target = omega * varsigma * eps_j * std::pow(delta, j - 1) / (4.0 * factorial(j));
  if (target >= kappa_zeta) return 1;
  return static_cast<int>(std::ceil(std::log(target / kappa_zeta) / std::log(gamma_zeta))) + 1;
}

/// Computes a certified order-j decrement at x on the ball of radius delta:
/// evaluate tensors at the current accuracies, maximize the model decrement,
/// VERIFY it with xi = varsigma*eps_j/2 and tighten all accuracies 1..j until
/// the outcome is Relative or Absolute. Never evaluates f.
inline CertifiedDecrement certified_decrement(const Vector& x, int j, double delta, double eps_j,
                                              double varsigma, double omega, EvalContext& ctx) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw std::invalid_argument("certified_decrement: delta must lie in (0, 1]");
  }
  if (!(eps_j > 0.0 && eps_j <= 1.0)) {
    throw std::invalid_argument("certified_decrement: eps_j must lie in (0, 1]");
  }
  CertifiedDecrement cert;
  cert.j = j;
  // A solver delivering less than the configured fraction weakens the Absolute certificate.
  const double solver_varsigma = j == 1 ? 1.0 : j == 2 ? kBallSolverVarsigma
                                                       : ctx.subproblem.declared_varsigma;
  cert.varsigma_used = std::min(varsigma, solver_varsigma);
  const double xi = 0.5 * cert.varsigma_used * eps_j;
  // Termination is guaranteed long before this.
  constexpr int kMaxTightenings = 400;
  for (;;) {
    cert.bundle = ctx.cache.bundle(x, j, ctx.accuracy, ctx.oracle, ctx.evals);
    SubproblemOptions opt = ctx.subproblem;
    opt.seed += static_cast<std::uint64_t>(ctx.accuracy.i_zeta());
    const DecrementMaximizer m = max_decrement(cert.bundle, j, delta, opt);
    cert.d = m.d;
    cert.dT = m.dT;
    const std::vector<double> zetas = ctx.accuracy.zetas(j);
    cert.outcome = verify(delta, cert.dT, zetas, xi, omega);
    if (is_sufficient(cert.outcome)) return cert;
    if (cert.tightenings >= kMaxTightenings) {
      throw std::logic_error("certified_decrement: accuracy tightening did not terminate");
    }
    ctx.accuracy.tighten(j);
    ++cert.tightenings;
    if (ctx.trace) {
      ctx.trace->tightenings.push_back(
          {ctx.trace->iteration, j, delta, ctx.accuracy.max_zeta(j), false});
    }
  }
}

struct Terminated {
  Vector x;
  double delta = 0.0;
  std::vector<CertifiedDecrement> certificates;   // one per order 1..q
};

struct Continue {
  int j = 0;
  CertifiedDecrement cert;
};

/// Threshold above which an order-j decrement proves x is not yet approximately optimal.
inline double termination_threshold(double eps_j, double omega, double delta, int j) {
  return eps_j / (1.0 + omega) * std::pow(delta, j) / factorial(j);
}

/// For j = 1..q, certify the order-j decrement and stop at the first one above
/// the termination threshold. If none is, x is an approximate q-th order minimizer.
inline std::variant<Terminated, Continue> termination_test(const Vector& x, double delta,
                                                           const std::vector<double>& eps,
                                                           double varsigma, double omega,
                                                           EvalContext& ctx) {
  Terminated done;
  const int q = static_cast<int>(eps.size());
  for (int j = 1; j <= q; ++j) {
    CertifiedDecrement cert = certified_decrement(x, j, delta, eps[j - 1], varsigma, omega, ctx);
    if (cert.dT > termination_threshold(eps[j - 1], omega, delta, j)) {
      return Continue{j, std::move(cert)};
    }
    done.certificates.push_back(std::move(cert));
  }
  done.x = x;
  done.delta = delta;
  return done;
}

}  // namespace trqda

#endif  // TRQDA_CERTIFY_HPP
