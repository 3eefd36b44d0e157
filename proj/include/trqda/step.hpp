#ifndef TRQDA_STEP_HPP
#define TRQDA_STEP_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/certify.hpp"

namespace trqda {

struct StepResult {
  Vector s;
  double dT_s = 0.0;
  VerifyOutcome outcome = VerifyOutcome::Relative;
  int tighten_count = 0;
  bool used_fallback = false;
  bool pass_through = false;
};

/// Trial step of length <= radius from the order-j model: steepest descent to
/// the boundary, the ball-constrained quadratic solution, or multi-start ascent.
inline Vector step_solver(const DerivativeBundle& b, int j, double radius,
                          const SubproblemOptions& opt = {}) {
  return max_decrement(b, j, radius, opt).d;
}

/// Last VERIFY argument of the detailed step: eps_j/(4(1+omega)) (vartheta/max(vartheta,||s||))^j.
inline double step_verify_xi(double eps_j, double omega, double vartheta, double step_norm, int j) {
  return eps_j / (4.0 * (1.0 + omega)) * std::pow(vartheta / std::max(vartheta, step_norm), j);
}

/// Tightenings after which the detailed step must return Relative.
inline int step_tighten_cap(int j, double eps_j, double omega, double vartheta,
                            double max_zeta_on_entry, double gamma_zeta) {
  const double threshold =
      omega * std::pow(vartheta, j - 1) * eps_j / (8.0 * factorial(j) * (1.0 + omega));
  if (max_zeta_on_entry <= threshold) return 0;
  return static_cast<int>(std::ceil(std::log(threshold / max_zeta_on_entry) /
                                    std::log(gamma_zeta)));
}

/// Step computation. With Delta <= vartheta the certified displacement d_{k,j}
/// is the step. Otherwise a step of length <= Delta is computed from the order-j
/// model and accepted once VERIFY certifies its decrement as Relative. When it
/// does not, d_{k,j} (length <= vartheta) is tried under the same tensors; only if
/// neither certifies are zeta_1..zeta_j tightened and the step recomputed.
inline StepResult compute_step(const Vector& x, double Delta, double vartheta,
                               const CertifiedDecrement& cert, double eps_j, double omega,
                               EvalContext& ctx) {
  StepResult out;
  const int j = cert.j;
  if (Delta <= vartheta) {
    out.s = cert.d;
    out.dT_s = cert.dT;
    out.pass_through = true;
    return out;
  }

  Step2Event event;
  event.j = j;
  event.iteration = ctx.trace ? ctx.trace->iteration : 0;
  event.tighten_cap = step_tighten_cap(j, eps_j, omega, vartheta, ctx.accuracy.max_zeta(j),
                                       ctx.accuracy.gamma_zeta());
  event.min_xi = std::numeric_limits<double>::infinity();
  const double absolute_threshold =
      omega * std::pow(vartheta, j - 1) * eps_j / (8.0 * factorial(j) * (1.0 + omega));

  auto check = [&](const Vector& s, double dT) {
    const double xi = step_verify_xi(eps_j, omega, vartheta, s.norm(), j);
    event.min_xi = std::min(event.min_xi, xi);
    const double radius = s.norm() > 0.0 ? s.norm() : vartheta;
    const VerifyOutcome o = verify(radius, std::max(0.0, dT), ctx.accuracy.zetas(j), xi, omega);
    if (o == VerifyOutcome::Absolute) {
      ++event.absolute_outcomes;
      if (ctx.accuracy.max_zeta(j) <= absolute_threshold) {
        throw std::logic_error("compute_step: VERIFY returned absolute with accuracies below the "
                               "guaranteed-relative threshold");
      }
      if (ctx.trace) {
        ctx.trace->warnings.push_back("iteration " + std::to_string(event.iteration) +
                                      ": step VERIFY returned absolute");
      }
    }
    return o;
  };
  auto finish = [&](Vector s, double dT, bool fallback) {
    out.s = std::move(s);
    out.dT_s = dT;
    out.outcome = VerifyOutcome::Relative;
    out.used_fallback = fallback;
    event.tighten_count = out.tighten_count;
    if (ctx.trace) ctx.trace->step2.push_back(event);
    return out;
  };

  constexpr int kMaxTightenings = 400;
  for (;;) {
    const DerivativeBundle b = ctx.cache.bundle(x, j, ctx.accuracy, ctx.oracle, ctx.evals);
    SubproblemOptions opt = ctx.subproblem;
    opt.seed += 7919u + static_cast<std::uint64_t>(ctx.accuracy.i_zeta());
    Vector s = step_solver(b, j, Delta, opt);
    const double dT_s = taylor_decrement(b, s, j);
    const double dT_d = taylor_decrement(b, cert.d, j);
    if (dT_s >= dT_d && check(s, dT_s) == VerifyOutcome::Relative) {
      return finish(std::move(s), dT_s, false);
    }
    if (check(cert.d, dT_d) == VerifyOutcome::Relative) return finish(cert.d, dT_d, true);
    if (out.tighten_count >= kMaxTightenings) {
      throw std::logic_error("compute_step: accuracy tightening did not terminate");
    }
    ctx.accuracy.tighten(j);
    ++out.tighten_count;
    if (ctx.trace) {
      ctx.trace->tightenings.push_back(
          {ctx.trace->iteration, j, vartheta, ctx.accuracy.max_zeta(j), true});
    }
  }
}

}  // namespace trqda

#endif  // TRQDA_STEP_HPP
