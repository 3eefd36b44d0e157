#ifndef TRQDA_BOUNDS_HPP
#define TRQDA_BOUNDS_HPP

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "trqda/config.hpp"
#include "trqda/model.hpp"

namespace trqda {

struct BoundConstants {
  double L_f = 1.0;
  double kappa_Delta = 0.0;
  double kappa_delta = 0.0;
  double kappa_s = 0.0;
  double kappa_a = 0.0;
  double kappa_b = 0.0;
  double kappa_c = 0.0;
  double kappa_d = 0.0;
  double kappa_e = 0.0;
  double kappa_f = 0.0;
  double kappa_acc = 0.0;
  double i_zeta_min = 0.0;
  double successful_bound = 0.0;   // kappa_s (f0 - f_low) / eps_min^(q+1)
  double eval_bound_f = 0.0;
  double eval_bound_d = 0.0;
  double eval_bound_d_direct = 0.0;   // successful_bound + i_zeta_min + 1
  double decrease_floor = 0.0;        // per successful iteration
  double radius_floor = 0.0;          // kappa_delta eps_min

  /// Iteration bound for a run with `successes` successful iterations.
  double iteration_bound(const TrConfig& cfg, double successes) const {
    const double lg2 = std::abs(std::log(cfg.gamma2));
    return successes * (1.0 + std::log(cfg.gamma3) / lg2) +
           std::abs(std::log(radius_floor / cfg.Delta0)) / lg2;
  }

  /// Smallest max_{i<=j} zeta_i an order-j tightening may produce.
  double accuracy_floor(const TrConfig& cfg, int j) const {
    return cfg.gamma_zeta * cfg.varsigma * cfg.omega / (8.0 * (1.0 + cfg.omega)) *
           cfg.eps[j - 1] * std::pow(radius_floor, j - 1) / factorial(j);
  }
};

/// Complexity constants of the method. L_f is max(1, max_j L_{f,j});
/// deriv_norms_x0[i-1] = ||grad^i f(x0)|| for i = 1..q.
inline BoundConstants compute_bounds(const TrConfig& cfg, double L_f, double f0, double f_low,
                                     const std::vector<double>& deriv_norms_x0) {
  cfg.validate();
  if (!std::isfinite(L_f) || !std::isfinite(f0) || !std::isfinite(f_low)) {
    throw std::invalid_argument("compute_bounds: nonfinite input");
  }
  if (f0 < f_low) throw std::invalid_argument("compute_bounds: f0 below f_low");
  if (static_cast<int>(deriv_norms_x0.size()) < cfg.q) {
    throw std::invalid_argument("compute_bounds: need q derivative norms at x0");
  }
  for (double v : deriv_norms_x0)
    if (!std::isfinite(v)) throw std::invalid_argument("compute_bounds: nonfinite input");

  const int q = cfg.q;
  const double eps_min = cfg.eps_min();
  BoundConstants c;
  c.L_f = std::max(1.0, L_f);
  const double delta0 = std::min(cfg.Delta0, cfg.vartheta);
  const double max_norm =
      *std::max_element(deriv_norms_x0.begin(), deriv_norms_x0.begin() + q);
  c.kappa_Delta = cfg.gamma1 * (1.0 - cfg.eta2) / c.L_f *
                  std::min(cfg.vartheta, cfg.Delta0 * std::pow(delta0, q) /
                                             (2.0 * q * (max_norm + cfg.kappa_zeta)));
  c.kappa_delta = c.kappa_Delta / (1.0 + cfg.omega);
  c.kappa_s = factorial(q) / ((cfg.eta1 - 2.0 * cfg.omega) * std::pow(c.kappa_delta, q + 1));

  const double lg2 = std::abs(std::log(cfg.gamma2));
  const double lgz = std::abs(std::log(cfg.gamma_zeta));
  c.kappa_a = 2.0 * c.kappa_s * (1.0 + std::log(cfg.gamma3) / lg2);
  c.kappa_b = 2.0 / lg2;
  c.kappa_c = 2.0 / lg2 * std::abs(std::log(c.kappa_delta / cfg.Delta0)) + 2.0 / lgz + 2.0;

  c.kappa_acc = cfg.varsigma * cfg.omega * std::pow(c.kappa_delta, q - 1) / (8.0 * (1.0 + cfg.omega));
  c.i_zeta_min = std::floor((q * std::log(eps_min) + std::log(c.kappa_acc / cfg.kappa_zeta)) /
                            std::log(cfg.gamma_zeta));
  c.kappa_d = c.kappa_s;
  c.kappa_e = q / lgz;
  c.kappa_f = std::abs(std::log(c.kappa_acc / cfg.kappa_zeta)) / lgz + 2.0;

  const double gap = f0 - f_low;
  const double eps_pow = std::pow(eps_min, q + 1);
  const double log_eps = std::abs(std::log(eps_min));
  c.successful_bound = c.kappa_s * gap / eps_pow;
  c.eval_bound_f = c.kappa_a * gap / eps_pow + c.kappa_b * log_eps + c.kappa_c;
  c.eval_bound_d = c.kappa_d * gap / eps_pow + c.kappa_e * log_eps + c.kappa_f;
  c.eval_bound_d_direct = c.successful_bound + c.i_zeta_min + 1.0;
  c.decrease_floor = (cfg.eta1 - 2.0 * cfg.omega) * std::pow(c.kappa_delta, q + 1) * eps_pow /
                     factorial(q);
  c.radius_floor = c.kappa_delta * eps_min;
  return c;
}

}  // namespace trqda

#endif  // TRQDA_BOUNDS_HPP
