#ifndef TRQDA_CONFIG_HPP
#define TRQDA_CONFIG_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/tensor.hpp"

namespace trqda {

/// A violated algorithm-constant constraint.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Constants of the trust-region method with dynamic accuracy.
struct TrConfig {
  int q = 1;
  std::vector<double> eps{1e-3};
  double Delta0 = 1.0;
  double Delta_max = 100.0;
  double vartheta = 0.5;
  double eta1 = 0.05;
  double eta2 = 0.9;
  double gamma1 = 0.25;
  double gamma2 = 0.5;
  double gamma3 = 2.0;
  double omega = 0.0225;
  double varsigma = 0.99;
  double gamma_zeta = 0.1;
  double kappa_zeta = 0.1;
  std::vector<double> zeta0{0.1};
  std::uint64_t seed = 0;
  long max_iterations = 1000000;
  std::set<int> exact_orders;
  /// Upper bound on the accuracy of every function-value request (inf: none).
  double f_accuracy_cap = std::numeric_limits<double>::infinity();

  double eps_min() const { return *std::min_element(eps.begin(), eps.end()); }

  /// Largest admissible omega for the given eta1, eta2 (exclusive).
  static double omega_limit(double eta1, double eta2) {
    return std::min(0.5 * eta1, 0.25 * (1.0 - eta2));
  }

  /// Conventional settings for a given order and tolerance vector:
  /// vartheta = max(min eps, 1/2), omega = 0.9 * omega_limit, zeta0 = kappa_zeta = 0.1.
  static TrConfig defaults(int q, std::vector<double> eps) {
    TrConfig c;
    c.q = q;
    c.eps = std::move(eps);
    if (c.eps.size() == 1 && q > 1) c.eps.assign(q, c.eps.front());
    if (!c.eps.empty()) c.vartheta = std::max(c.eps_min(), 0.5);
    c.omega = 0.9 * omega_limit(c.eta1, c.eta2);
    c.zeta0.assign(q, c.kappa_zeta);
    return c;
  }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const {
    auto fail = [](const std::string& what) { throw ConfigError("invalid configuration: " + what); };
    auto fmt = [](double v) {
      std::ostringstream os;
      os << v;
      return os.str();
    };
    if (q < 1 || q > kMaxOrder) fail("q must lie in [1, 3] (got " + std::to_string(q) + ")");
    if (static_cast<int>(eps.size()) != q) fail("eps needs exactly q entries");
    for (double e : eps)
      if (!(e > 0.0 && e < 1.0)) fail("eps_j must lie in (0, 1) (got " + fmt(e) + ")");
    if (!(vartheta >= eps_min() && vartheta <= 1.0))
      fail("vartheta must lie in [min_j eps_j, 1] (got " + fmt(vartheta) + ")");
    if (!(Delta0 > 0.0)) fail("Delta0 must be positive");
    if (!(Delta0 <= Delta_max)) fail("Delta0 <= Delta_max violated");
    if (!(eta1 > 0.0 && eta1 <= eta2 && eta2 < 1.0)) fail("0 < eta1 <= eta2 < 1 violated");
    if (!(gamma1 > 0.0 && gamma1 < gamma2 && gamma2 < 1.0 && gamma3 > 1.0))
      fail("0 < gamma1 < gamma2 < 1 < gamma3 violated");
    if (!(varsigma > 0.0 && varsigma <= 1.0)) fail("varsigma must lie in (0, 1]");
    const double lim = omega_limit(eta1, eta2);
    if (!(omega > 0.0 && omega < lim))
      fail("omega must lie in (0, min[eta1/2, (1-eta2)/4]) = (0, " + fmt(lim) + ") (got " +
           fmt(omega) + ")");
    if (!(gamma_zeta > 0.0 && gamma_zeta < 1.0)) fail("gamma_zeta must lie in (0, 1)");
    if (static_cast<int>(zeta0.size()) != q) fail("zeta0 needs exactly q entries");
    for (int j = 1; j <= q; ++j) {
      if (exact_orders.count(j)) continue;
      const double z = zeta0[j - 1];
      if (!(z > 0.0)) fail("zeta0_" + std::to_string(j) + " must be positive");
      if (!(z <= kappa_zeta)) fail("zeta0_" + std::to_string(j) + " <= kappa_zeta violated");
    }
    for (int o : exact_orders)
      if (o < 1 || o > q) fail("exact order " + std::to_string(o) + " not in [1, q]");
    if (max_iterations < 0) fail("max_iterations must be nonnegative");
    if (!(f_accuracy_cap > 0.0)) fail("f_accuracy_cap must be positive");
  }
};

}  // namespace trqda

#endif  // TRQDA_CONFIG_HPP
