#ifndef TRQDA_VERIFY_HPP
#define TRQDA_VERIFY_HPP

#include <cmath>
#include <span>
#include <stdexcept>
#include <string_view>

#include "trqda/model.hpp"

namespace trqda {

enum class VerifyOutcome { Relative, Absolute, Insufficient };

inline bool is_sufficient(VerifyOutcome o) { return o != VerifyOutcome::Insufficient; }

inline std::string_view to_string(VerifyOutcome o) {
  switch (o) {
    case VerifyOutcome::Relative:
      return "relative";
    case VerifyOutcome::Absolute:
      return "absolute";
    default:
      return "insufficient";
  }
}

/// Decides whether the derivative accuracies `zetas` (orders 1..r, r = zetas.size())
/// certify a decrement `dT` computed on a ball of radius `delta`:
///
///   Relative      dT > 0 and  sum zeta_i delta^i/i! <= omega * dT
///   Absolute      otherwise, if sum zeta_i delta^i/i! <= omega * xi * delta^r / r!
///   Insufficient  otherwise.
///
/// Both inequalities are inclusive. The guarantees attached to each outcome only
/// hold if the tensors behind dT really are within zeta_i of the exact ones.
inline VerifyOutcome verify(double delta, double dT, std::span<const double> zetas, double xi,
                            double omega) {
  if (!(delta > 0.0)) throw std::invalid_argument("verify: delta must be positive");
  if (!(xi > 0.0)) throw std::invalid_argument("verify: xi must be positive");
  if (!(dT >= 0.0)) throw std::invalid_argument("verify: decrement must be nonnegative");
  if (!(omega > 0.0 && omega <= 1.0)) throw std::invalid_argument("verify: omega not in (0, 1]");
  if (zetas.empty()) throw std::invalid_argument("verify: no accuracies given");

  const int r = static_cast<int>(zetas.size());
  const double err = decrement_error_bound(zetas, delta, r);
  if (dT > 0.0 && err <= omega * dT) return VerifyOutcome::Relative;
  if (err <= omega * xi * std::pow(delta, r) / factorial(r)) return VerifyOutcome::Absolute;
  return VerifyOutcome::Insufficient;
}

}  // namespace trqda

#endif  // TRQDA_VERIFY_HPP
