#ifndef TRQDA_REFERENCE_HPP
#define TRQDA_REFERENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "trqda/oracle.hpp"
#include "trqda/subproblem.hpp"

namespace trqda {

struct GridSpec {
  int resolution = 16;    // points per coordinate on [-delta, delta]
  int refinements = 10;   // best samples polished locally
  int polish_iterations = 2000;
};

namespace detail {

inline DerivativeBundle exact_bundle(const Problem& p, const Vector& x, int j) {
  DerivativeBundle b;
  b.x = x;
  for (int i = 1; i <= j; ++i) {
    b.tensors.push_back(p.derivative(x, i));
    b.error_bounds.push_back(0.0);
  }
  return b;
}

// Polynomial model decrement written out term by term from the tensors,
// kept separate from the library's evaluation path.
inline double ref_decrement(const std::vector<SymTensor>& t, const Vector& d) {
  const int n = static_cast<int>(d.size());
  double v = 0.0;
  for (int a = 0; a < n; ++a) v -= t[0](a) * d(a);
  if (t.size() >= 2) {
    double q = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) q += t[1](a, b) * d(a) * d(b);
    v -= q / 2.0;
  }
  if (t.size() >= 3) {
    double c = 0.0;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int e = 0; e < n; ++e) c += t[2](a, b, e) * d(a) * d(b) * d(e);
    v -= c / 6.0;
  }
  return v;
}

inline Vector ref_decrement_gradient(const std::vector<SymTensor>& t, const Vector& d) {
  const int n = static_cast<int>(d.size());
  Vector g(n);
  for (int a = 0; a < n; ++a) {
    double v = -t[0](a);
    if (t.size() >= 2)
      for (int b = 0; b < n; ++b) v -= t[1](a, b) * d(b);
    if (t.size() >= 3)
      for (int b = 0; b < n; ++b)
        for (int e = 0; e < n; ++e) v -= 0.5 * t[2](a, b, e) * d(b) * d(e);
    g(a) = v;
  }
  return g;
}

inline Vector ref_project(const Vector& d, double r) {
  const double n = d.norm();
  return n > r ? Vector(d * (r / n)) : d;
}

}  // namespace detail

/// Brute-force lower estimate of phi_{f,j}^delta(x) = max_{||d||<=delta} of the
/// exact order-j decrement: a full grid on the cube, each point pulled onto the
/// ball, followed by projected-gradient polish of the best samples. n <= 5.
inline double phi_reference(const Problem& p, const Vector& x, int j, double delta,
                            const GridSpec& spec = {}) {
  const int n = p.dim();
  if (n > 5) throw std::invalid_argument("phi_reference: dimension above 5");
  if (spec.resolution < 16) throw std::invalid_argument("phi_reference: resolution below 16");
  if (j < 1 || j > 3 || j > p.max_order()) throw std::invalid_argument("phi_reference: bad order");
  if (!(delta > 0.0)) throw std::invalid_argument("phi_reference: delta must be positive");

  std::vector<SymTensor> t;
  for (int i = 1; i <= j; ++i) t.push_back(p.derivative(x, i));

  const int r = spec.resolution;
  long total = 1;
  for (int a = 0; a < n; ++a) total *= r;

  const int keep = std::max(1, spec.refinements);
  std::vector<std::pair<double, Vector>> best;   // ascending by value, size <= keep
  Vector d(n);
  std::vector<int> idx(n, 0);
  for (long c = 0; c < total; ++c) {
    long rem = c;
    for (int a = 0; a < n; ++a) {
      idx[a] = static_cast<int>(rem % r);
      rem /= r;
      d(a) = -delta + 2.0 * delta * idx[a] / (r - 1);
    }
    const Vector dp = detail::ref_project(d, delta);
    const double v = detail::ref_decrement(t, dp);
    if (static_cast<int>(best.size()) < keep || v > best.front().first) {
      if (static_cast<int>(best.size()) == keep) best.erase(best.begin());
      auto pos = std::lower_bound(best.begin(), best.end(), v,
                                  [](const auto& e, double val) { return e.first < val; });
      best.insert(pos, {v, dp});
    }
  }

  double result = 0.0;   // d = 0
  for (auto& [v0, d0] : best) {
    Vector cur = d0;
    double val = v0;
    double step = delta;
    for (int it = 0; it < spec.polish_iterations && step > 1e-16 * delta; ++it) {
      const Vector g = detail::ref_decrement_gradient(t, cur);
      const double gn = g.norm();
      if (gn == 0.0) break;
      const Vector trial = detail::ref_project(cur + (step / gn) * g, delta);
      const double tv = detail::ref_decrement(t, trial);
      if (tv > val) {
        cur = trial;
        val = tv;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    result = std::max(result, val);
  }
  return result;
}

/// Closed-form phi for j = 1 (delta ||g||) and j = 2 (global ball solution).
inline double phi_exact(const Problem& p, const Vector& x, int j, double delta) {
  const Vector g = p.derivative(x, 1).vector();
  if (j == 1) return delta * g.norm();
  if (j == 2) {
    const Matrix H = p.derivative(x, 2).matrix();
    const Vector d = solve_ball_quadratic(g, H, delta);
    return std::max(0.0, -g.dot(d) - 0.5 * d.dot(H * d));
  }
  throw std::invalid_argument("phi_exact: no closed form for order " + std::to_string(j));
}

struct LipschitzEstimate {
  double raw = 0.0;
  double inflated = 0.0;
};

/// Sampled estimate of the Lipschitz constant of the order-j derivative on the
/// box [lo, hi]: the largest ||D^j f(x) - D^j f(y)|| / ||x - y|| over random
/// pairs (half of them close pairs), reported raw and times the inflation factor.
inline LipschitzEstimate lipschitz_estimate(const Problem& p, const Vector& lo, const Vector& hi,
                                            int order, int samples = 2000,
                                            std::uint64_t seed = 1, double inflation = 1.5) {
  const int n = p.dim();
  if (lo.size() != n || hi.size() != n) throw std::invalid_argument("lipschitz_estimate: box shape");
  if (order < 1 || order > p.max_order()) throw std::invalid_argument("lipschitz_estimate: order");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal;
  const double width = std::max(1e-12, (hi - lo).norm());
  auto point = [&] {
    Vector v(n);
    for (int a = 0; a < n; ++a) v(a) = lo(a) + (hi(a) - lo(a)) * unif(rng);
    return v;
  };
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const Vector x = point();
    Vector y;
    if (s % 2 == 0) {
      y = point();
    } else {
      Vector u(n);
      for (int a = 0; a < n; ++a) u(a) = normal(rng);
      y = x + (1e-3 * width / std::max(u.norm(), 1e-300)) * u;
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    const SymTensor diff = p.derivative(x, order) - p.derivative(y, order);
    const double num = order == 3 ? diff.frobenius_norm() : operator_norm(diff);
    best = std::max(best, num / dist);
  }
  return {best, inflation * best};
}

}  // namespace trqda

#endif  // TRQDA_REFERENCE_HPP
