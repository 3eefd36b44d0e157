#ifndef TRQDA_SUBPROBLEM_HPP
#define TRQDA_SUBPROBLEM_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/model.hpp"

namespace trqda {

/// Fraction of the optimal decrement certified by the order-2 ball solver.
inline constexpr double kBallSolverVarsigma = 1.0 - 1e-8;

struct SubproblemOptions {
  double declared_varsigma = 0.99;   // claimed (not certified) for order 3
  std::uint64_t seed = 0;
  int ascent_iterations = 200;
  int random_starts = 8;
};

/// A feasible displacement with its model decrement and the fraction of the
/// ball maximum it is known (or, for order 3, declared) to achieve.
struct DecrementMaximizer {
  Vector d;
  double dT = 0.0;
  double varsigma = 1.0;
  bool certified = true;
};

/// Global minimizer of g'd + 1/2 d'Hd subject to ||d|| <= radius.
///
/// Works in the eigenbasis of H: interior Newton point when H is positive
/// definite and the point is feasible; otherwise the boundary solution of the
/// secular equation ||d(sigma)|| = radius, sigma >= max(0, -lambda_min), solved
/// by Newton on 1/||d(sigma)|| - 1/radius safeguarded by bisection. The hard case
/// (gradient orthogonal to the leftmost eigenspace) is handled explicitly by
/// moving along a leftmost eigenvector to the boundary.
inline Vector solve_ball_quadratic(const Vector& g, const Matrix& H, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball solver: radius must be positive");
  const int n = static_cast<int>(g.size());
  if (H.rows() != n || H.cols() != n) throw std::invalid_argument("ball solver: shape mismatch");

  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (H + H.transpose()));
  const Vector& lambda = eig.eigenvalues();   // ascending
  const Matrix& Q = eig.eigenvectors();
  const Vector gamma = Q.transpose() * g;
  const double lambda_min = lambda(0);
  const double scale = std::max(1.0, lambda.cwiseAbs().maxCoeff());
  const double gnorm = g.norm();

  auto step_at = [&](double sigma) {
    Vector c(n);
    for (int i = 0; i < n; ++i) {
      const double den = lambda(i) + sigma;
      c(i) = den > 0.0 ? -gamma(i) / den : 0.0;
    }
    return Vector(Q * c);
  };
  auto norm_at = [&](double sigma) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double den = lambda(i) + sigma;
      if (den <= 0.0) {
        if (gamma(i) != 0.0) return std::numeric_limits<double>::infinity();
        continue;
      }
      s += gamma(i) * gamma(i) / (den * den);
    }
    return std::sqrt(s);
  };

  if (lambda_min > 0.0) {
    Vector d = step_at(0.0);
    if (d.norm() <= radius) return d;
  }
  if (gnorm == 0.0 && lambda_min >= 0.0) return Vector::Zero(n);

  const double sigma_low = std::max(0.0, -lambda_min);

  // Hard case: the leftmost eigenspace carries (numerically) no gradient and the
  // step that ignores it is strictly inside the ball.
  if (lambda_min <= 0.0) {
    const double cluster = 1e-10 * scale;
    double g_left = 0.0;
    int left = 0;
    for (int i = 0; i < n && lambda(i) - lambda_min <= cluster; ++i, ++left)
      g_left += gamma(i) * gamma(i);
    g_left = std::sqrt(g_left);
    if (g_left <= 1e-9 * std::max(std::abs(lambda_min), 1e-300) * radius) {
      Vector c = Vector::Zero(n);
      for (int i = left; i < n; ++i) c(i) = -gamma(i) / (lambda(i) - lambda_min);
      const double inner = c.norm();
      if (inner <= radius) {
        if (lambda_min == 0.0) return Vector(Q * c);
        const double tau = std::sqrt(std::max(0.0, radius * radius - inner * inner));
        Vector d = Q * c;
        const Vector u = Q.col(0);
        const double sign = u.dot(g) > 0.0 ? -1.0 : 1.0;
        d += sign * tau * u;
        return d;
      }
    }
  }

  // Boundary solution: ||d(sigma)|| is decreasing on (sigma_low, inf).
  double lo = sigma_low;
  double hi = std::max(sigma_low, gnorm / radius - lambda_min) + 1e-300;
  while (norm_at(hi) > radius) hi = 2.0 * hi + 1e-12 * scale;
  double sigma = hi;
  for (int it = 0; it < 500; ++it) {
    const double nrm = norm_at(sigma);
    if (std::abs(nrm - radius) <= 1e-12 * radius) break;
    if (nrm > radius) lo = sigma;
    else hi = sigma;
    if (hi - lo <= 1e-16 * std::max(1.0, hi)) break;
    // Newton step on psi(sigma) = 1/||d|| - 1/radius
    double next = 0.5 * (lo + hi);
    if (std::isfinite(nrm) && nrm > 0.0) {
      double cube = 0.0;
      for (int i = 0; i < n; ++i) {
        const double den = lambda(i) + sigma;
        if (den > 0.0) cube += gamma(i) * gamma(i) / (den * den * den);
      }
      const double psi = 1.0 / nrm - 1.0 / radius;
      const double dpsi = cube / (nrm * nrm * nrm);
      if (dpsi > 0.0) {
        const double newton = sigma - psi / dpsi;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    sigma = next;
  }
  Vector d = step_at(sigma);
  const double dn = d.norm();
  if (dn > radius) d *= radius / dn;
  return d;
}

namespace detail {

inline Vector project_to_ball(const Vector& d, double radius) {
  const double n = d.norm();
  return n > radius ? Vector(d * (radius / n)) : d;
}

/// Projected gradient ascent on the model decrement with backtracking.
inline Vector ascend_decrement(const DerivativeBundle& b, int j, double radius, Vector d,
                               int iterations) {
  double value = taylor_decrement(b, d, j);
  double step = radius;
  for (int it = 0; it < iterations; ++it) {
    const Vector grad = decrement_gradient(b, d, j);
    const double gn = grad.norm();
    if (gn == 0.0) break;
    bool moved = false;
    double t = step / gn;
    for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
      const Vector trial = project_to_ball(d + t * grad, radius);
      const double tv = taylor_decrement(b, trial, j);
      if (tv >= value + 1e-4 * grad.dot(trial - d) && tv > value) {
        moved = (trial - d).norm() > 1e-15 * radius;
        d = trial;
        value = tv;
        step = std::min(2.0 * t * gn, 4.0 * radius);
        break;
      }
    }
    if (!moved) break;
  }
  return d;
}

}  // namespace detail

/// Approximately maximizes the degree-j model decrement over ||d|| <= delta.
///
///   j = 1: d = -delta g/||g|| (exact)
///   j = 2: global ball-constrained quadratic solution
///   j = 3: best of projected ascents from +-delta e_i, random interior points and
///          the order-2 solution; no certificate, declared_varsigma is reported.
///
/// The returned decrement is never negative (d = 0 is always a candidate).
inline DecrementMaximizer max_decrement(const DerivativeBundle& b, int j, double delta,
                                        const SubproblemOptions& opt = {}) {
  if (j < 1 || j > kMaxOrder || j > b.degree()) {
    throw std::invalid_argument("max_decrement: unsupported order " + std::to_string(j));
  }
  if (!(delta > 0.0)) throw std::invalid_argument("max_decrement: delta must be positive");
  const int n = b.dim();
  DecrementMaximizer out;
  out.d = Vector::Zero(n);

  if (j == 1) {
    const Vector g = b.tensor(1).vector();
    const double gn = g.norm();
    if (gn > 0.0) out.d = -delta * g / gn;
    out.dT = std::max(0.0, taylor_decrement(b, out.d, 1));
    return out;
  }

  const Vector g = b.tensor(1).vector();
  const Matrix H = b.tensor(2).matrix();
  Vector quad = solve_ball_quadratic(g, H, delta);
  if (j == 2) {
    const double v = taylor_decrement(b, quad, 2);
    if (v > 0.0) {
      out.d = quad;
      out.dT = v;
    }
    out.varsigma = kBallSolverVarsigma;
    return out;
  }

  std::vector<Vector> starts;
  for (int a = 0; a < n; ++a) {
    starts.push_back(delta * Vector::Unit(n, a));
    starts.push_back(-delta * Vector::Unit(n, a));
  }
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int r = 0; r < opt.random_starts; ++r) {
    Vector v(n);
    for (int a = 0; a < n; ++a) v(a) = normal(rng);
    const double nv = v.norm();
    if (nv > 0.0) v *= delta * std::pow(unif(rng), 1.0 / n) / nv;
    starts.push_back(v);
  }
  starts.push_back(quad);

  double best = 0.0;
  for (const Vector& s0 : starts) {
    const Vector d = detail::ascend_decrement(b, 3, delta, s0, opt.ascent_iterations);
    const double v = taylor_decrement(b, d, 3);
    if (v > best) {
      best = v;
      out.d = d;
    }
  }
  out.dT = best;
  out.varsigma = opt.declared_varsigma;
  out.certified = false;
  return out;
}

}  // namespace trqda

#endif  // TRQDA_SUBPROBLEM_HPP
