// Shared helpers for the test suites: random data, independent contractions
// and a cubic test problem with all three derivatives.
#ifndef TRQDA_TESTS_SUPPORT_HPP
#define TRQDA_TESTS_SUPPORT_HPP

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "trqda/trqda.hpp"

namespace testing_support {

using trqda::Matrix;
using trqda::SymTensor;
using trqda::Vector;

// Full n^order loop, no symmetry shortcuts.
inline double naive_apply(const SymTensor& t, const Vector& s) {
  const int n = t.dim();
  double acc = 0.0;
  switch (t.order()) {
    case 1:
      for (int a = 0; a < n; ++a) acc += t(a) * s(a);
      break;
    case 2:
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) acc += t(a, b) * s(a) * s(b);
      break;
    default:
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int c = 0; c < n; ++c) acc += t(a, b, c) * s(a) * s(b) * s(c);
  }
  return acc;
}

inline double naive_decrement(const std::vector<SymTensor>& t, const Vector& s) {
  double fact = 1.0, acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    fact *= static_cast<double>(i + 1);
    acc -= naive_apply(t[i], s) / fact;
  }
  return acc;
}

inline Vector random_vector(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (int a = 0; a < n; ++a) v(a) = scale * nd(rng);
  return v;
}

inline Vector random_unit(std::mt19937_64& rng, int n) {
  Vector v = random_vector(rng, n);
  while (v.norm() == 0.0) v = random_vector(rng, n);
  return v.normalized();
}

// Uniform in the ball of radius r.
inline Vector random_in_ball(std::mt19937_64& rng, int n, double r) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return random_unit(rng, n) * (r * std::pow(u(rng), 1.0 / n));
}

inline SymTensor random_sym(std::mt19937_64& rng, int order, int n, double scale = 1.0) {
  std::normal_distribution<double> nd;
  std::vector<double> e(static_cast<std::size_t>(std::pow(n, order)));
  for (double& v : e) v = scale * nd(rng);
  return SymTensor::from_dense(order, n, e);
}

inline trqda::DerivativeBundle random_bundle(std::mt19937_64& rng, int n, int degree,
                                             double scale = 1.0) {
  trqda::DerivativeBundle b;
  b.x = Vector::Zero(n);
  for (int i = 1; i <= degree; ++i) {
    b.tensors.push_back(random_sym(rng, i, n, scale));
    b.error_bounds.push_back(0.0);
  }
  return b;
}

// A symmetric perturbation of the given order with operator norm exactly `size`.
inline SymTensor perturbation(std::mt19937_64& rng, int order, int n, double size) {
  const Vector v = random_unit(rng, n);
  const double sign = (rng() & 1u) ? 1.0 : -1.0;
  switch (order) {
    case 1:
      return SymTensor::from_vector(size * v);
    case 2: {
      const SymTensor m = random_sym(rng, 2, n);
      const double nrm = trqda::spectral_norm(m.matrix());
      return SymTensor::from_matrix(m.matrix() * (size / nrm));
    }
    default: {
      SymTensor t(3, n);
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          for (int c = b; c < n; ++c) t.set(a, b, c, sign * size * v(a) * v(b) * v(c));
      return t;
    }
  }
}

// f(x) = c + g'x + 1/2 x'Hx + 1/6 T[x]^3
class PolynomialProblem : public trqda::Problem {
 public:
  PolynomialProblem(double c, Vector g, Matrix H, SymTensor T)
      : c_(c), g_(std::move(g)), H_(std::move(H)), T_(std::move(T)) {}
  std::string name() const override { return "polynomial"; }
  int dim() const override { return static_cast<int>(g_.size()); }
  double value(const Vector& x) const override {
    return c_ + g_.dot(x) + 0.5 * x.dot(H_ * x) + (T_.empty() ? 0.0 : naive_apply(T_, x) / 6.0);
  }
  SymTensor derivative(const Vector& x, int order) const override {
    const int n = dim();
    switch (order) {
      case 1: {
        Vector grad = g_ + H_ * x;
        if (!T_.empty()) grad += 0.5 * T_.contract(x);
        return SymTensor::from_vector(grad);
      }
      case 2: {
        Matrix h = H_;
        if (!T_.empty())
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
              for (int c = 0; c < n; ++c) h(a, b) += T_(a, b, c) * x(c);
        return SymTensor::from_matrix(h);
      }
      default:
        return T_.empty() ? SymTensor(3, n) : T_;
    }
  }
  double f_low() const override { return -std::numeric_limits<double>::infinity(); }

 private:
  double c_;
  Vector g_;
  Matrix H_;
  SymTensor T_;
};

inline Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v.asDiagonal();
}

inline Vector vec(std::initializer_list<double> d) {
  Vector v(static_cast<int>(d.size()));
  int i = 0;
  for (double x : d) v(i++) = x;
  return v;
}

// Brute-force max of the order-2 model decrement over a polar/spherical grid of the ball.
inline double grid_max_decrement_2d(const Vector& g, const Matrix& H, double r, int rings = 400,
                                    int spokes = 1440) {
  double best = 0.0;
  for (int i = 1; i <= rings; ++i) {
    const double rad = r * i / rings;
    for (int k = 0; k < spokes; ++k) {
      const double t = 2.0 * M_PI * k / spokes;
      const Vector d = vec({rad * std::cos(t), rad * std::sin(t)});
      best = std::max(best, -(g.dot(d) + 0.5 * d.dot(H * d)));
    }
  }
  return best;
}

}  // namespace testing_support

#endif  // TRQDA_TESTS_SUPPORT_HPP
