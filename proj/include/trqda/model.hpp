#ifndef TRQDA_MODEL_HPP
#define TRQDA_MODEL_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/tensor.hpp"

namespace trqda {

/// Inexact derivatives of orders 1..degree at a point, each with a certified
/// absolute bound on its operator-norm error.
struct DerivativeBundle {
  Vector x;
  std::vector<SymTensor> tensors;     // tensors[i - 1] has order i
  std::vector<double> error_bounds;   // error_bounds[i - 1] bounds ||tensors[i-1] - exact||

  int degree() const { return static_cast<int>(tensors.size()); }
  int dim() const { return static_cast<int>(x.size()); }

  const SymTensor& tensor(int order) const { return tensors.at(order - 1); }
  double error_bound(int order) const { return error_bounds.at(order - 1); }

  void validate() const {
    if (tensors.size() != error_bounds.size()) {
      throw std::invalid_argument("DerivativeBundle: tensors and error bounds differ in length");
    }
    for (int i = 1; i <= degree(); ++i) {
      const SymTensor& t = tensor(i);
      if (t.order() != i) {
        throw std::invalid_argument("DerivativeBundle: tensor " + std::to_string(i) +
                                    " has order " + std::to_string(t.order()));
      }
      if (t.dim() != dim()) throw std::invalid_argument("DerivativeBundle: dimension mismatch");
      if (!(error_bound(i) >= 0.0)) {
        throw std::invalid_argument("DerivativeBundle: negative error bound");
      }
    }
  }
};

inline double tensor_apply(const SymTensor& t, const Vector& s) { return t.apply(s); }

namespace detail {

inline void check_model_args(const DerivativeBundle& b, const Vector& s, int j) {
  if (j < 1 || j > b.degree()) {
    throw std::invalid_argument("taylor model: degree " + std::to_string(j) +
                                " exceeds bundle degree " + std::to_string(b.degree()));
  }
  if (s.size() != b.x.size()) throw std::invalid_argument("taylor model: dimension mismatch");
}

inline constexpr double kInvFactorial[] = {1.0, 1.0, 0.5, 1.0 / 6.0};

}  // namespace detail

/// Decrease of the degree-j Taylor model from 0 to s:
/// -sum_{i<=j} T_i[s]^i / i!. Does not depend on any function value.
inline double taylor_decrement(const DerivativeBundle& b, const Vector& s, int j) {
  detail::check_model_args(b, s, j);
  double sum = 0.0;
  for (int i = 1; i <= j; ++i) sum += detail::kInvFactorial[i] * b.tensor(i).apply(s);
  return -sum;
}

inline double taylor_value(const DerivativeBundle& b, double f0, const Vector& s, int j) {
  return f0 - taylor_decrement(b, s, j);
}

/// Gradient of taylor_decrement with respect to s.
inline Vector decrement_gradient(const DerivativeBundle& b, const Vector& s, int j) {
  detail::check_model_args(b, s, j);
  Vector grad = Vector::Zero(s.size());
  // d/ds T[s]^i / i! = T[s]^{i-1} / (i-1)!
  for (int i = 1; i <= j; ++i) grad += detail::kInvFactorial[i - 1] * b.tensor(i).contract(s);
  return -grad;
}

/// sum_{i<=r} zeta_i delta^i / i!, the worst-case decrement error on a ball of radius delta.
inline double decrement_error_bound(std::span<const double> zetas, double delta, int r) {
  double sum = 0.0;
  double power = 1.0;
  for (int i = 1; i <= r; ++i) {
    power *= delta;
    sum += zetas[i - 1] * power * detail::kInvFactorial[i];
  }
  return sum;
}

inline double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace trqda

#endif  // TRQDA_MODEL_HPP
