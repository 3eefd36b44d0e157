#ifndef TRQDA_TENSOR_HPP
#define TRQDA_TENSOR_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace trqda {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Largest derivative order the engine supports.
inline constexpr int kMaxOrder = 3;

/// Dense symmetric tensor of order 1..3 on R^n.
///
/// Entries are stored in full (n^order) row-major layout and kept symmetric:
/// every setter writes all index permutations, and the dense constructors
/// symmetrize their input.
class SymTensor {
 public:
  SymTensor() = default;

  SymTensor(int order, int dim) : order_(order), dim_(dim) {
    if (order < 1 || order > kMaxOrder) {
      throw std::invalid_argument("SymTensor: order " + std::to_string(order) +
                                  " not in [1, 3]");
    }
    if (dim < 1) throw std::invalid_argument("SymTensor: dimension must be >= 1");
    data_.assign(size_for(order, dim), 0.0);
  }

  static SymTensor from_vector(const Vector& v) {
    SymTensor t(1, static_cast<int>(v.size()));
    for (int a = 0; a < t.dim_; ++a) t.data_[a] = v(a);
    return t;
  }

  /// Builds an order-2 tensor from (the symmetric part of) a square matrix.
  static SymTensor from_matrix(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("SymTensor: matrix not square");
    const int n = static_cast<int>(m.rows());
    SymTensor t(2, n);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) t.data_[a * n + b] = 0.5 * (m(a, b) + m(b, a));
    return t;
  }

  /// Builds a tensor from full row-major entries, averaging over index permutations.
  static SymTensor from_dense(int order, int dim, const std::vector<double>& entries) {
    SymTensor t(order, dim);
    if (entries.size() != t.data_.size()) {
      throw std::invalid_argument("SymTensor: expected " + std::to_string(t.data_.size()) +
                                  " entries");
    }
    t.data_ = entries;
    t.symmetrize();
    return t;
  }

  int order() const { return order_; }
  int dim() const { return dim_; }
  bool empty() const { return data_.empty(); }
  const std::vector<double>& entries() const { return data_; }

  double operator()(int a) const { return data_[a]; }
  double operator()(int a, int b) const { return data_[a * dim_ + b]; }
  double operator()(int a, int b, int c) const { return data_[(a * dim_ + b) * dim_ + c]; }

  void set(int a, double v) { data_[a] = v; }
  void set(int a, int b, double v) {
    data_[a * dim_ + b] = v;
    data_[b * dim_ + a] = v;
  }
  void set(int a, int b, int c, double v) {
    const int n = dim_;
    data_[(a * n + b) * n + c] = v;
    data_[(a * n + c) * n + b] = v;
    data_[(b * n + a) * n + c] = v;
    data_[(b * n + c) * n + a] = v;
    data_[(c * n + a) * n + b] = v;
    data_[(c * n + b) * n + a] = v;
  }

  Vector vector() const {
    require_order(1);
    return Eigen::Map<const Vector>(data_.data(), dim_);
  }

  Matrix matrix() const {
    require_order(2);
    Matrix m(dim_, dim_);
    for (int a = 0; a < dim_; ++a)
      for (int b = 0; b < dim_; ++b) m(a, b) = data_[a * dim_ + b];
    return m;
  }

  /// Contracts the tensor with s in all but one slot: T[s]^{order-1}.
  Vector contract(const Vector& s) const {
    check_dim(s);
    const int n = dim_;
    Vector out = Vector::Zero(n);
    switch (order_) {
      case 1:
        return vector();
      case 2:
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) out(a) += data_[a * n + b] * s(b);
        return out;
      default:
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            double acc = 0.0;
            const double* row = &data_[(a * n + b) * n];
            for (int c = 0; c < n; ++c) acc += row[c] * s(c);
            out(a) += acc * s(b);
          }
        return out;
    }
  }

  /// The order-fold contraction T[s]^order (no 1/order! factor).
  double apply(const Vector& s) const { return contract(s).dot(s); }

  double frobenius_norm() const {
    double acc = 0.0;
    for (double v : data_) acc += v * v;
    return std::sqrt(acc);
  }

  SymTensor& operator+=(const SymTensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  SymTensor& operator-=(const SymTensor& o) {
    check_same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  SymTensor& operator*=(double k) {
    for (double& v : data_) v *= k;
    return *this;
  }
  friend SymTensor operator+(SymTensor a, const SymTensor& b) { return a += b; }
  friend SymTensor operator-(SymTensor a, const SymTensor& b) { return a -= b; }
  friend SymTensor operator*(double k, SymTensor a) { return a *= k; }

  bool operator==(const SymTensor& o) const = default;

 private:
  static std::size_t size_for(int order, int dim) {
    std::size_t sz = 1;
    for (int i = 0; i < order; ++i) sz *= static_cast<std::size_t>(dim);
    return sz;
  }

  void require_order(int k) const {
    if (order_ != k) {
      throw std::invalid_argument("SymTensor: order " + std::to_string(order_) +
                                  " used where order " + std::to_string(k) + " expected");
    }
  }

  void check_dim(const Vector& s) const {
    if (s.size() != dim_) {
      throw std::invalid_argument("SymTensor: dimension mismatch (" + std::to_string(dim_) +
                                  " vs " + std::to_string(s.size()) + ")");
    }
  }

  void check_same_shape(const SymTensor& o) const {
    if (o.order_ != order_ || o.dim_ != dim_) {
      throw std::invalid_argument("SymTensor: shape mismatch");
    }
  }

  void symmetrize() {
    const int n = dim_;
    if (order_ == 2) {
      for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) set(a, b, 0.5 * ((*this)(a, b) + (*this)(b, a)));
    } else if (order_ == 3) {
      for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
          for (int c = b; c < n; ++c) {
            const double m = ((*this)(a, b, c) + (*this)(a, c, b) + (*this)(b, a, c) +
                              (*this)(b, c, a) + (*this)(c, a, b) + (*this)(c, b, a)) /
                             6.0;
            set(a, b, c, m);
          }
    }
  }

  int order_ = 0;
  int dim_ = 0;
  std::vector<double> data_;
};

/// Exact spectral norm of a symmetric matrix.
inline double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().cwiseAbs().maxCoeff();
}

/// Induced operator norm of a symmetric tensor.
///
/// Orders 1 and 2 are exact. For order 3 the value is an estimate from a
/// multi-start higher-order power iteration maximizing |T[u]^3| on the unit
/// sphere; it is a lower bound on the true norm and exact whenever a start
/// lands in the basin of the global maximizer.
inline double operator_norm(const SymTensor& t, unsigned seed = 7) {
  switch (t.order()) {
    case 1:
      return t.vector().norm();
    case 2:
      return spectral_norm(t.matrix());
    default:
      break;
  }
  const int n = t.dim();
  std::vector<Vector> starts;
  for (int a = 0; a < n; ++a) {
    starts.push_back(Vector::Unit(n, a));
    Vector v = Vector::Ones(n);
    v(a) = -1.0;
    starts.push_back(v.normalized());
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  for (int r = 0; r < 16; ++r) {
    Vector v(n);
    for (int a = 0; a < n; ++a) v(a) = normal(rng);
    starts.push_back(v.normalized());
  }
  double best = 0.0;
  for (Vector u : starts) {
    for (int it = 0; it < 300; ++it) {
      Vector w = t.contract(u);
      const double sign = w.dot(u) >= 0.0 ? 1.0 : -1.0;
      const double wn = w.norm();
      if (wn == 0.0) break;
      Vector next = sign * w / wn;
      best = std::max(best, std::abs(t.apply(next)));
      const bool done = (next - u).norm() < 1e-14;
      u = next;
      if (done) break;
    }
    best = std::max(best, std::abs(t.apply(u)));
  }
  return best;
}

}  // namespace trqda

#endif  // TRQDA_TENSOR_HPP
