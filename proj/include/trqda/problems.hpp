#ifndef TRQDA_PROBLEMS_HPP
#define TRQDA_PROBLEMS_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "trqda/oracle.hpp"

namespace trqda {

/// f(x) = 1/2 x'Ax - b'x with A = Q diag(lambda) Q', lambda log-spaced in [1, condition].
class QuadraticProblem : public Problem {
 public:
  QuadraticProblem(int dim, double condition, std::uint64_t seed, bool linear_term = true)
      : dim_(dim) {
    if (dim < 1) throw std::invalid_argument("quadratic: dim must be >= 1");
    if (!(condition >= 1.0)) throw std::invalid_argument("quadratic: condition must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Matrix m(dim, dim);
    for (int a = 0; a < dim; ++a)
      for (int b = 0; b < dim; ++b) m(a, b) = normal(rng);
    const Matrix Q = Eigen::HouseholderQR<Matrix>(m).householderQ();
    Vector lambda(dim);
    for (int a = 0; a < dim; ++a) {
      const double t = dim == 1 ? 0.0 : static_cast<double>(a) / (dim - 1);
      lambda(a) = std::pow(condition, t);
    }
    A_ = Q * lambda.asDiagonal() * Q.transpose();
    A_ = 0.5 * (A_ + A_.transpose());
    b_ = Vector::Zero(dim);
    if (linear_term)
      for (int a = 0; a < dim; ++a) b_(a) = normal(rng);
    minimizer_ = A_.ldlt().solve(b_);
    norm_A_ = lambda.maxCoeff();
  }

  QuadraticProblem(Matrix A, Vector b) : dim_(static_cast<int>(b.size())), A_(std::move(A)), b_(std::move(b)) {
    if (A_.rows() != dim_ || A_.cols() != dim_) throw std::invalid_argument("quadratic: shape");
    A_ = 0.5 * (A_ + A_.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(A_);
    if (eig.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("quadratic: A not SPD");
    minimizer_ = A_.ldlt().solve(b_);
    norm_A_ = eig.eigenvalues().cwiseAbs().maxCoeff();
  }

  std::string name() const override { return "quadratic"; }
  int dim() const override { return dim_; }
  double value(const Vector& x) const override { return 0.5 * x.dot(A_ * x) - b_.dot(x); }
  SymTensor derivative(const Vector& x, int order) const override {
    switch (order) {
      case 1:
        return SymTensor::from_vector(A_ * x - b_);
      case 2:
        return SymTensor::from_matrix(A_);
      case 3:
        return SymTensor(3, dim_);
      default:
        throw std::invalid_argument("quadratic: unsupported order");
    }
  }
  double f_low() const override { return value(minimizer_); }
  std::optional<double> lipschitz(int order) const override {
    return order == 1 ? norm_A_ : 0.0;
  }
  Vector default_start() const override { return Vector::Ones(dim_); }

  const Matrix& hessian() const { return A_; }
  const Vector& linear() const { return b_; }
  const Vector& minimizer() const { return minimizer_; }

 private:
  int dim_;
  Matrix A_;
  Vector b_;
  Vector minimizer_;
  double norm_A_ = 0.0;
};

/// 100 (y - x^2)^2 + (1 - x)^2.
class RosenbrockProblem : public Problem {
 public:
  std::string name() const override { return "rosenbrock"; }
  int dim() const override { return 2; }
  double value(const Vector& v) const override {
    const double x = v(0), y = v(1);
    return 100.0 * (y - x * x) * (y - x * x) + (1.0 - x) * (1.0 - x);
  }
  SymTensor derivative(const Vector& v, int order) const override {
    const double x = v(0), y = v(1);
    switch (order) {
      case 1: {
        Vector g(2);
        g << -400.0 * x * (y - x * x) - 2.0 * (1.0 - x), 200.0 * (y - x * x);
        return SymTensor::from_vector(g);
      }
      case 2: {
        SymTensor h(2, 2);
        h.set(0, 0, 1200.0 * x * x - 400.0 * y + 2.0);
        h.set(0, 1, -400.0 * x);
        h.set(1, 1, 200.0);
        return h;
      }
      case 3: {
        SymTensor t(3, 2);
        t.set(0, 0, 0, 2400.0 * x);
        t.set(0, 0, 1, -400.0);
        return t;
      }
      default:
        throw std::invalid_argument("rosenbrock: unsupported order");
    }
  }
  double f_low() const override { return 0.0; }
  Vector default_start() const override { return (Vector(2) << -1.2, 1.0).finished(); }
};

/// x^2 - y^2 + c y^4: a strict saddle at the origin, minimizers at y = +-1/sqrt(2c).
/// c = 0 gives the pure (unbounded) saddle.
class SaddleProblem : public Problem {
 public:
  explicit SaddleProblem(double quartic = 0.25) : c_(quartic) {
    if (c_ < 0.0) throw std::invalid_argument("saddle: quartic coefficient must be >= 0");
  }
  std::string name() const override { return "saddle"; }
  int dim() const override { return 2; }
  double value(const Vector& v) const override {
    const double x = v(0), y = v(1);
    return x * x - y * y + c_ * y * y * y * y;
  }
  SymTensor derivative(const Vector& v, int order) const override {
    const double x = v(0), y = v(1);
    switch (order) {
      case 1: {
        Vector g(2);
        g << 2.0 * x, -2.0 * y + 4.0 * c_ * y * y * y;
        return SymTensor::from_vector(g);
      }
      case 2: {
        SymTensor h(2, 2);
        h.set(0, 0, 2.0);
        h.set(1, 1, -2.0 + 12.0 * c_ * y * y);
        return h;
      }
      case 3: {
        SymTensor t(3, 2);
        t.set(1, 1, 1, 24.0 * c_ * y);
        return t;
      }
      default:
        throw std::invalid_argument("saddle: unsupported order");
    }
  }
  double f_low() const override {
    return c_ > 0.0 ? -1.0 / (4.0 * c_) : -std::numeric_limits<double>::infinity();
  }
  std::optional<double> lipschitz(int order) const override {
    if (c_ == 0.0) return order == 1 ? 2.0 : 0.0;
    if (order == 3) return 24.0 * c_;
    return std::nullopt;
  }
  Vector default_start() const override { return (Vector(2) << 1.0, 0.0).finished(); }

 private:
  double c_;
};

/// sum_i (x_i^4/4 - x_i^2/2) + coupling/2 * sum_i (x_i - x_{i+1})^2.
class QuarticSumProblem : public Problem {
 public:
  QuarticSumProblem(int dim, double coupling = 0.1) : dim_(dim), coupling_(coupling) {
    if (dim < 1) throw std::invalid_argument("quartic: dim must be >= 1");
    if (coupling < 0.0) throw std::invalid_argument("quartic: coupling must be >= 0");
  }
  std::string name() const override { return "quartic"; }
  int dim() const override { return dim_; }
  double value(const Vector& x) const override {
    double f = 0.0;
    for (int i = 0; i < dim_; ++i) f += 0.25 * std::pow(x(i), 4) - 0.5 * x(i) * x(i);
    for (int i = 0; i + 1 < dim_; ++i) f += 0.5 * coupling_ * std::pow(x(i) - x(i + 1), 2);
    return f;
  }
  SymTensor derivative(const Vector& x, int order) const override {
    switch (order) {
      case 1: {
        Vector g(dim_);
        for (int i = 0; i < dim_; ++i) g(i) = x(i) * x(i) * x(i) - x(i);
        for (int i = 0; i + 1 < dim_; ++i) {
          g(i) += coupling_ * (x(i) - x(i + 1));
          g(i + 1) -= coupling_ * (x(i) - x(i + 1));
        }
        return SymTensor::from_vector(g);
      }
      case 2: {
        Matrix h = Matrix::Zero(dim_, dim_);
        for (int i = 0; i < dim_; ++i) h(i, i) = 3.0 * x(i) * x(i) - 1.0;
        for (int i = 0; i + 1 < dim_; ++i) {
          h(i, i) += coupling_;
          h(i + 1, i + 1) += coupling_;
          h(i, i + 1) -= coupling_;
          h(i + 1, i) -= coupling_;
        }
        return SymTensor::from_matrix(h);
      }
      case 3: {
        SymTensor t(3, dim_);
        for (int i = 0; i < dim_; ++i) t.set(i, i, i, 6.0 * x(i));
        return t;
      }
      default:
        throw std::invalid_argument("quartic: unsupported order");
    }
  }
  // each coordinate term is >= -1/4 and the coupling is nonnegative
  double f_low() const override { return -0.25 * dim_; }
  std::optional<double> lipschitz(int order) const override {
    if (order == 3) return 6.0;
    return std::nullopt;
  }
  Vector default_start() const override {
    Vector x(dim_);
    for (int i = 0; i < dim_; ++i) x(i) = (i % 2 == 0 ? 0.5 : -0.3) + 0.05 * i;
    return x;
  }

 private:
  int dim_;
  double coupling_;
};

/// Regularized logistic loss over a seeded synthetic data set:
/// lambda/2 ||x||^2 + (1/N) sum_i log(1 + exp(-y_i a_i'x)).
class FiniteSumLogisticProblem : public FiniteSumProblem {
 public:
  FiniteSumLogisticProblem(int dim, int terms, double lambda, std::uint64_t seed)
      : dim_(dim), lambda_(lambda) {
    if (dim < 1 || terms < 1) throw std::invalid_argument("logistic: bad size");
    if (lambda < 0.0) throw std::invalid_argument("logistic: lambda must be >= 0");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Vector w(dim);
    for (int a = 0; a < dim; ++a) w(a) = normal(rng);
    for (int i = 0; i < terms; ++i) {
      Vector a(dim);
      for (int k = 0; k < dim; ++k) a(k) = normal(rng);
      const double label = (a.dot(w) + 0.5 * normal(rng)) >= 0.0 ? 1.0 : -1.0;
      rows_.push_back(label * a);   // fold the label into the row
      norms_.push_back(a.norm());
    }
  }

  std::string name() const override { return "finite_sum_logistic"; }
  int dim() const override { return dim_; }
  int max_order() const override { return 2; }
  int num_terms() const override { return static_cast<int>(rows_.size()); }

  double value(const Vector& x) const override {
    double s = 0.0;
    for (int i = 0; i < num_terms(); ++i) s += term_value(x, i);
    return base_value(x) + s / num_terms();
  }
  SymTensor derivative(const Vector& x, int order) const override {
    SymTensor t = base_derivative(x, order);
    SymTensor sum(order, dim_);
    for (int i = 0; i < num_terms(); ++i) sum += term_derivative(x, i, order);
    return t + (1.0 / num_terms()) * sum;
  }
  double f_low() const override { return 0.0; }
  std::optional<double> lipschitz(int order) const override {
    double acc = 0.0;
    for (double n : norms_) acc += order == 1 ? 0.25 * n * n : kMaxSigmoidCurvature * n * n * n;
    acc /= num_terms();
    return order == 1 ? acc + lambda_ : acc;
  }
  Vector default_start() const override { return Vector::Ones(dim_); }

  double base_value(const Vector& x) const override { return 0.5 * lambda_ * x.squaredNorm(); }
  SymTensor base_derivative(const Vector& x, int order) const override {
    if (order == 1) return SymTensor::from_vector(lambda_ * x);
    if (order == 2) return SymTensor::from_matrix(lambda_ * Matrix::Identity(dim_, dim_));
    throw std::invalid_argument("logistic: unsupported order");
  }
  double term_value(const Vector& x, int i) const override { return softplus(-rows_[i].dot(x)); }
  SymTensor term_derivative(const Vector& x, int i, int order) const override {
    const double t = rows_[i].dot(x);
    const double s = sigmoid(-t);
    if (order == 1) return SymTensor::from_vector(-s * rows_[i]);
    if (order == 2) return SymTensor::from_matrix(s * (1.0 - s) * rows_[i] * rows_[i].transpose());
    throw std::invalid_argument("logistic: unsupported order");
  }
  std::pair<double, double> term_value_range(const Vector& x, int i) const override {
    const double B = norms_[i] * x.norm();
    return {softplus(-B), softplus(B)};
  }
  double term_derivative_bound(const Vector& /*x*/, int i, int order) const override {
    return order == 1 ? norms_[i] : 0.25 * norms_[i] * norms_[i];
  }

 private:
  // max |sigma''(t)| = 1/(6 sqrt 3)
  static constexpr double kMaxSigmoidCurvature = 0.0962250448649376;

  static double softplus(double t) {
    return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
  }
  static double sigmoid(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
  }

  int dim_;
  double lambda_;
  std::vector<Vector> rows_;
  std::vector<double> norms_;
};

/// Construction parameters shared by the problem registry.
struct ProblemParams {
  int dim = 0;               // 0: problem default
  double condition = 10.0;   // quadratic
  double quartic = 0.25;     // saddle
  double coupling = 0.1;     // quartic
  int terms = 200;           // finite_sum_logistic
  double lambda = 0.1;       // finite_sum_logistic
  std::uint64_t seed = 0;    // data generation
};

inline const std::vector<std::string>& problem_names() {
  static const std::vector<std::string> names = {"quadratic", "rosenbrock", "saddle", "quartic",
                                                 "finite_sum_logistic"};
  return names;
}

inline std::shared_ptr<const Problem> make_problem(const std::string& name,
                                                   const ProblemParams& p = {}) {
  if (name == "quadratic")
    return std::make_shared<QuadraticProblem>(p.dim > 0 ? p.dim : 2, p.condition, p.seed);
  if (name == "rosenbrock") {
    if (p.dim != 0 && p.dim != 2) throw std::invalid_argument("rosenbrock is two-dimensional");
    return std::make_shared<RosenbrockProblem>();
  }
  if (name == "saddle") {
    if (p.dim != 0 && p.dim != 2) throw std::invalid_argument("saddle is two-dimensional");
    return std::make_shared<SaddleProblem>(p.quartic);
  }
  if (name == "quartic") return std::make_shared<QuarticSumProblem>(p.dim > 0 ? p.dim : 4, p.coupling);
  if (name == "finite_sum_logistic")
    return std::make_shared<FiniteSumLogisticProblem>(p.dim > 0 ? p.dim : 5, p.terms, p.lambda,
                                                      p.seed);
  throw std::invalid_argument("unknown problem '" + name + "'");
}

}  // namespace trqda

#endif  // TRQDA_PROBLEMS_HPP
