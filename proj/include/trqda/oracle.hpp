#ifndef TRQDA_ORACLE_HPP
#define TRQDA_ORACLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trqda/tensor.hpp"

namespace trqda {

/// A smooth objective with exact derivatives, used both as the ground truth
/// behind inexact oracles and by the audits.
class Problem {
 public:
  virtual ~Problem() = default;

  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int max_order() const { return kMaxOrder; }
  virtual double value(const Vector& x) const = 0;
  virtual SymTensor derivative(const Vector& x, int order) const = 0;
  /// Lower bound on f over R^n (may be -inf when none is known).
  virtual double f_low() const = 0;
  /// Global Lipschitz constant of the order-th derivative, when known in closed form.
  virtual std::optional<double> lipschitz(int /*order*/) const { return std::nullopt; }
  virtual Vector default_start() const { return Vector::Zero(dim()); }
};

/// f(x) = base(x) + (1/N) sum_i term_i(x) with per-term range bounds, so that a
/// partial sum plus interval midpoints has a deterministic error bound.
class FiniteSumProblem : public Problem {
 public:
  virtual int num_terms() const = 0;
  virtual double base_value(const Vector& x) const = 0;
  virtual SymTensor base_derivative(const Vector& x, int order) const = 0;
  virtual double term_value(const Vector& x, int i) const = 0;
  virtual SymTensor term_derivative(const Vector& x, int i, int order) const = 0;
  /// [lo, hi] containing term_value(x, i).
  virtual std::pair<double, double> term_value_range(const Vector& x, int i) const = 0;
  /// Bound on the operator norm of term_derivative(x, i, order).
  virtual double term_derivative_bound(const Vector& x, int i, int order) const = 0;
};

enum class CorruptionPolicy { None, Adversarial, Truncate, GaussianClipped, Subsample };

inline std::string_view to_string(CorruptionPolicy p) {
  switch (p) {
    case CorruptionPolicy::None:
      return "none";
    case CorruptionPolicy::Adversarial:
      return "adversarial";
    case CorruptionPolicy::Truncate:
      return "truncate";
    case CorruptionPolicy::GaussianClipped:
      return "gaussian";
    default:
      return "subsample";
  }
}

inline CorruptionPolicy parse_policy(std::string_view s) {
  if (s == "none" || s == "exact") return CorruptionPolicy::None;
  if (s == "adversarial") return CorruptionPolicy::Adversarial;
  if (s == "truncate") return CorruptionPolicy::Truncate;
  if (s == "gaussian" || s == "gaussian-clipped" || s == "gaussian_clipped")
    return CorruptionPolicy::GaussianClipped;
  if (s == "subsample") return CorruptionPolicy::Subsample;
  throw std::invalid_argument("unknown oracle policy '" + std::string(s) + "'");
}

/// Reporting-only price of one evaluation requested at absolute accuracy acc.
struct CostModel {
  enum class Kind { Unit, Power, Log };
  Kind kind = Kind::Unit;
  double exponent = 1.0;   // Power: acc^{-exponent}
  double floor = 1e-16;    // exact requests (acc = 0) are priced at this accuracy

  double operator()(double acc) const {
    const double a = std::max(acc, floor);
    switch (kind) {
      case Kind::Unit:
        return 1.0;
      case Kind::Power:
        return std::pow(a, -exponent);
      default:
        return 1.0 + std::max(0.0, std::log(1.0 / a));
    }
  }
};

inline CostModel parse_cost_model(std::string_view s, double exponent = 1.0) {
  CostModel m;
  m.exponent = exponent;
  if (s == "unit") m.kind = CostModel::Kind::Unit;
  else if (s == "power" || s == "inverse") m.kind = CostModel::Kind::Power;
  else if (s == "log") m.kind = CostModel::Kind::Log;
  else throw std::invalid_argument("unknown cost model '" + std::string(s) + "'");
  return m;
}

/// One oracle call: order 0 is a function value.
struct EvalEntry {
  int order = 0;
  double requested = 0.0;
  double cost = 0.0;
};

class EvalLedger {
 public:
  void record(int order, double requested, double cost) {
    entries_.push_back({order, requested, cost});
    if (order == 0) ++f_count_;
    else ++deriv_counts_.at(order - 1);
    total_cost_ += cost;
  }

  const std::vector<EvalEntry>& entries() const { return entries_; }
  long f_evals() const { return f_count_; }
  long deriv_evals(int order) const { return deriv_counts_.at(order - 1); }
  long deriv_evals() const { return std::accumulate(deriv_counts_.begin(), deriv_counts_.end(), 0L); }
  long total_calls() const { return static_cast<long>(entries_.size()); }
  double total_cost() const { return total_cost_; }

  /// Smallest accuracy requested for the given order (+inf if never requested).
  double min_requested(int order) const {
    double m = std::numeric_limits<double>::infinity();
    for (const auto& e : entries_)
      if (e.order == order) m = std::min(m, e.requested);
    return m;
  }

  /// Re-prices every recorded call under another cost model.
  double total_cost(const CostModel& model) const {
    double c = 0.0;
    for (const auto& e : entries_) c += model(e.requested);
    return c;
  }

 private:
  std::vector<EvalEntry> entries_;
  long f_count_ = 0;
  std::vector<long> deriv_counts_ = std::vector<long>(kMaxOrder, 0);
  double total_cost_ = 0.0;
};

namespace detail {

/// Largest power of ten not exceeding v.
inline double decimal_grid_below(double v) { return std::pow(10.0, std::floor(std::log10(v))); }

/// Pulls `value` toward `exact` until |value - exact| <= bound holds in floating point.
inline double clamp_to_bound(double value, double exact, double bound) {
  for (int guard = 0; guard < 64 && std::abs(value - exact) > bound; ++guard) {
    value = std::nextafter(value, exact);
  }
  if (std::abs(value - exact) > bound) value = exact;
  return value;
}

}  // namespace detail

/// Dynamic-accuracy oracle: wraps an exact Problem and returns values and
/// derivative tensors whose error never exceeds the accuracy requested by the
/// caller. How the error is produced is set by the corruption policy.
class InexactOracle {
 public:
  InexactOracle(std::shared_ptr<const Problem> problem, CorruptionPolicy policy,
                std::uint64_t seed, std::set<int> exact_orders = {}, CostModel cost = {})
      : problem_(std::move(problem)),
        policy_(policy),
        rng_(seed),
        exact_orders_(std::move(exact_orders)),
        cost_(cost) {
    if (!problem_) throw std::invalid_argument("InexactOracle: null problem");
    if (policy_ == CorruptionPolicy::Subsample &&
        dynamic_cast<const FiniteSumProblem*>(problem_.get()) == nullptr) {
      throw std::invalid_argument("InexactOracle: subsample policy needs a finite-sum problem");
    }
    for (int o : exact_orders_)
      if (o < 1 || o > kMaxOrder) throw std::invalid_argument("InexactOracle: bad exact order");
  }

  const Problem& problem() const { return *problem_; }
  std::shared_ptr<const Problem> problem_ptr() const { return problem_; }
  CorruptionPolicy policy() const { return policy_; }
  const CostModel& cost_model() const { return cost_; }
  bool is_exact_order(int order) const { return exact_orders_.count(order) > 0; }
  const std::set<int>& exact_orders() const { return exact_orders_; }

  /// Returns f(x) up to absolute error abs_acc.
  double eval_f(const Vector& x, double abs_acc, EvalLedger& ledger) {
    if (!(abs_acc > 0.0)) throw std::invalid_argument("eval_f: accuracy must be positive");
    check_point(x);
    ledger.record(0, abs_acc, cost_(abs_acc));
    switch (policy_) {
      case CorruptionPolicy::None:
        return problem_->value(x);
      case CorruptionPolicy::Adversarial: {
        const double exact = problem_->value(x);
        return detail::clamp_to_bound(exact + abs_acc * random_sign(), exact, abs_acc);
      }
      case CorruptionPolicy::Truncate: {
        const double exact = problem_->value(x);
        const double h = detail::decimal_grid_below(abs_acc);
        return detail::clamp_to_bound(h * std::round(exact / h), exact, abs_acc);
      }
      case CorruptionPolicy::GaussianClipped: {
        const double exact = problem_->value(x);
        const double noise = std::clamp(normal_(rng_) / 3.0, -0.99, 0.99);
        return detail::clamp_to_bound(exact + abs_acc * noise, exact, abs_acc);
      }
      default:
        return subsampled_value(x, abs_acc);
    }
  }

  /// Returns the order-th derivative tensor with operator-norm error <= zeta.
  /// Orders in the exact set ignore zeta (which may then be 0) and are exact.
  SymTensor eval_deriv(const Vector& x, int order, double zeta, EvalLedger& ledger) {
    if (order < 1 || order > problem_->max_order()) {
      throw std::invalid_argument("eval_deriv: unsupported order " + std::to_string(order) +
                                  " for problem " + problem_->name());
    }
    check_point(x);
    const bool exact_order = is_exact_order(order);
    if (!exact_order && !(zeta > 0.0)) {
      throw std::invalid_argument("eval_deriv: accuracy must be positive");
    }
    ledger.record(order, exact_order ? 0.0 : zeta, cost_(exact_order ? 0.0 : zeta));
    if (exact_order || policy_ == CorruptionPolicy::None) return problem_->derivative(x, order);

    const int n = problem_->dim();
    switch (policy_) {
      case CorruptionPolicy::Adversarial: {
        SymTensor t = problem_->derivative(x, order);
        t += (0.99 * zeta) * unit_direction(order, n);
        return t;
      }
      case CorruptionPolicy::Truncate: {
        SymTensor t = problem_->derivative(x, order);
        // entrywise error h/2 over n^order entries keeps the Frobenius (hence operator) norm <= zeta
        const double h = detail::decimal_grid_below(1.98 * zeta / std::sqrt(t.entries().size()));
        std::vector<double> e = t.entries();
        for (double& v : e) v = h * std::round(v / h);
        return SymTensor::from_dense(order, n, e);
      }
      case CorruptionPolicy::GaussianClipped: {
        SymTensor t = problem_->derivative(x, order);
        const double mag = std::clamp(std::abs(normal_(rng_)) / 3.0, 0.0, 0.99);
        t += (mag * zeta) * unit_direction(order, n);
        return t;
      }
      default:
        return subsampled_derivative(x, order, zeta);
    }
  }

 private:
  void check_point(const Vector& x) const {
    if (x.size() != problem_->dim()) {
      throw std::invalid_argument("oracle: point has dimension " + std::to_string(x.size()) +
                                  ", problem expects " + std::to_string(problem_->dim()));
    }
  }

  double random_sign() { return (rng_() & 1u) ? 1.0 : -1.0; }

  Vector random_unit(int n) {
    Vector v(n);
    do {
      for (int a = 0; a < n; ++a) v(a) = normal_(rng_);
    } while (v.norm() == 0.0);
    return v.normalized();
  }

  /// Seeded symmetric direction of operator norm exactly 1.
  SymTensor unit_direction(int order, int n) {
    switch (order) {
      case 1:
        return SymTensor::from_vector(random_unit(n));
      case 2: {
        Matrix m(n, n);
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) m(a, b) = normal_(rng_);
        Matrix sym = 0.5 * (m + m.transpose());
        const double nrm = spectral_norm(sym);
        if (nrm == 0.0) return SymTensor::from_matrix(Matrix::Identity(n, n));
        return SymTensor::from_matrix(sym / nrm);
      }
      default: {
        // +-u (x) u (x) u: the norm of a rank-one symmetric tensor is exact.
        const Vector u = random_unit(n);
        const double sign = random_sign();
        SymTensor t(3, n);
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b)
            for (int c = b; c < n; ++c) t.set(a, b, c, sign * u(a) * u(b) * u(c));
        return t;
      }
    }
  }

  const FiniteSumProblem& finite_sum() const {
    return static_cast<const FiniteSumProblem&>(*problem_);
  }

  std::vector<int> term_order() {
    std::vector<int> idx(finite_sum().num_terms());
    std::iota(idx.begin(), idx.end(), 0);
    std::shuffle(idx.begin(), idx.end(), rng_);
    return idx;
  }

  // Terms are added in a seeded random order until the midpoint estimate of the
  // remainder is certified to the requested accuracy.
  double subsampled_value(const Vector& x, double acc) {
    const FiniteSumProblem& p = finite_sum();
    const int N = p.num_terms();
    const std::vector<int> idx = term_order();
    std::vector<double> mid(N), half(N);
    double remaining = 0.0;
    for (int i = 0; i < N; ++i) {
      auto [lo, hi] = p.term_value_range(x, i);
      mid[i] = 0.5 * (lo + hi);
      half[i] = 0.5 * (hi - lo);
      remaining += half[i];
    }
    double sum = 0.0;
    for (int i : idx) sum += mid[i];
    int m = 0;
    while (m < N && remaining / N > 0.99 * acc) {
      const int i = idx[m++];
      sum += p.term_value(x, i) - mid[i];
      remaining -= half[i];
    }
    if (m == N) return p.value(x);
    const double exact = p.value(x);
    return detail::clamp_to_bound(p.base_value(x) + sum / N, exact, acc);
  }

  SymTensor subsampled_derivative(const Vector& x, int order, double zeta) {
    const FiniteSumProblem& p = finite_sum();
    const int N = p.num_terms();
    const std::vector<int> idx = term_order();
    std::vector<double> bound(N);
    double remaining = 0.0;
    for (int i = 0; i < N; ++i) {
      bound[i] = p.term_derivative_bound(x, i, order);
      remaining += bound[i];
    }
    SymTensor sum(order, p.dim());
    int m = 0;
    while (m < N && remaining / N > 0.99 * zeta) {
      const int i = idx[m++];
      sum += p.term_derivative(x, i, order);
      remaining -= bound[i];
    }
    if (m == N) return p.derivative(x, order);
    return p.base_derivative(x, order) + (1.0 / N) * sum;
  }

  std::shared_ptr<const Problem> problem_;
  CorruptionPolicy policy_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::set<int> exact_orders_;
  CostModel cost_;
};

/// Maximum deviations between exact derivatives and central differences.
struct FiniteDiffReport {
  double gradient_max_dev = 0.0;
  double hessian_max_dev = 0.0;
  double third_max_dev = 0.0;   // only when the problem supplies order 3
};

/// Central differences: the gradient from values, each higher order from the
/// exact derivative one order below.
inline FiniteDiffReport finite_diff_check(const Problem& p, const Vector& x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite_diff_check: h must be positive");
  const int n = p.dim();
  FiniteDiffReport rep;
  const Vector g = p.derivative(x, 1).vector();
  for (int a = 0; a < n; ++a) {
    Vector xp = x, xm = x;
    xp(a) += h;
    xm(a) -= h;
    const double fd = (p.value(xp) - p.value(xm)) / (2.0 * h);
    rep.gradient_max_dev = std::max(rep.gradient_max_dev, std::abs(fd - g(a)));
  }
  if (p.max_order() >= 2) {
    const Matrix H = p.derivative(x, 2).matrix();
    for (int a = 0; a < n; ++a) {
      Vector xp = x, xm = x;
      xp(a) += h;
      xm(a) -= h;
      const Vector col = (p.derivative(xp, 1).vector() - p.derivative(xm, 1).vector()) / (2.0 * h);
      rep.hessian_max_dev = std::max(rep.hessian_max_dev, (col - H.col(a)).cwiseAbs().maxCoeff());
    }
  }
  if (p.max_order() >= 3) {
    const SymTensor T = p.derivative(x, 3);
    for (int a = 0; a < n; ++a) {
      Vector xp = x, xm = x;
      xp(a) += h;
      xm(a) -= h;
      const Matrix slice = (p.derivative(xp, 2).matrix() - p.derivative(xm, 2).matrix()) / (2.0 * h);
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          rep.third_max_dev = std::max(rep.third_max_dev, std::abs(slice(b, c) - T(a, b, c)));
    }
  }
  return rep;
}

}  // namespace trqda

#endif  // TRQDA_ORACLE_HPP
