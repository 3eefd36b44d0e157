#include <gtest/gtest.h>

#include "support.hpp"

using namespace trqda;
using namespace testing_support;

namespace {

DerivativeBundle bundle2(const Vector& g, const Matrix& H) {
  DerivativeBundle b;
  b.x = Vector::Zero(g.size());
  b.tensors = {SymTensor::from_vector(g), SymTensor::from_matrix(H)};
  b.error_bounds = {0, 0};
  return b;
}

struct Harness {
  explicit Harness(std::shared_ptr<const Problem> p, CorruptionPolicy pol, std::vector<double> z0,
                   std::uint64_t seed = 1, std::set<int> exact = {})
      : oracle(std::move(p), pol, seed, exact),
        accuracy(std::move(z0), 0.1, 1.0, exact),
        ctx{oracle, evals, accuracy, cache, &trace, {}} {}
  InexactOracle oracle;
  EvalLedger evals;
  AccuracyLedger accuracy;
  DerivativeCache cache;
  RunTrace trace;
  EvalContext ctx;
};

}  // namespace

TEST(MaxDecrement, FirstOrderClosedForm) {
  DerivativeBundle b;
  b.x = Vector::Zero(2);
  b.tensors = {SymTensor::from_vector(vec({3, 4}))};
  b.error_bounds = {0};
  const auto m = max_decrement(b, 1, 0.5);
  EXPECT_NEAR(m.dT, 2.5, 1e-15);
  EXPECT_NEAR(m.d(0), -0.3, 1e-15);
  EXPECT_NEAR(m.d(1), -0.4, 1e-15);
  b.tensors[0] = SymTensor::from_vector(Vector::Zero(2));
  EXPECT_EQ(max_decrement(b, 1, 0.5).d.norm(), 0.0);
}

TEST(MaxDecrement, HardCase) {
  const Matrix H = diag({-2, 1});
  const auto m = max_decrement(bundle2(Vector::Zero(2), H), 2, 1.0);
  EXPECT_NEAR(m.dT, 1.0, 1e-9);
  EXPECT_NEAR(std::abs(m.d(0)), 1.0, 1e-9);
  EXPECT_NEAR(m.d(1), 0.0, 1e-6);
  EXPECT_NEAR(grid_max_decrement_2d(Vector::Zero(2), H, 1.0), 1.0, 1e-9);
}

TEST(MaxDecrement, NearHardCase) {
  const Matrix H = diag({-2, 1});
  const Vector g = vec({0, 1e-9});
  const auto m = max_decrement(bundle2(g, H), 2, 1.0);
  EXPECT_GE(m.dT, grid_max_decrement_2d(g, H, 1.0) - 1e-9);
  EXPECT_LE(m.d.norm(), 1.0 + 1e-12);
}

TEST(MaxDecrement, SecondOrderAgainstGrid2D) {
  std::mt19937_64 rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    const Vector g = random_vector(rng, 2);
    const Matrix H = random_sym(rng, 2, 2).matrix();
    const double r = 0.2 + 0.1 * trial;
    const auto m = max_decrement(bundle2(g, H), 2, r);
    const double grid = grid_max_decrement_2d(g, H, r);
    EXPECT_LE(m.d.norm(), r * (1 + 1e-12));
    EXPECT_GE(m.dT, grid - 1e-9);
    EXPECT_NEAR(m.dT, grid, 1e-3 * (1 + grid));
  }
}

TEST(MaxDecrement, SecondOrderAgainstReference) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 1 + trial % 4;
    const Vector g = random_vector(rng, n);
    const Matrix H = random_sym(rng, 2, n).matrix();
    PolynomialProblem p(0.0, g, H, SymTensor());
    const double delta = 0.3 + 0.1 * (trial % 5);
    const auto m = max_decrement(bundle2(g, H), 2, delta);
    const double ref = phi_reference(p, Vector::Zero(n), 2, delta);
    EXPECT_NEAR(m.dT, ref, 1e-6) << "n = " << n;
    EXPECT_GE(m.dT, kBallSolverVarsigma * ref - 1e-9);
  }
}

TEST(MaxDecrement, ThirdOrderIsFeasibleAndBeatsSecond) {
  std::mt19937_64 rng(37);
  for (int trial = 0; trial < 10; ++trial) {
    const DerivativeBundle b = random_bundle(rng, 3, 3);
    const auto m3 = max_decrement(b, 3, 0.5);
    const auto m2 = max_decrement(b, 2, 0.5);
    EXPECT_LE(m3.d.norm(), 0.5 * (1 + 1e-12));
    EXPECT_GE(m3.dT, taylor_decrement(b, m2.d, 3) - 1e-12);
    EXPECT_FALSE(m3.certified);
  }
  EXPECT_THROW(max_decrement(random_bundle(rng, 2, 2), 3, 1.0), std::invalid_argument);
}

TEST(AccuracyLedger, TightenScalesLowerOrders) {
  AccuracyLedger acc({0.1, 0.1, 0.1}, 0.5, 0.1);
  acc.tighten(2);
  EXPECT_DOUBLE_EQ(acc.zeta(1), 0.05);
  EXPECT_DOUBLE_EQ(acc.zeta(2), 0.05);
  EXPECT_DOUBLE_EQ(acc.zeta(3), 0.1);
  EXPECT_EQ(acc.i_zeta(), 1);
  EXPECT_EQ(acc.tightenings(1), 1);
  EXPECT_EQ(acc.tightenings(3), 0);
  EXPECT_THROW(AccuracyLedger({0.2}, 0.5, 0.1), std::invalid_argument);
  EXPECT_THROW(AccuracyLedger({0.1}, 1.0, 0.1), std::invalid_argument);
  AccuracyLedger ex({0.1, 0.1}, 0.5, 0.1, {1});
  EXPECT_EQ(ex.zeta(1), 0.0);
  ex.tighten(2);
  EXPECT_EQ(ex.zeta(1), 0.0);
  EXPECT_DOUBLE_EQ(ex.zeta(2), 0.05);
}

TEST(CertifiedDecrement, ExactOracleTightenCountIsPredicted) {
  // dT = 0 at the minimizer, so only the absolute test can pass:
  // it needs zeta delta <= omega * xi * delta, i.e. zeta <= omega * xi.
  auto p = std::make_shared<QuadraticProblem>(3, 5.0, 2);
  Harness h(p, CorruptionPolicy::None, {1.0});
  const double eps = 1e-2, omega = 0.02, varsigma = 0.99;
  const auto cert = certified_decrement(p->minimizer(), 1, 0.5, eps, varsigma, omega, h.ctx);
  const double target = omega * 0.5 * varsigma * eps;
  const int predicted = static_cast<int>(std::ceil(std::log(target / 1.0) / std::log(0.1)));
  EXPECT_EQ(cert.outcome, VerifyOutcome::Absolute);
  EXPECT_EQ(cert.tightenings, predicted);
  EXPECT_LE(cert.tightenings,
            certified_decrement_tighten_cap(1, 0.5, eps, varsigma, omega, 0.1, 1.0));
  EXPECT_EQ(h.evals.f_evals(), 0);
}

TEST(CertifiedDecrement, AbsoluteAtMinimizerImpliesSmallPhi) {
  auto p = std::make_shared<QuadraticProblem>(2, 4.0, 5);
  for (int j = 1; j <= 2; ++j) {
    Harness h(p, CorruptionPolicy::Adversarial, std::vector<double>(j, 0.1), 7);
    const double eps = 1e-3, delta = 0.4;
    const auto cert = certified_decrement(p->minimizer(), j, delta, eps, 0.99, 0.02, h.ctx);
    EXPECT_EQ(cert.outcome, VerifyOutcome::Absolute);
    EXPECT_LE(phi_reference(*p, p->minimizer(), j, delta),
              eps * std::pow(delta, j) / factorial(j) + 1e-6);
  }
}

TEST(CertifiedDecrement, RelativeFarFromStationarity) {
  // f = g'x with ||g|| = 1
  PolynomialProblem lin(0.0, vec({0.6, 0.8}), Matrix::Zero(2, 2), SymTensor());
  auto p = std::make_shared<PolynomialProblem>(lin);
  Harness h(p, CorruptionPolicy::Adversarial, {0.1}, 11);
  const double omega = 0.02, delta = 0.5;
  const auto cert = certified_decrement(Vector::Zero(2), 1, delta, 1e-3, 0.99, omega, h.ctx);
  ASSERT_EQ(cert.outcome, VerifyOutcome::Relative);
  const double phi = phi_exact(*p, Vector::Zero(2), 1, delta);
  EXPECT_LE((1 - omega) * cert.dT, phi + 1e-6);
  EXPECT_LE(phi, (1 + omega) * cert.dT + 1e-6);
}

TEST(CertifiedDecrement, ReusesCachedTensors) {
  auto p = std::make_shared<RosenbrockProblem>();
  Harness h(p, CorruptionPolicy::None, {0.1, 0.1});
  const Vector x = vec({-1.2, 1});
  certified_decrement(x, 2, 0.5, 1e-3, 0.99, 0.02, h.ctx);
  const long before = h.evals.deriv_evals();
  certified_decrement(x, 1, 0.5, 1e-3, 0.99, 0.02, h.ctx);
  EXPECT_EQ(h.evals.deriv_evals(), before);
}

TEST(Termination, FirstOrderContinues) {
  PolynomialProblem lin(0.0, vec({1, 0}), Matrix::Zero(2, 2), SymTensor());
  Harness h(std::make_shared<PolynomialProblem>(lin), CorruptionPolicy::None, {0.1});
  const auto out = termination_test(Vector::Zero(2), 0.5, {1e-3}, 0.99, 0.01, h.ctx);
  ASSERT_TRUE(std::holds_alternative<Continue>(out));
  const auto& c = std::get<Continue>(out);
  EXPECT_EQ(c.j, 1);
  EXPECT_NEAR(c.cert.dT, 0.5, 1e-15);
  EXPECT_GT(c.cert.dT, termination_threshold(1e-3, 0.01, 0.5, 1));
}

TEST(Termination, MinimizerOfConvexQuadratic) {
  auto p = std::make_shared<QuadraticProblem>(3, 10.0, 4);
  Harness h(p, CorruptionPolicy::None, {0.1, 0.1});
  const auto out = termination_test(p->minimizer(), 0.5, {1e-3, 1e-3}, 0.99, 0.02, h.ctx);
  ASSERT_TRUE(std::holds_alternative<Terminated>(out));
  EXPECT_EQ(std::get<Terminated>(out).certificates.size(), 2u);
}

TEST(Termination, SaddlePointNeedsSecondOrder) {
  auto p = std::make_shared<SaddleProblem>(0.0);
  Harness h(p, CorruptionPolicy::None, {0.1, 0.1});
  const double delta = 0.1;
  const auto out = termination_test(Vector::Zero(2), delta, {1e-2, 1e-2}, 0.99, 0.02, h.ctx);
  ASSERT_TRUE(std::holds_alternative<Continue>(out));
  EXPECT_EQ(std::get<Continue>(out).j, 2);
  EXPECT_NEAR(phi_reference(*p, Vector::Zero(2), 2, delta), delta * delta, 1e-9);
}

TEST(Termination, TightenCapHoldsOnRandomStarts) {
  std::mt19937_64 rng(41);
  auto p = std::make_shared<RosenbrockProblem>();
  for (int trial = 0; trial < 30; ++trial) {
    Harness h(p, CorruptionPolicy::Adversarial, {1.0, 1.0}, trial);
    const Vector x = random_vector(rng, 2);
    const double eps = std::pow(10.0, -1.0 - trial % 4), delta = 0.05 + 0.03 * (trial % 10);
    for (int j = 1; j <= 2; ++j) {
      const auto cert = certified_decrement(x, j, delta, eps, 0.99, 0.02, h.ctx);
      EXPECT_LE(cert.tightenings,
                certified_decrement_tighten_cap(j, delta, eps, 0.99, 0.02, 0.1, 1.0));
    }
  }
}
