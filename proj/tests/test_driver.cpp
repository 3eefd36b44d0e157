#include <gtest/gtest.h>

#include "support.hpp"

using namespace trqda;
using namespace testing_support;

namespace {

AuditOptions exact_L(double L) {
  AuditOptions o;
  o.L_f = L;
  return o;
}

}  // namespace

TEST(Config, DefaultsAreValid) {
  for (int q = 1; q <= 3; ++q) EXPECT_NO_THROW(TrConfig::defaults(q, {1e-3}).validate());
  TrConfig c = TrConfig::defaults(1, {1e-3});
  c.eta1 = 0.5;
  c.omega = 0.3;
  EXPECT_THROW(c.validate(), ConfigError);
  c = TrConfig::defaults(2, {1e-3});
  c.gamma3 = 0.9;
  EXPECT_THROW(c.validate(), ConfigError);
}

TEST(RadiusUpdate, Endpoints) {
  const TrConfig c = TrConfig::defaults(1, {1e-3});
  EXPECT_DOUBLE_EQ(update_radius(c, 1.0, 0.0), c.gamma2);
  EXPECT_DOUBLE_EQ(update_radius(c, 1.0, 0.5), 1.0);
  EXPECT_DOUBLE_EQ(update_radius(c, 1.0, 0.95), c.gamma3);
  EXPECT_DOUBLE_EQ(update_radius(c, 80.0, 0.95), c.Delta_max);
}

TEST(Run, OneDimensionalQuadratic) {
  auto p = std::make_shared<QuadraticProblem>(Matrix::Identity(1, 1), Vector::Zero(1));
  InexactOracle o(p, CorruptionPolicy::None, 0);
  TrConfig c = TrConfig::defaults(1, {1e-4});
  const RunResult r = run(o, c, vec({1.0}));
  ASSERT_TRUE(r.terminated);
  EXPECT_LE(std::abs(r.x_eps(0)), 1e-4);
  const AuditReport a = check_history(r, *p, c, vec({1.0}));
  EXPECT_TRUE(a.ok()) << a.violations.front().detail;
}

TEST(Run, SaddleEscape) {
  auto p = std::make_shared<SaddleProblem>(0.25);
  InexactOracle o(p, CorruptionPolicy::Adversarial, 3);
  TrConfig c = TrConfig::defaults(2, {1e-3});
  const Vector x0 = vec({0.5, 0.0});
  const RunResult r = run(o, c, x0);
  ASSERT_TRUE(r.terminated);
  // the stable manifold y = 0 leads to the saddle; second order moves off it
  EXPECT_GT(std::abs(r.x_eps(1)), 1.0);
  EXPECT_LE(phi_exact(*p, r.x_eps, 2, r.delta_eps),
            c.eps[1] * r.delta_eps * r.delta_eps / 2 + 1e-8);
  const AuditReport a = check_history(r, *p, c, x0);
  EXPECT_TRUE(a.ok());
}

TEST(Run, RosenbrockSecondOrderTenSeeds) {
  auto p = std::make_shared<RosenbrockProblem>();
  TrConfig c = TrConfig::defaults(2, {1e-3, 1e-3});
  const Vector x0 = vec({-1.2, 1.0});
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    InexactOracle o(p, CorruptionPolicy::Adversarial, seed);
    c.seed = seed;
    const RunResult r = run(o, c, x0);
    ASSERT_TRUE(r.terminated) << "seed " << seed;
    const double gn = p->derivative(r.x_eps, 1).vector().norm();
    EXPECT_LE(gn, 1e-3 + 1e-6) << "seed " << seed;
    const AuditReport a = check_history(r, *p, c, x0);
    EXPECT_EQ(a.count("decrease_floor"), 0);
    EXPECT_EQ(a.count("radius_floor"), 0);
    EXPECT_TRUE(a.ok()) << "seed " << seed << ": " << a.violations.front().check;
  }
}

TEST(Run, DeterministicGivenSeeds) {
  auto p = std::make_shared<RosenbrockProblem>();
  TrConfig c = TrConfig::defaults(2, {1e-2});
  InexactOracle a(p, CorruptionPolicy::GaussianClipped, 5), b(p, CorruptionPolicy::GaussianClipped, 5);
  const RunResult ra = run(a, c, p->default_start()), rb = run(b, c, p->default_start());
  ASSERT_EQ(ra.history.size(), rb.history.size());
  for (std::size_t i = 0; i < ra.history.size(); ++i) EXPECT_TRUE(ra.history[i] == rb.history[i]);
}

TEST(Run, SinkSeesEveryIteration) {
  auto p = std::make_shared<QuadraticProblem>(3, 10.0, 1);
  InexactOracle o(p, CorruptionPolicy::Adversarial, 1);
  long seen = 0;
  const RunResult r = run(o, TrConfig::defaults(1, {1e-4}), p->default_start(),
                          [&](const IterationRecord& rec) { EXPECT_EQ(rec.k, seen++); });
  EXPECT_EQ(seen, r.iterations());
}

TEST(Run, IterationCapIsNotAnError) {
  auto p = std::make_shared<RosenbrockProblem>();
  InexactOracle o(p, CorruptionPolicy::None, 0);
  TrConfig c = TrConfig::defaults(1, {1e-6});
  c.max_iterations = 5;
  const RunResult r = run(o, c, p->default_start());
  EXPECT_FALSE(r.terminated);
  EXPECT_EQ(r.iterations(), 5);
}

TEST(Run, ToleranceBelowRoundingIsReported) {
  auto p = std::make_shared<QuadraticProblem>(3, 30.0, 12);
  InexactOracle o(p, CorruptionPolicy::None, 0);
  TrConfig c = TrConfig::defaults(1, {1e-8});
  EXPECT_THROW(run(o, c, vec({3, -2, 1})), std::runtime_error);
}

TEST(Run, RejectsBadInput) {
  auto p = std::make_shared<RosenbrockProblem>();
  InexactOracle o(p, CorruptionPolicy::None, 0);
  EXPECT_THROW(run(o, TrConfig::defaults(1, {1e-3}), vec({1, 2, 3})), std::invalid_argument);
  TrConfig bad = TrConfig::defaults(1, {1e-3});
  bad.omega = 0.5;
  EXPECT_THROW(run(o, bad, p->default_start()), ConfigError);
}

TEST(Run, StepOneSkippedOnlyAfterFailureWithLargeRadius) {
  auto p = std::make_shared<RosenbrockProblem>();
  InexactOracle o(p, CorruptionPolicy::Adversarial, 2);
  TrConfig c = TrConfig::defaults(1, {1e-3});
  const RunResult r = run(o, c, p->default_start());
  for (std::size_t i = 1; i < r.history.size(); ++i) {
    const auto& prev = r.history[i - 1];
    const auto& cur = r.history[i];
    EXPECT_EQ(cur.step1_skipped, !prev.successful && cur.Delta >= c.vartheta);
    if (cur.step1_skipped) EXPECT_EQ(cur.j, prev.j);
  }
}

TEST(Audit, QuadraticExactLipschitz) {
  auto p = std::make_shared<QuadraticProblem>(4, 20.0, 6);
  TrConfig c = TrConfig::defaults(2, {1e-4});
  InexactOracle o(p, CorruptionPolicy::Adversarial, 6);
  const RunResult r = run(o, c, p->default_start());
  ASSERT_TRUE(r.terminated);
  const AuditReport a = check_history(r, *p, c, p->default_start());
  EXPECT_FALSE(a.lipschitz.estimated.at(0));
  EXPECT_DOUBLE_EQ(a.lipschitz.L_f, 20.0);
  EXPECT_TRUE(a.ok());
}

TEST(Audit, RosenbrockExactOracleBoxEstimate) {
  auto p = std::make_shared<RosenbrockProblem>();
  TrConfig c = TrConfig::defaults(1, {1e-3});
  InexactOracle o(p, CorruptionPolicy::None, 0);
  const RunResult r = run(o, c, p->default_start());
  const AuditReport a = check_history(r, *p, c, p->default_start());
  EXPECT_TRUE(a.lipschitz.estimated.at(0));
  EXPECT_TRUE(a.ok());
}

TEST(Audit, AdversarialTenSeedsDecreaseAndRadius) {
  auto p = std::make_shared<QuadraticProblem>(3, 50.0, 9);
  TrConfig c = TrConfig::defaults(1, {1e-5});
  for (std::uint64_t s = 0; s < 10; ++s) {
    InexactOracle o(p, CorruptionPolicy::Adversarial, s);
    const RunResult r = run(o, c, p->default_start());
    const AuditReport a = check_history(r, *p, c, p->default_start(), exact_L(50.0));
    EXPECT_EQ(a.count("decrease_floor"), 0);
    EXPECT_EQ(a.count("radius_floor"), 0);
  }
}

TEST(Audit, OmegaNearItsLimit) {
  auto p = std::make_shared<RosenbrockProblem>();
  TrConfig c = TrConfig::defaults(2, {1e-3});
  c.omega = 0.999 * TrConfig::omega_limit(c.eta1, c.eta2);
  for (std::uint64_t s = 0; s < 3; ++s) {
    InexactOracle o(p, CorruptionPolicy::Adversarial, s);
    const RunResult r = run(o, c, p->default_start());
    ASSERT_TRUE(r.terminated);
    const AuditReport a = check_history(r, *p, c, p->default_start());
    EXPECT_TRUE(a.ok());
  }
}

TEST(Audit, DetectsTamperedHistory) {
  auto p = std::make_shared<QuadraticProblem>(2, 5.0, 2);
  TrConfig c = TrConfig::defaults(1, {1e-3});
  InexactOracle o(p, CorruptionPolicy::None, 0);
  RunResult r = run(o, c, p->default_start());
  ASSERT_FALSE(r.history.empty());
  r.history.front().f_bar_new += 1.0;
  r.history.front().Delta = 1e-30;
  const AuditReport a = check_history(r, *p, c, p->default_start());
  EXPECT_GT(a.count("f_accuracy"), 0);
  EXPECT_GT(a.count("radius_floor"), 0);
}

TEST(Run, ThirdOrderSmoke) {
  for (const char* name : {"quartic", "saddle", "rosenbrock"}) {
    auto p = make_problem(name);
    InexactOracle o(p, CorruptionPolicy::Adversarial, 4);
    TrConfig c = TrConfig::defaults(3, {1e-2});
    const RunResult r = run(o, c, p->default_start());
    EXPECT_TRUE(r.terminated) << name;
    EXPECT_LE(p->value(r.x_eps), p->value(p->default_start())) << name;
  }
}

// A classical trust region on f = 1/2 x'Ax - b'x with steepest-descent steps to
// the boundary (q = 1, exact data), written without the library's machinery.
TEST(Run, ExactModeMatchesClassicalTrustRegion) {
  auto p = std::make_shared<QuadraticProblem>(3, 30.0, 12);
  const Matrix A = p->hessian();
  const Vector bvec = p->linear();
  TrConfig c = TrConfig::defaults(1, {1e-5});
  c.zeta0 = {1e-14};
  InexactOracle o(p, CorruptionPolicy::None, 0);
  const Vector x0 = vec({3, -2, 1});
  const RunResult r = run(o, c, x0);
  ASSERT_GE(r.history.size(), 20u);

  Vector x = x0;
  double D = c.Delta0;
  for (int k = 0; k < 20; ++k) {
    EXPECT_LE((r.history[k].x - x).norm(), 1e-10) << "iteration " << k;
    const Vector g = A * x - bvec;
    const Vector s = -D * g / g.norm();
    const double pred = -(g.dot(s));
    const double fx = 0.5 * x.dot(A * x) - bvec.dot(x);
    const Vector xs = x + s;
    const double fs = 0.5 * xs.dot(A * xs) - bvec.dot(xs);
    const double rho = (fx - fs) / pred;
    if (rho >= c.eta1) x = xs;
    D = rho < c.eta1 ? c.gamma2 * D : rho < c.eta2 ? D : std::min(c.Delta_max, c.gamma3 * D);
  }
}
