#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace trqda;
using namespace testing_support;

TEST(Spec, ParsesTextWithComments) {
  const auto kv = parse_spec_text(
      "# rosenbrock run\n"
      "problem = rosenbrock\n"
      "  q = 2   \n"
      "eps = 1e-3, 1e-4\n"
      "policy = truncate  # trailing comment\n"
      "seed = 7\n");
  const RunSpec s = build_spec(kv);
  EXPECT_EQ(s.problem, "rosenbrock");
  EXPECT_EQ(s.config.q, 2);
  EXPECT_EQ(s.config.eps, (std::vector<double>{1e-3, 1e-4}));
  EXPECT_EQ(s.policy, CorruptionPolicy::Truncate);
  EXPECT_EQ(s.config.seed, 7u);
  EXPECT_EQ(s.oracle_seed, 7u);
  EXPECT_EQ(s.config.zeta0.size(), 2u);
  EXPECT_NO_THROW(s.config.validate());
}

TEST(Spec, DashedKeysAndDerivedOmega) {
  const RunSpec s = build_spec({{"--eta1", "0.2"}, {"max-iterations", "50"}});
  EXPECT_EQ(s.config.max_iterations, 50);
  EXPECT_DOUBLE_EQ(s.config.omega, 0.9 * TrConfig::omega_limit(0.2, s.config.eta2));
}

TEST(Spec, Errors) {
  EXPECT_THROW(build_spec({{"eta1", "0.5"}, {"omega", "0.3"}}), ConfigError);
  EXPECT_THROW(build_spec({{"colour", "blue"}}), SpecError);
  EXPECT_THROW(build_spec({{"q", "two"}}), SpecError);
  EXPECT_THROW(build_spec({{"policy", "loud"}}), std::invalid_argument);
  EXPECT_THROW(build_spec({{"eps", "1e-3,1e-3,1e-3"}, {"q", "2"}}), std::invalid_argument);
  EXPECT_THROW(parse_spec_text("no equals sign here\n"), SpecError);
  try {
    build_spec({{"eta1", "0.5"}, {"omega", "0.3"}});
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("omega"), std::string::npos);
  }
}

TEST(Spec, EveryKeyIsAccepted) {
  const auto& keys = spec_keys();
  EXPECT_NE(std::find(keys.begin(), keys.end(), "eps_grid"), keys.end());
  EXPECT_NE(std::find(keys.begin(), keys.end(), "zeta0"), keys.end());
}

TEST(EpsGrid, ThirdDecadeRange) {
  EXPECT_EQ(parse_eps_grid("1e-1..1e-3"), (std::vector<double>{0.1, 0.03, 0.01, 0.003, 0.001}));
  const auto g = parse_eps_grid("1e-1..1e-4:4");
  ASSERT_EQ(g.size(), 4u);
  EXPECT_NEAR(g[1], 1e-2, 1e-15);
  EXPECT_EQ(parse_eps_grid("0.1, 0.01"), (std::vector<double>{0.1, 0.01}));
  EXPECT_EQ(parse_seeds("0..4"), (std::vector<std::uint64_t>{0, 1, 2, 3, 4}));
  EXPECT_EQ(parse_seeds("3,9"), (std::vector<std::uint64_t>{3, 9}));
}

TEST(HistoryCsv, RoundTrip) {
  auto p = std::make_shared<RosenbrockProblem>();
  InexactOracle o(p, CorruptionPolicy::GaussianClipped, 3);
  const RunResult r = run(o, TrConfig::defaults(2, {1e-2}), p->default_start());
  ASSERT_FALSE(r.history.empty());
  std::stringstream ss;
  write_history_csv(ss, r.history);
  const auto back = read_history_csv(ss);
  ASSERT_EQ(back.size(), r.history.size());
  for (std::size_t i = 0; i < back.size(); ++i) EXPECT_TRUE(back[i] == r.history[i]) << i;
}

TEST(HistoryCsv, HeaderIsFixed) {
  std::stringstream ss;
  write_history_csv(ss, {});
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header,
            "k,Delta,delta,j,rho,successful,dT_s,f_bar_old,f_bar_new,f_acc,f_acc_old,i_zeta,"
            "f_evals,deriv_evals,deriv_rounds,step1_skipped,step2_tightenings,step_fallback,x,s");
  std::stringstream bad("k,Delta\n1,2\n");
  EXPECT_THROW(read_history_csv(bad), std::runtime_error);
}

TEST(Slope, RecoversPowerLaw) {
  std::vector<double> x{1, 10, 100, 1000}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, 1.7));
  EXPECT_NEAR(fit_loglog_slope(x, y), 1.7, 1e-12);
  EXPECT_THROW(fit_loglog_slope({1, 1}, {2, 3}), std::invalid_argument);
}

TEST(Study, QuadraticSlopeIsSmall) {
  RunSpec base;
  base.problem = "quadratic";
  base.config = TrConfig::defaults(1, {1e-3});
  const auto s = eps_scaling_study(base, parse_eps_grid("1e-1..1e-4"), {0, 1}, 2);
  EXPECT_EQ(s.excluded, 0);
  EXPECT_TRUE(s.pass);
  EXPECT_LT(s.slope, 1.0);
  for (const auto& row : s.rows) EXPECT_TRUE(row.audit_ok);
  EXPECT_THROW(eps_scaling_study(base, {0.1, 0.01}, {0}), SpecError);
}

TEST(Study, ExecuteAllKeepsOrder) {
  std::vector<RunSpec> specs(3);
  for (int i = 0; i < 3; ++i) {
    specs[i].problem = "rosenbrock";
    specs[i].oracle_seed = i;
    specs[i].audit = false;
  }
  const auto par = execute_all(specs, 3);
  for (int i = 0; i < 3; ++i) {
    const Execution one = execute(specs[i]);
    EXPECT_EQ(par[i].result.iterations(), one.result.iterations());
    EXPECT_TRUE(par[i].result.x_eps == one.result.x_eps);
  }
}

TEST(Study, SummaryJsonHasBounds) {
  RunSpec s;
  s.problem = "saddle";
  s.config = TrConfig::defaults(2, {1e-2});
  const Execution ex = execute(s);
  const auto j = summary_json(s, ex);
  EXPECT_TRUE(j.contains("bounds"));
  EXPECT_TRUE(j.at("terminated").get<bool>());
}

TEST(CostReport, PowerCostFavoursDynamicAccuracy) {
  RunSpec s;
  s.problem = "rosenbrock";
  s.config = TrConfig::defaults(1, {1e-3});
  s.cost = parse_cost_model("power");
  const CostReport c = cost_savings_report(s);
  EXPECT_TRUE(c.dynamic_terminated);
  EXPECT_TRUE(c.fixed_terminated);
  EXPECT_LT(c.dynamic_cost, c.fixed_cost);
  EXPECT_LT(c.ratio, 1.0);
}

TEST(CostReport, UnitCostReportsCalls) {
  RunSpec s;
  s.problem = "quadratic";
  s.config = TrConfig::defaults(1, {1e-3});
  const CostReport c = cost_savings_report(s);
  EXPECT_DOUBLE_EQ(c.dynamic_cost, static_cast<double>(c.dynamic_calls));
  EXPECT_DOUBLE_EQ(c.fixed_cost, static_cast<double>(c.fixed_calls));
}

TEST(CostReport, StartAtMinimizer) {
  RunSpec s;
  s.problem = "quadratic";
  s.params.dim = 3;
  s.config = TrConfig::defaults(1, {1e-3});
  s.cost = parse_cost_model("power");
  const auto p = make_problem("quadratic", s.params);
  s.x0 = std::static_pointer_cast<const QuadraticProblem>(p)->minimizer();
  const CostReport c = cost_savings_report(s);
  // nothing to save: the dynamic run tightens its way down to certify, while the
  // counterpart starts at the final accuracy and needs a single round
  EXPECT_TRUE(c.dynamic_terminated);
  EXPECT_EQ(c.fixed_calls, 1);
  EXPECT_GT(c.dynamic_calls, c.fixed_calls);
  EXPECT_GT(c.ratio, 1.0);
}
