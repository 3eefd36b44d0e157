// Minimal library use: second-order run on Rosenbrock with a noisy oracle,
// then an audit of the trajectory against exact data.
#include <iostream>
#include <memory>

#include "trqda/trqda.hpp"

int main() {
  using namespace trqda;
  auto problem = std::make_shared<RosenbrockProblem>();
  InexactOracle oracle(problem, CorruptionPolicy::GaussianClipped, /*seed=*/1);

  TrConfig cfg = TrConfig::defaults(2, {1e-4, 1e-4});
  const Vector x0 = problem->default_start();
  RunResult r = run(oracle, cfg, x0, [](const IterationRecord& rec) {
    if (rec.k % 1000 == 0)
      std::cout << "k=" << rec.k << " Delta=" << rec.Delta << " f~" << rec.f_bar_old << '\n';
  });

  std::cout << "terminated: " << r.terminated << " at (" << r.x_eps.transpose() << ")\n"
            << "iterations " << r.iterations() << ", f evals " << r.evals.f_evals()
            << ", derivative rounds " << r.deriv_rounds << '\n';

  AuditReport audit = check_history(r, *problem, cfg, x0);
  std::cout << "audit: " << (audit.ok() ? "clean" : "violations") << '\n';
  return audit.ok() && r.terminated ? 0 : 1;
}
