// Minimal use of the library: minimize a separable quadratic over a box
// whose minimizer lies partly outside, then print the final iterate.
#include <cstdio>

#include "sipm/sipm.hpp"

int main() {
  using namespace sipm;
  const QuadraticObjective f(Vector{0.5, 1.8, -0.3}, Vector{1.0, 2.0, 0.5});
  const Bounds box = Bounds::uniform(3, -1.0, 1.0);
  const Vector x1 = initial_point(3, 0);

  const std::size_t maxiter = 1000;
  const double delta = range_gap(box, 100.0);
  const double mu1 = mu1_init(f.gradient(x1), x1, box);
  const double kappa = 2.0 * 2.8;  // max c_i (1 + |center_i|)
  const double theta0 = theta0_init(x1, box, kappa, 0.0, mu1, delta);

  SolverConfig config;
  config.schedule = build_staircase(mu1, maxiter, theta0);
  config.buffers.maxiter = maxiter;
  config.constants = {2.0, kappa, 0.0};
  config.maxiter = maxiter;
  config.audit = AuditLevel::invariants;

  const RunResult r = run_sipm(f, box, config, x1);
  std::printf("x = [% .6f, % .6f, % .6f]\n", r.final_x[0], r.final_x[1], r.final_x[2]);
  std::printf("f = %.6g, projected gradient = %.3g, stalls = %zu\n", r.final_objective,
              r.final_projected_grad_norm, r.stall_count);
  return 0;
}
