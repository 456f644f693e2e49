#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "sipm/solver.hpp"

using namespace sipm;

namespace {

SolverConfig quadratic_config(std::size_t maxiter, double mu1, double theta0) {
  SolverConfig c;
  c.mode = Setting::deterministic;
  c.param_mode = ParamMode::practical;
  c.schedule = build_staircase(mu1, maxiter, theta0);
  c.buffers.mode = ParamMode::practical;
  c.buffers.maxiter = maxiter;
  c.maxiter = maxiter;
  return c;
}

}  // namespace

TEST(BuildHk, Practical) {
  const Bounds b = Bounds::uniform(1, 0, 2);
  const Vector x{1};
  const auto h = build_hk(x, b, 1, 1, HkStrategy::practical);
  EXPECT_EQ(h.diag, Vector{3});
  EXPECT_EQ(h.lambda_min, 3.0);
  const auto h0 = build_hk(x, b, 1e-300, 2, HkStrategy::practical);
  EXPECT_DOUBLE_EQ(h0.diag[0], 2.0);
}

TEST(BuildHk, IdentityAndCustom) {
  const Bounds b = Bounds::uniform(2, 0, 2);
  const Vector x{1, 0.5};
  const auto id = build_hk(x, b, 1, 1, HkStrategy::identity);
  EXPECT_EQ(id.diag, (Vector{1, 1}));
  EXPECT_EQ(id.lambda_min, 1.0);
  EXPECT_EQ(id.lambda_max, 1.0);
  const Vector custom{2, 5};
  EXPECT_EQ(build_hk(x, b, 1, 1, HkStrategy::custom, custom, 1, 6).lambda_max, 5.0);
  try {
    build_hk(x, b, 1, 1, HkStrategy::custom, custom, 3, 6);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::eigenvalue_bound_violation);
  }
  const Vector edge{2};
  EXPECT_THROW(build_hk(edge, Bounds::uniform(1, 0, 2), 1, 1, HkStrategy::practical), Error);
}

TEST(SipmStep, MatchesHandTrace) {
  // f(x) = (x - 1.5)^2 / 2 on [0, 2], x1 = 1, mu1 = 0.1, theta0 = 0.05,
  // identity H, exponents (-1, -1, 0).
  const QuadraticObjective f(Vector{1.5}, Vector{1});
  const Bounds b = Bounds::uniform(1, 0, 2);
  SolverConfig c;
  c.param_mode = ParamMode::theory;
  c.schedule = PowerSchedule{0.1, 0.05, {-1, -1, 0}};
  c.buffers.mode = ParamMode::theory;
  c.buffers.alpha_buff_base = kInf;
  c.buffers.gamma_buff_base = kInf;
  c.constants = {1.0, 1.5, 0.0};
  c.hk = HkStrategy::identity;
  const SipmStepper stepper(c, b);

  SolverState s{{1.0}, 1};
  for (int k = 1; k <= 3; ++k) {
    const double x = s.x[0];
    const double mu = 0.1 / k;
    const double theta = 0.05 / (k + 1), theta_prev = 0.05 / k;
    const auto o = oracle::step_1d(x, x - 1.5, 0, 2, mu, theta, theta_prev, 1, 1.5, 2);
    const auto out = stepper.step(s, f.gradient(s.x));
    EXPECT_NEAR(out.q[0], o.q, 1e-12);
    EXPECT_NEAR(out.bundle.alpha_min, o.alpha_min, 1e-12);
    EXPECT_NEAR(out.bundle.alpha_pre, o.alpha_pre, 1e-12);
    EXPECT_NEAR(out.bundle.gamma_bar, o.gamma_bar, 1e-12);
    EXPECT_NEAR(out.bundle.ell_k, o.ell_k, 1e-12 * o.ell_k);
    EXPECT_NEAR(out.record.alpha_k, o.alpha_k, 1e-12);
    EXPECT_NEAR(out.record.gamma_min, o.gamma_min, 1e-12);
    EXPECT_NEAR(out.record.gamma_k, o.gamma, 1e-12);
    EXPECT_NEAR(out.next.x[0], o.x_next, 1e-12);
    s = out.next;
  }
}

TEST(SipmStep, FixedPointWhenQVanishes) {
  // grad = mu/(x - l) - mu/(u - x) balances the barrier terms.
  const Bounds b = Bounds::uniform(1, 0, 2);
  SolverConfig c;
  c.schedule = PowerSchedule{0.1, 0.05, {-1, -1, 0}};
  const SipmStepper stepper(c, b);
  const Vector x{0.5};
  const Vector g{0.1 / 0.5 - 0.1 / 1.5};
  const auto out = stepper.step({x, 1}, g);
  EXPECT_NEAR(out.next.x[0], 0.5, 1e-15);
  EXPECT_EQ(out.record.gamma_k, out.bundle.gamma_max);
}

TEST(Run, ZeroIterationsReturnsStart) {
  const QuadraticObjective f(Vector{0.2, -0.3}, Vector{1, 1});
  const Bounds b = Bounds::uniform(2, -1, 1);
  auto c = quadratic_config(10, 1e-3, 0.1);
  c.maxiter = 0;
  const Vector x1{0.01, -0.01};
  const auto r = run_sipm(f, b, c, x1);
  EXPECT_EQ(r.final_x, x1);
  EXPECT_EQ(r.iterations, 0u);
}

TEST(Run, StartErrors) {
  const QuadraticObjective f(Vector{0.2}, Vector{1});
  const Bounds b = Bounds::uniform(1, -1, 1);
  auto c = quadratic_config(10, 1e-3, 0.5);
  const Vector edge{0.9};
  try {
    run_sipm(f, b, c, edge);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::infeasible_start);
  }
  c.schedule = build_staircase(1e-3, 10, 1.0);
  const Vector x{0};
  try {
    run_sipm(f, b, c, x);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::theta_too_large);
  }
}

TEST(Run, RejectsBadStochasticExponents) {
  const QuadraticObjective f(Vector{0.2}, Vector{1}, 0.1, 10, 1);
  const Bounds b = Bounds::uniform(1, -1, 1);
  SolverConfig c;
  c.mode = Setting::stochastic;
  c.param_mode = ParamMode::theory;
  c.schedule = PowerSchedule{0.1, 0.05, {-1, -1, 0}};
  const Vector x{0};
  EXPECT_THROW(run_sipm(f, b, c, x), Error);
}

TEST(Run, DeterministicQuadraticConvergesWithCleanAudit) {
  const Vector center{0.3, -0.5, 0.1, 0.7, -0.2};
  const Vector curv{1, 2, 0.5, 1.5, 3};
  const QuadraticObjective f(center, curv);
  const Bounds b = Bounds::uniform(5, -1, 1);
  const Vector x1{0.005, -0.003, 0.001, 0.0, -0.008};
  auto c = quadratic_config(2000, 1e-3, 0.1);
  c.constants = {3.0, 3 * 1.7, 0.0};
  c.audit = AuditLevel::full_trace;
  const auto r = run_sipm(f, b, c, x1);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_EQ(r.records.size(), 2000u);
  EXPECT_LE(r.final_projected_grad_norm, 1e-4);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(r.final_x[i], center[i], 1e-3);
  // The running minimum of ||q_k|| is nonincreasing and reaches 1e-3.
  double best = kInf;
  for (const auto& rec : r.records) best = std::min(best, rec.q_norm);
  EXPECT_LE(best, 1e-3);
  ASSERT_TRUE(r.final_kkt.has_value());
  EXPECT_NEAR(r.final_kkt->complementarity_residual, 1e-8, 1e-22);
}

TEST(Run, AuditFlagsUnderestimatedLipschitzConstant) {
  // Curvature 50 with ell_f = 1e-3 makes the step far too long.
  const QuadraticObjective f(Vector{0.5}, Vector{50});
  const Bounds b = Bounds::uniform(1, -1, 1);
  auto c = quadratic_config(50, 1e-3, 0.1);
  c.constants = {1e-3, 50, 0};
  c.audit = AuditLevel::invariants;
  const Vector x1{0};
  try {
    run_sipm(f, b, c, x1);
    FAIL() << "expected an invariant violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::invariant_violation);
  }
  c.strict_audit = false;
  const auto r = run_sipm(f, b, c, x1);
  EXPECT_FALSE(r.violations.empty());
}

TEST(Run, StochasticRunsAreReproducible) {
  const QuadraticObjective f(Vector{0.3, -0.4}, Vector{1, 2}, 0.5, 50, 7);
  const Bounds b = Bounds::uniform(2, -1, 1);
  SolverConfig c;
  c.mode = Setting::stochastic;
  c.param_mode = ParamMode::theory;
  c.schedule = PowerSchedule{0.05, 0.01, {-0.75, -0.75, -0.25}};
  c.buffers.mode = ParamMode::theory;
  c.buffers.t_mu = -0.75;
  c.constants = {2, 3, 0.5};
  c.maxiter = 300;
  c.batch_fraction = 0.1;
  c.seed = 42;
  c.keep_records = true;
  const Vector x1{0, 0};
  const auto a = run_sipm(f, b, c, x1);
  const auto a2 = run_sipm(f, b, c, x1);
  EXPECT_EQ(a.final_x, a2.final_x);
  ASSERT_EQ(a.records.size(), a2.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    EXPECT_EQ(a.records[i].alpha_k, a2.records[i].alpha_k);
    EXPECT_EQ(a.records[i].gamma_k, a2.records[i].gamma_k);
  }
  c.seed = 43;
  EXPECT_NE(run_sipm(f, b, c, x1).final_x, a.final_x);
}
