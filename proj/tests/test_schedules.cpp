#include <cmath>

#include <gtest/gtest.h>

#include "sipm/schedules.hpp"

using namespace sipm;

TEST(Exponents, PaperExamples) {
  EXPECT_TRUE(validate_exponents({-0.75, -0.75, -0.25}, Setting::stochastic).empty());
  EXPECT_FALSE(validate_exponents({-1, -1, 0}, Setting::stochastic).empty());
  EXPECT_TRUE(validate_exponents({-1, -1, 0}, Setting::deterministic).empty());
}

TEST(Exponents, ReportsEveryViolation) {
  // t_mu != t_theta, t_mu not < -1/2, t_alpha not < 0, t_mu + 2 t_alpha not < -1
  const auto v = validate_exponents({-0.4, -0.6, 0.1}, Setting::stochastic);
  EXPECT_EQ(v.size(), 4u);
}

TEST(Exponents, BoundaryLines) {
  // t_mu + t_alpha = -1 is admissible (closed side).
  EXPECT_TRUE(validate_exponents({-0.7, -0.7, -0.3}, Setting::stochastic).empty());
  EXPECT_TRUE(validate_exponents({-0.6, -0.6, -0.4}, Setting::deterministic).empty());
  // t_mu = -1/2 is excluded in the stochastic region.
  EXPECT_FALSE(validate_exponents({-0.5, -0.5, -0.3}, Setting::stochastic).empty());
  // t_mu + 2 t_alpha = -1 is excluded.
  EXPECT_FALSE(validate_exponents({-0.8, -0.8, -0.1}, Setting::stochastic).empty());
  // Deterministic: t_mu + t_alpha = 0 excluded, t_mu + t_alpha < -1 excluded.
  EXPECT_FALSE(validate_exponents({-0.5, -0.5, 0.5}, Setting::deterministic).empty());
  EXPECT_FALSE(validate_exponents({-1, -1, -0.5}, Setting::deterministic).empty());
}

TEST(PowerSchedule, Examples) {
  Schedule s = PowerSchedule{1.0, 0.2, {-1, -0.5, 0}};
  EXPECT_DOUBLE_EQ(mu_at(s, 4), 0.25);
  // theta_3 = theta0 * 4^-1/2
  EXPECT_DOUBLE_EQ(theta_at(s, 3), 0.1);
  EXPECT_DOUBLE_EQ(theta_at(s, 0), 0.2);
  EXPECT_THROW(mu_at(s, 0), Error);
}

TEST(PowerSchedule, MonotoneAndVanishing) {
  Schedule s = PowerSchedule{0.5, 0.1, {-0.75, -0.75, -0.25}};
  for (std::size_t k = 1; k < 1000; ++k) {
    EXPECT_GE(mu_at(s, k), mu_at(s, k + 1));
    EXPECT_GE(theta_at(s, k - 1), theta_at(s, k));
    EXPECT_GT(mu_at(s, k + 1), 0);
  }
  EXPECT_LT(mu_at(s, 1000000), 1e-4);
}

TEST(Staircase, PaperFinalBarrier) {
  const auto st = build_staircase(1.0, 90, 0.1);
  Schedule s = st;
  EXPECT_DOUBLE_EQ(mu_at(s, 90), 1e-8);
  EXPECT_THROW(mu_at(s, 91), Error);
}

TEST(Staircase, HundredIterationsFromOne) {
  const auto st = build_staircase(1.0, 100, 0.1);
  ASSERT_EQ(st.levels.size(), 9u);
  EXPECT_EQ(st.repetition_length, 11u);
  EXPECT_DOUBLE_EQ(st.levels.back(), 1e-8);
  EXPECT_DOUBLE_EQ(st.level_at(99), 1e-8);
  EXPECT_DOUBLE_EQ(st.level_at(100), 1e-8);
  EXPECT_DOUBLE_EQ(st.level_at(88), 1e-7);
  // Iterations summed over levels equal maxiter; levels strictly decrease.
  std::size_t total = 0;
  for (double level : st.levels) {
    for (std::size_t k = 1; k <= 100; ++k) total += st.level_at(k) == level;
  }
  EXPECT_EQ(total, 100u);
  for (std::size_t j = 1; j < st.levels.size(); ++j) EXPECT_LT(st.levels[j], st.levels[j - 1]);
}

TEST(Staircase, SmallMu) {
  const auto st = build_staircase(1e-5, 40, 0.1);
  ASSERT_EQ(st.levels.size(), 4u);
  EXPECT_DOUBLE_EQ(st.levels[2], 1e-2);
  EXPECT_NEAR(st.levels[3], 1e-3, 1e-18);
  EXPECT_EQ(st.repetition_length, 10u);
}

TEST(Staircase, DegenerateAndInvalid) {
  const auto st = build_staircase(1e-8, 10, 0.1);
  EXPECT_TRUE(st.degenerate);
  EXPECT_EQ(st.levels, (Vector{1.0, 1.0}));
  Schedule s = st;
  for (std::size_t k = 1; k <= 10; ++k) EXPECT_DOUBLE_EQ(mu_at(s, k), 1e-8);
  EXPECT_THROW(build_staircase(1e-9, 10, 0.1), Error);
}

TEST(Staircase, ShortHorizonUsesLastLevel) {
  const auto st = build_staircase(1.0, 5, 0.1);
  EXPECT_EQ(st.repetition_length, 0u);
  EXPECT_DOUBLE_EQ(st.level_at(1), 1e-8);
  EXPECT_DOUBLE_EQ(st.level_at(0), 1.0);
}

TEST(Init, Mu1) {
  const Bounds b = Bounds::uniform(1, 0, 2);
  const Vector zero{0}, x{0.5}, g{10}, center{1}, g1{1};
  EXPECT_DOUBLE_EQ(mu1_init(zero, x, b), 1e-5);
  EXPECT_DOUBLE_EQ(mu1_init(g1, center, b), 1.0);
  EXPECT_NEAR(mu1_init(g, x, b), 0.0075, 1e-15);
}

TEST(Init, Theta0) {
  const Bounds b = Bounds::uniform(1, -1, 1);
  const Vector x{0}, near{0.99};
  EXPECT_DOUBLE_EQ(theta0_init(x, b, 1, 0, 1, 2), 0.5);
  EXPECT_NEAR(theta0_init(near, b, 1, 0, 1, 2), 0.01, 1e-15);
  const Bounds half(Vector{0}, Vector{kInf});
  const Vector far{100};
  EXPECT_DOUBLE_EQ(theta0_init(far, half, 1, 0, 1, 100), 1.0 / (0.02 + 1.0));
}

TEST(Init, Mu1Threshold) {
  EXPECT_NEAR(min_mu1_threshold(0.25, 1, 0, 2), 1.0 / 3.0, 1e-15);
  EXPECT_EQ(min_mu1_threshold(0.25, 0, 0, 2), 0.0);
  EXPECT_GT(min_mu1_threshold(1 - 1e-12, 1, 0, 2), 1e11);
  EXPECT_THROW(min_mu1_threshold(1.0, 1, 0, 2), Error);
}

TEST(Buffers, PracticalAndTheory) {
  BufferSequences p;
  p.mode = ParamMode::practical;
  p.maxiter = 100;
  EXPECT_DOUBLE_EQ(p.alpha_buff(10), std::pow(10.0, 1.1));
  EXPECT_DOUBLE_EQ(p.gamma_buff(10), std::pow(10.0, 0.55));
  BufferSequences t;
  t.mode = ParamMode::theory;
  t.t_mu = -0.75;
  t.alpha_buff_base = 2;
  t.gamma_buff_base = 3;
  for (std::size_t k = 1; k < 500; ++k) {
    EXPECT_NEAR(t.alpha_buff(k) * std::pow(double(k), 1.5), 2, 1e-12);
    EXPECT_NEAR(t.gamma_buff(k) * std::pow(double(k), 0.75), 3, 1e-12);
  }
  t.alpha_buff_base = kInf;
  EXPECT_TRUE(std::isinf(t.alpha_buff(3)));
}
