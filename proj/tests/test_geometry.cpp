#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "sipm/barrier.hpp"
#include "sipm/bounds.hpp"

using namespace sipm;

namespace {

Bounds box(Vector l, Vector u) { return Bounds(std::move(l), std::move(u)); }

template <class F>
void expect_error(Errc code, F&& f) {
  try {
    f();
    FAIL() << "expected " << to_string(code);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

}  // namespace

TEST(Bounds, CachesFiniteIndexSets) {
  const Bounds b = box({0, -kInf, 1}, {kInf, 3, 2});
  EXPECT_EQ(b.lower_indices(), (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(b.upper_indices(), (std::vector<std::size_t>{1, 2}));
  EXPECT_EQ(b.finite_side_count(), 4u);
}

TEST(Bounds, RejectsInvalidBoxes) {
  expect_error(Errc::invalid_bounds, [] { box({1}, {1}); });
  expect_error(Errc::invalid_bounds, [] { box({2}, {1}); });
  expect_error(Errc::invalid_bounds, [] { box({-kInf}, {kInf}); });
  expect_error(Errc::invalid_bounds, [] { box({NAN}, {1}); });
  expect_error(Errc::dimension_mismatch, [] { box({0, 0}, {1}); });
}

TEST(RangeGap, Examples) {
  EXPECT_EQ(range_gap(box({0, 0}, {2, 5}), 100), 2.0);
  EXPECT_EQ(range_gap(box({0}, {kInf}), 100), 100.0);
  EXPECT_EQ(range_gap(box({-1, -1}, {1, 1}), 0.5), 0.5);
}

TEST(Neighborhood, Membership) {
  const Vector a{0.1}, b{0.05}, c{1.95};
  EXPECT_TRUE(in_neighborhood(a, box({0}, {2}), 0.1));
  EXPECT_FALSE(in_neighborhood(b, box({0}, {2}), 0.1));
  EXPECT_TRUE(in_neighborhood(c, box({0}, {kInf}), 0.1));
}

TEST(Neighborhood, Projection) {
  const Vector a{-1}, b{1}, c{3, -3};
  EXPECT_EQ(project_to_neighborhood(a, box({0}, {2}), 0.1), Vector{0.1});
  EXPECT_EQ(project_to_neighborhood(b, box({0}, {2}), 0.1), Vector{1});
  EXPECT_EQ(project_to_neighborhood(c, box({0, 0}, {2, 2}), 0.25), (Vector{1.75, 0.25}));
  expect_error(Errc::empty_neighborhood, [&] { project_to_neighborhood(b, box({0}, {2}), 1.0); });
}

TEST(Neighborhood, ProjectionIsIdempotentAndNested) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-3, 3);
  const Bounds b = box({-1, 0, -kInf}, {1, kInf, 2});
  for (int t = 0; t < 200; ++t) {
    const Vector x{u(rng), u(rng), u(rng)};
    const double theta = 0.4 * std::abs(u(rng)) / 3.0;
    const Vector p = project_to_neighborhood(x, b, theta);
    EXPECT_TRUE(in_neighborhood(p, b, theta));
    EXPECT_EQ(project_to_neighborhood(p, b, theta), p);
    EXPECT_TRUE(in_neighborhood(p, b, 0.5 * theta));
  }
}

TEST(Barrier, Values) {
  const Vector x1{1, 1}, x2{0.5}, x3{5};
  EXPECT_DOUBLE_EQ(barrier_value(0, x1, box({0, 0}, {2, 2}), 0.5), 0.0);
  EXPECT_NEAR(barrier_value(1, x2, box({0}, {2}), 1), 1 - std::log(0.5) - std::log(1.5), 1e-15);
  EXPECT_NEAR(barrier_value(1, x2, box({0}, {2}), 1), 1.287682, 1e-6);
  EXPECT_NEAR(barrier_value(2, x3, box({0}, {kInf}), 1), 0.390562, 1e-6);
  const Vector out{2};
  expect_error(Errc::not_interior, [&] { barrier_value(0, out, box({0}, {2}), 1); });
}

TEST(Barrier, ShiftedValue) {
  const Vector x{1};
  const double phi = barrier_value(0, x, box({0}, {2}), 1);
  EXPECT_NEAR(shifted_barrier_value(0, x, box({0}, {2}), 1, std::exp(1.0)), phi + 2, 1e-15);
  const double phi2 = barrier_value(0, x, box({0}, {kInf}), 2);
  EXPECT_NEAR(shifted_barrier_value(0, x, box({0}, {kInf}), 2, std::exp(2.0)), phi2 + 4, 1e-14);
  EXPECT_NEAR(shifted_barrier_value(0, x, box({0}, {2}), 1, 1 + 1e-12), phi, 1e-11);
  EXPECT_THROW(shifted_barrier_value(0, x, box({0}, {2}), 1, 1.0), Error);
}

TEST(Barrier, DefaultChi) {
  EXPECT_EQ(default_chi(box({-1, 0}, {1, 5})), 6.0);
  EXPECT_EQ(default_chi(box({0}, {kInf})), 1.0 + 1e-6);
}

TEST(Barrier, Gradient) {
  const Vector g1{3}, x1{1};
  EXPECT_EQ(barrier_gradient(g1, x1, box({0}, {2}), 1), Vector{3});
  const Vector g2{0}, x2{2};
  EXPECT_EQ(barrier_gradient(g2, x2, box({0}, {kInf}), 1), Vector{-0.5});
  const Vector g3{0, 0}, x3{0.5, 1.5};
  const Vector q = barrier_gradient(g3, x3, box({0, 0}, {2, 2}), 1);
  EXPECT_NEAR(q[0], -4.0 / 3.0, 1e-15);
  EXPECT_NEAR(q[1], 4.0 / 3.0, 1e-15);
}

TEST(Barrier, GradientMatchesFiniteDifferences) {
  // f(x) = sum x_i^3 / 3, grad = x_i^2
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-0.9, 0.9);
  const Bounds b = box({-1, -1, 0}, {1, kInf, 3});
  const double mu = 0.3, h = 1e-6;
  for (int t = 0; t < 50; ++t) {
    Vector x{u(rng), u(rng) + 0.2, 1.5 + u(rng)};
    Vector g(3);
    for (int i = 0; i < 3; ++i) g[i] = x[i] * x[i];
    const Vector q = barrier_gradient(g, x, b, mu);
    const auto phi = [&](const Vector& y) {
      double f = 0;
      for (double v : y) f += v * v * v / 3;
      return barrier_value(f, y, b, mu);
    };
    for (int i = 0; i < 3; ++i) {
      Vector p = x, m = x;
      p[i] += h;
      m[i] -= h;
      const double fd = (phi(p) - phi(m)) / (2 * h);
      EXPECT_LE(std::abs(fd - q[i]), 1e-6 * std::max(1.0, std::abs(q[i])));
    }
  }
}

TEST(ProjectedGradient, Norm) {
  const Vector x1{0.5}, g1{0};
  EXPECT_EQ(projected_gradient_norm(x1, g1, box({0}, {1})), 0.0);
  const Vector g2{0.2};
  EXPECT_NEAR(projected_gradient_norm(x1, g2, box({0}, {1})), 0.2, 1e-15);
  const Vector x3{1}, g3{-1};
  EXPECT_EQ(projected_gradient_norm(x3, g3, box({0}, {1})), 0.0);
}

TEST(Kkt, Certificate) {
  const Vector x1{1}, g1{0};
  const auto c1 = kkt_certificate(x1, g1, box({0}, {2}), 0.5);
  EXPECT_EQ(c1.y, Vector{0.5});
  EXPECT_EQ(c1.z, Vector{0.5});
  EXPECT_EQ(c1.stationarity_residual, 0.0);
  EXPECT_EQ(c1.complementarity_residual, 0.5);
  const Vector x2{0.5}, g2{2};
  const auto c2 = kkt_certificate(x2, g2, box({0}, {kInf}), 1);
  EXPECT_EQ(c2.y, Vector{2});
  EXPECT_EQ(c2.z, Vector{0});
  EXPECT_EQ(c2.stationarity_residual, 0.0);
}

TEST(Kkt, ProjectedGradientVanishesAtConstructedStationaryPoint) {
  // g = y - z with the certificate multipliers at an interior point, mu -> 0
  // limit: with g = 0 and x interior the projected gradient is 0.
  const Vector x{0.3, -0.2}, g{0, 0};
  const Bounds b = box({-1, -1}, {1, 1});
  EXPECT_EQ(projected_gradient_norm(x, g, b), 0.0);
  const auto c = kkt_certificate(x, g, b, 1e-3);
  Vector gy(2);
  for (int i = 0; i < 2; ++i) gy[i] = c.y[i] - c.z[i];
  EXPECT_LT(kkt_certificate(x, gy, b, 1e-3).stationarity_residual, 1e-15);
}
