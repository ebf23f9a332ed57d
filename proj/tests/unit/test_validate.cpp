#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "logsp/validate.hpp"
#include "oracles.hpp"

using namespace logsp;
using oracle::relative_error;

TEST(MValue, ZeroCoefficients) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(41);
  const StatePair s = oracle::random_state(g, {2.5, 0.0, 0.0, 0.0, 1.0, 2.0}, rng);
  const FunctionalBreakdown b = eval_breakdown(s, t);
  EXPECT_LE(relative_error(M_value(s, t), b.Q_u + b.Q_v - 2.25), 1e-14);
  EXPECT_DOUBLE_EQ(M_scale(b, s.params()), b.Q_u + b.Q_v + 2.25);
}

TEST(Identities, NehariMinusPohozaevIsM) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> lam(-3.0, 3.0);
  for (int k = 0; k < 20; ++k) {
    const ModelParams prm{2.0 + k * 0.1, 0.7, -0.3, 0.4, 1.1, 0.9};
    const StatePair s = oracle::random_state(g, prm, rng);
    const FunctionalBreakdown b = eval_breakdown(s, t);
    const double l1 = lam(rng), l2 = lam(rng);
    const double diff = nehari_terms(b, prm, l1, l2).sum() - pohozaev_terms(b, prm, l1, l2).sum();
    EXPECT_LE(std::abs(diff - M_value(b, prm)), 1e-10 * M_scale(b, prm));
    EXPECT_TRUE(std::isfinite(pohozaev_residual(s, l1, l2, t)));
    EXPECT_TRUE(std::isfinite(nehari_residual(s, l1, l2, t)));
    EXPECT_GE(pohozaev_residual(s, l1, l2, t), 0.0);
  }
}

TEST(Identities, ResidualNormalisation) {
  IdentityTerms z{{0.0, 0.0}};
  EXPECT_EQ(z.relative(), 0.0);
  IdentityTerms t{{2.0, -1.0, -0.5}};
  EXPECT_DOUBLE_EQ(t.sum(), 0.5);
  EXPECT_DOUBLE_EQ(t.relative(), 0.25);
}

TEST(Identities, PohozaevSwapInvariant) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(43);
  const StatePair s = oracle::random_state(g, {2.5, 0.7, -0.3, 0.4, 1.1, 0.9}, rng);
  EXPECT_LE(std::abs(pohozaev_residual(s, 0.3, -1.2, t) - pohozaev_residual(s.swapped(), -1.2, 0.3, t)), 1e-13);
  EXPECT_LE(std::abs(nehari_residual(s, 0.3, -1.2, t) - nehari_residual(s.swapped(), -1.2, 0.3, t)), 1e-13);
}

TEST(Identities, ZeroCoefficientNehariByHand) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(44);
  const StatePair s = oracle::random_state(g, {2.5, 0.0, 0.0, 0.0, 1.0, 1.0}, rng);
  const auto [l1, l2] = multipliers(s, t);
  // Independent path: Q from the spectral gradient, W0 from the dense oracle.
  const double Q = gradient_energy(s.u()) + gradient_energy(s.v());
  const Field rho = hadamard(s.u(), s.u()) + hadamard(s.v(), s.v());
  const double W0 = oracle::dense_W0(rho);
  const double terms[] = {Q, l1, l2, W0};
  double sum = 0.0, big = 0.0;
  for (double x : terms) {
    sum += x;
    big = std::max(big, std::abs(x));
  }
  EXPECT_NEAR(nehari_residual(s, l1, l2, t), std::abs(sum) / big, 1e-8);
}

TEST(Transform, IdentityAtOne) {
  const Grid2D g = make_grid(64, 8.0);
  std::mt19937_64 rng(45);
  const StatePair s = oracle::random_state(g, {2.5, 1.0, 1.0, 1.0, 1.0, 1.0}, rng);
  const std::vector<TransformErrors> e = check_transform(s, LogKernelTable(g), {1.0});
  ASSERT_EQ(e.size(), 1u);
  EXPECT_LE(e[0].max(), 1e-12);
  EXPECT_THROW(check_transform(s, LogKernelTable(g), {0.0}), std::invalid_argument);
}

TEST(Transform, GaussianAtTwo) {
  const Grid2D g = make_grid(256, 8.0);
  const StatePair s(Field::sample(g, [](double x, double y) { return std::exp(-(x * x + y * y)); }),
                    Field::sample(g, [](double x, double y) { return std::exp(-1.5 * ((x - 0.5) * (x - 0.5) + y * y)); }),
                    {2.5, 1.0, 0.5, 0.8, 1.0, 1.0});
  const std::vector<TransformErrors> e = check_transform(s, LogKernelTable(g), {2.0});
  EXPECT_LE(e[0].max(), 1e-3);
  EXPECT_LE(e[0].W0, 1e-3);
}

TEST(KernelBounds, RandomBattery) {
  const Grid2D g = make_grid(32, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(46);
  for (int k = 0; k < 1000; ++k) {
    const StatePair s = oracle::random_state(g, {2.5, 1.0, 1.0, 1.0, 1.0, 1.0}, rng);
    ASSERT_TRUE(check_kernel_bounds(s, t)) << k;
  }
}

TEST(KernelBounds, ZeroDensityLimit) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  const Field u = Field::sample(g, [](double x, double y) { return 1e-6 * std::exp(-(x * x + y * y)); });
  const StatePair s = StatePair::diagnostic(u, u, {2.5, 1.0, 1.0, 1.0, 1.0, 1.0});
  const KernelBounds kb = kernel_bounds(s, t);
  EXPECT_TRUE(kb.ok);
  EXPECT_LT(kb.riesz, 1e-20);
}

TEST(ValidateState, SplitAndHls) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(47);
  const StatePair s = oracle::random_state(g, {2.5, 1.0, 1.0, 1.0, 1.0, 1.0}, rng);
  const IdentityReport r = validate_state(s, t, {0.5, 1.0, 2.0});
  EXPECT_LE(r.split_error, 1e-10);
  EXPECT_TRUE(r.hls_ok);
  EXPECT_EQ(r.transform_errors.size(), 3u);
  EXPECT_DOUBLE_EQ(r.M_value, M_value(s, t));
}
