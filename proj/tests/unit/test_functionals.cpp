#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "logsp/functionals.hpp"
#include "oracles.hpp"

using namespace logsp;
using oracle::relative_error;

namespace {

Field gaussian(const Grid2D& g, double x0 = 0.0, double y0 = 0.0) {
  return Field::sample(g, [=](double x, double y) { return std::exp(-0.5 * ((x - x0) * (x - x0) + (y - y0) * (y - y0))); });
}

}  // namespace

TEST(ModelParams, Validate) {
  EXPECT_NO_THROW((ModelParams{2.0, 1, 1, 1, 1, 1}.validate()));
  EXPECT_THROW((ModelParams{1.0, 1, 1, 1, 1, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{2.0, 1, 1, 1, 0, 1}.validate()), std::invalid_argument);
  EXPECT_THROW((ModelParams{2.0, 1, 1, 1, 1, -1}.validate()), std::invalid_argument);
}

TEST(StatePair, NormalisesMasses) {
  const Grid2D g = make_grid(64, 6.0);
  std::mt19937_64 rng(1);
  const StatePair s = oracle::random_state(g, {2.5, 1, 1, 1, 0.7, 2.3}, rng);
  EXPECT_NEAR(inner(s.u(), s.u()), 0.7, 1e-12 * 0.7);
  EXPECT_NEAR(inner(s.v(), s.v()), 2.3, 1e-12 * 2.3);
  EXPECT_TRUE(s.normalized());
  EXPECT_THROW(StatePair(Field(g), Field(make_grid(64, 5.0)), {}), GridMismatch);
}

TEST(Breakdown, GaussianIntegrals) {
  const Grid2D g = make_grid(128, 8.0);
  const StatePair s = StatePair::diagnostic(gaussian(g), gaussian(g), {2.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  const FunctionalBreakdown b = eval_breakdown(s, LogKernelTable(g));
  const double pi = std::numbers::pi;
  EXPECT_NEAR(b.Q_u, pi, 1e-8);
  EXPECT_NEAR(b.Q_v, pi, 1e-8);
  EXPECT_NEAR(b.P_u, pi / 2.0, 1e-8);
  EXPECT_NEAR(b.P_v, pi / 2.0, 1e-8);
  EXPECT_NEAR(b.P0, pi / 2.0, 1e-8);
  EXPECT_DOUBLE_EQ(b.R, b.P_u + b.P_v + 2.0 * b.P0);
  // rho = 2 exp(-|x|^2): mass 2 pi, width 1. W0 is small against mass^2, so compare per unit mass.
  EXPECT_NEAR(b.W0 / (4.0 * pi * pi), oracle::gaussian_W0(1.0, 1.0), 5e-6);
}

TEST(Breakdown, W0MatchesDenseOracle) {
  const Grid2D g = make_grid(64, 8.0);
  const StatePair s = StatePair::diagnostic(gaussian(g, 0.4, 0.0), gaussian(g, -0.4, 0.2), {2.0, 0, 0, 1, 1, 1});
  const Field rho = hadamard(s.u(), s.u()) + hadamard(s.v(), s.v());
  EXPECT_LE(relative_error(eval_breakdown(s, LogKernelTable(g)).W0, oracle::dense_W0(rho)), 1e-6);
}

TEST(Breakdown, InvariantsOnRandomStates) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    const ModelParams prm{2.5, 0.8, -0.4, 0.6, 1.0, 1.5};
    const StatePair s = oracle::random_state(g, prm, rng);
    const FunctionalBreakdown b = eval_breakdown(s, t);
    EXPECT_LE(std::abs(b.W0 - (b.W1 - b.W2)) / std::max({std::abs(b.W1), std::abs(b.W2), 1.0}), 1e-10);
    EXPECT_GE(b.W1, 0.0);
    EXPECT_GE(b.W2, 0.0);
    EXPECT_GT(b.norm0_u, 0.0);
    EXPECT_DOUBLE_EQ(b.R, prm.mu1 * b.P_u + prm.mu2 * b.P_v + 2.0 * prm.beta * b.P0);
    EXPECT_LE(relative_error(b.I, 0.5 * (b.Q_u + b.Q_v) + 0.25 * b.W0 - b.R / (2.0 * prm.p)), 1e-12);
    EXPECT_DOUBLE_EQ(eval_I(s, t), b.I);
  }
}

TEST(Breakdown, ZeroCoefficients) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  const Field u = gaussian(g);
  const StatePair s(u, u, {2.5, 0.0, 0.0, 0.0, 1.0, 1.0});
  const FunctionalBreakdown b = eval_breakdown(s, t);
  EXPECT_EQ(b.R, 0.0);
  EXPECT_LE(relative_error(b.I, b.Q_u + b.W0 / 4.0), 1e-14);
}

TEST(Breakdown, SwapSymmetry) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(3);
  const StatePair s = oracle::random_state(g, {3.0, 0.7, 0.7, 0.2, 1.0, 1.0}, rng);
  EXPECT_DOUBLE_EQ(eval_I(s, t), eval_I(s.swapped(), t));
}

TEST(Gradient, MatchesFiniteDifferences) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(4);
  for (double p : {2.0, 2.5, 3.0}) {
    const StatePair s = oracle::random_state(g, {p, 0.9, -0.5, 0.7, 1.2, 0.8}, rng);
    const Field du = oracle::random_smooth_field(g, rng);
    const Field dv = oracle::random_smooth_field(g, rng);
    const auto [gu, gv] = l2_gradient(s, t);
    const double analytic = inner(gu, du) + inner(gv, dv);
    EXPECT_LE(relative_error(analytic, oracle::fd_directional_derivative(s, du, dv, t, 1e-5)), 1e-5) << "p=" << p;
  }
}

TEST(Gradient, VanishingComponent) {
  const Grid2D g = make_grid(64, 8.0);
  const StatePair s = StatePair::diagnostic(gaussian(g), Field(g), {2.5, 1.0, 1.0, 1.0, 1.0, 1.0});
  EXPECT_EQ(l2_gradient(s, LogKernelTable(g)).second.max_abs(), 0.0);
}

TEST(Gradient, KineticTermIsolated) {
  const Grid2D g = make_grid(64, 8.0);
  std::mt19937_64 rng(5);
  const StatePair s = oracle::random_state(g, {2.5, 1.0, 1.0, 1.0, 1.0, 1.0}, rng);
  Field diff = l2_gradient(s, LogKernelTable(g), {1.0, 0.0, 0.0}).first;
  diff += spectral_laplacian(s.u());
  EXPECT_LT(diff.max_abs(), 1e-13 * spectral_laplacian(s.u()).max_abs() + 1e-14);
}

TEST(Multipliers, RayleighOrthogonality) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(6);
  for (int k = 0; k < 5; ++k) {
    const StatePair s = oracle::random_state(g, {2.5, 1.0, -1.0, 0.5, 1.3, 0.6}, rng);
    const FieldPair gr = l2_gradient(s, t);
    const auto [l1, l2] = multipliers(s, gr);
    const double r1 = inner(Field(gr.first).axpy(l1, s.u()), s.u());
    const double r2 = inner(Field(gr.second).axpy(l2, s.v()), s.v());
    EXPECT_LE(std::abs(r1), 1e-12 * std::abs(inner(gr.first, s.u())) + 1e-15);
    EXPECT_LE(std::abs(r2), 1e-12 * std::abs(inner(gr.second, s.v())) + 1e-15);
  }
}

TEST(Multipliers, SymmetricStateGivesEqualValues) {
  const Grid2D g = make_grid(64, 8.0);
  const Field u = gaussian(g);
  const StatePair s(u, u, {2.5, 0.8, 0.8, 0.3, 1.0, 1.0});
  const auto [l1, l2] = multipliers(s, LogKernelTable(g));
  EXPECT_EQ(l1, l2);
}

TEST(Kernel, RieszDominatesW2) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable t(g);
  std::mt19937_64 rng(7);
  for (int k = 0; k < 10; ++k) {
    const Field u = oracle::random_smooth_field(g, rng);
    const Field rho = hadamard(u, u);
    const double w2 = inner(rho, t.convolve(rho, KernelKind::LogOnePlusInvR));
    const double riesz = inner(rho, t.convolve(rho, KernelKind::InverseR));
    EXPECT_GE(w2, 0.0);
    EXPECT_LE(w2, riesz);
  }
}
