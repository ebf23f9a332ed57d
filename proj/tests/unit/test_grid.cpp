#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "logsp/grid.hpp"
#include "oracles.hpp"

using namespace logsp;

TEST(Grid, RejectsBadSizes) {
  EXPECT_THROW(make_grid(0, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(96, 1.0), std::invalid_argument);
  EXPECT_THROW(make_grid(64, 0.0), std::invalid_argument);
  EXPECT_THROW(make_grid(64, -2.0), std::invalid_argument);
}

TEST(Grid, NodeCentred) {
  const Grid2D g = make_grid(16, 4.0);
  EXPECT_DOUBLE_EQ(g.spacing(), 0.5);
  EXPECT_DOUBLE_EQ(g.node(0), -3.75);
  EXPECT_DOUBLE_EQ(g.node(15), 3.75);
  EXPECT_DOUBLE_EQ(g.node(7) + g.node(8), 0.0);
}

TEST(Grid, MismatchThrows) {
  const Field a(make_grid(16, 4.0));
  const Field b(make_grid(16, 5.0));
  EXPECT_THROW(inner(a, b), GridMismatch);
  EXPECT_THROW(Field(a) += b, GridMismatch);
}

TEST(Laplacian, ConstantIsZero) {
  const Grid2D g = make_grid(32, 3.0);
  const Field c = Field::sample(g, [](double, double) { return 2.5; });
  EXPECT_LT(spectral_laplacian(c).max_abs(), 1e-12);
}

TEST(Laplacian, FourierModeIsEigenfunction) {
  const Grid2D g = make_grid(64, 5.0);
  const double k = 2.0 * std::numbers::pi * 3.0 / (2.0 * g.half_width());
  const Field f = Field::sample(g, [&](double x, double) { return std::sin(k * x); });
  const Field lap = spectral_laplacian(f);
  Field expected = f * (-k * k);
  expected -= lap;
  EXPECT_LT(expected.max_abs(), 1e-11);
}

TEST(Laplacian, GaussianMatchesAnalytic) {
  const Grid2D g = make_grid(256, 8.0);
  const Field f = Field::sample(g, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)); });
  Field err = spectral_laplacian(f);
  err -= Field::sample(g, [](double x, double y) {
    const double r2 = x * x + y * y;
    return (r2 - 2.0) * std::exp(-0.5 * r2);
  });
  EXPECT_LT(err.max_abs(), 1e-8);
}

TEST(Laplacian, GradientEnergyIsMinusInner) {
  const Grid2D g = make_grid(64, 6.0);
  std::mt19937_64 rng(4);
  const Field f = oracle::random_smooth_field(g, rng);
  const double e = gradient_energy(f);
  EXPECT_GT(e, 0.0);
  EXPECT_NEAR(e, -inner(f, spectral_laplacian(f)), 1e-12 * e);
  const auto [fx, fy] = spectral_gradient(f);
  EXPECT_NEAR(e, inner(fx, fx) + inner(fy, fy), 1e-10 * e);
}

TEST(Laplacian, ResolventInvertsShiftedOperator) {
  const Grid2D g = make_grid(64, 6.0);
  std::mt19937_64 rng(5);
  const Field f = oracle::random_smooth_field(g, rng);
  const Field r = apply_resolvent(f, 2.0);
  Field back = r * 2.0;
  back -= spectral_laplacian(r);
  back -= f;
  EXPECT_LT(back.max_abs(), 1e-12 * f.max_abs() + 1e-13);
  EXPECT_THROW(apply_resolvent(f, 0.0), std::invalid_argument);
}

TEST(Quadrature, NormalizeMass) {
  const Grid2D g = make_grid(64, 6.0);
  std::mt19937_64 rng(6);
  for (double c : {1e-3, 0.7, 1.0, 42.0}) {
    Field f = oracle::random_smooth_field(g, rng);
    normalize_mass(f, c);
    EXPECT_NEAR(inner(f, f), c, 1e-14 * c);
  }
  Field zero(g);
  EXPECT_THROW(normalize_mass(zero, 1.0), std::invalid_argument);
}

TEST(Quadrature, GaussianIntegral) {
  const Grid2D g = make_grid(128, 8.0);
  const Field f = Field::sample(g, [](double x, double y) { return std::exp(-(x * x + y * y)); });
  EXPECT_NEAR(integrate(f), std::numbers::pi, 1e-12);
}

TEST(Translate, MatchesShiftedSample) {
  const Grid2D g = make_grid(128, 8.0);
  const Field f = Field::sample(g, [](double x, double y) { return std::exp(-(x * x + 2.0 * y * y)); });
  Field err = spectral_translate(f, 0.37, -1.1);
  err -= Field::sample(g, [](double x, double y) { return std::exp(-((x - 0.37) * (x - 0.37) + 2.0 * (y + 1.1) * (y + 1.1))); });
  EXPECT_LT(err.max_abs(), 1e-12);
}

TEST(Field, ArithmeticAndFinite) {
  const Grid2D g = make_grid(8, 1.0);
  Field a = Field::sample(g, [](double x, double y) { return x + y; });
  const Field b = Field::sample(g, [](double x, double) { return x; });
  Field c = hadamard(a, b);
  EXPECT_DOUBLE_EQ(c(1, 2), (g.node(1) + g.node(2)) * g.node(1));
  a.axpy(-1.0, b);
  EXPECT_DOUBLE_EQ(a(3, 5), g.node(5));
  EXPECT_TRUE(a.all_finite());
  a(0, 0) = std::nan("");
  EXPECT_FALSE(a.all_finite());
}

TEST(BoundaryDecay, WarnsThroughSink) {
  std::string seen;
  set_warning_sink([&](std::string_view m) { seen = std::string(m); });
  const Grid2D g = make_grid(32, 2.0);
  const Field wide = Field::sample(g, [](double x, double y) { return std::exp(-0.1 * (x * x + y * y)); });
  const Field narrow = Field::sample(g, [](double x, double y) { return std::exp(-5.0 * (x * x + y * y)); });
  EXPECT_TRUE(check_boundary_decay(narrow, "narrow"));
  EXPECT_TRUE(seen.empty());
  EXPECT_FALSE(check_boundary_decay(wide, "wide"));
  EXPECT_NE(seen.find("wide"), std::string::npos);
  set_warning_sink(nullptr);
}
