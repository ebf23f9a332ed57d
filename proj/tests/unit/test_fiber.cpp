#include <cmath>
#include <random>
#include <variant>

#include <gtest/gtest.h>

#include "logsp/fiber.hpp"
#include "logsp/validate.hpp"
#include "oracles.hpp"

using namespace logsp;
using oracle::relative_error;

namespace {

FiberProfile profile(double A, double B, double C, double q, double W = 0.0) {
  FiberProfile p;
  p.A = A;
  p.B = B;
  p.C = C;
  p.q = q;
  p.W = W;
  return p;
}

StatePair gaussian_state(const Grid2D& g, const ModelParams& prm, double w = 1.0) {
  Field u = Field::sample(g, [w](double x, double y) { return std::exp(-((x - 0.3) * (x - 0.3) + y * y) / (w * w)); });
  Field v = Field::sample(g, [w](double x, double y) { return std::exp(-0.8 * (x * x + (y + 0.2) * (y + 0.2)) / (w * w)); });
  return StatePair(std::move(u), std::move(v), prm);
}

// Sums of the absolute terms of f and g: the rounding scale of their residuals.
double f_terms(const FiberProfile& p, double t) { return p.A * t + p.B / t + std::abs(p.C) * std::pow(t, p.q); }
double g_terms(const FiberProfile& p, double t) {
  return p.A * t * t + p.B + std::abs(p.C) * p.q * std::pow(t, p.q + 1.0);
}

// Thm2 parameters whose Gaussian states have two fiber roots.
const ModelParams kTwoRoot{3.0, 1.0, 1.0, 1.0, 1.0, 1.0};

}  // namespace

TEST(FiberProfile, Formulae) {
  const FiberProfile p = profile(1.3, 0.7, 0.2, 2.5, 0.4);
  for (double t : {0.3, 1.0, 2.2}) {
    EXPECT_NEAR(p.F(t), 0.65 * t * t + 0.4 - 0.7 * std::log(t) - 0.2 * std::pow(t, 3.5) / 3.5, 1e-14);
    EXPECT_NEAR(p.f(t), 1.3 * t - 0.7 / t - 0.2 * std::pow(t, 2.5), 1e-14);
    EXPECT_NEAR(p.g(t), t * t * p.df(t), 1e-13);
    const double e = 1e-6;
    EXPECT_NEAR(p.f(t), (p.F(t + e) - p.F(t - e)) / (2 * e), 1e-8);
  }
}

TEST(FiberRoots, ClosedFormQuartic) {
  // s = t^2 solves 0.1 s^2 - s + 1 = 0 (f) and 0.3 s^2 - s - 1 = 0 (g).
  const FiberProfile p = profile(1.0, 1.0, 0.1, 3.0);
  EXPECT_NEAR(two_root_lhs(p), 0.125, 1e-15);
  EXPECT_TRUE(two_root_condition(p));
  const FiberRootSet r = fiber_roots(p);
  ASSERT_TRUE(std::holds_alternative<FiberRoots>(r));
  const FiberRoots& t = std::get<FiberRoots>(r);
  EXPECT_NEAR(t.t_plus, std::sqrt(5.0 - std::sqrt(15.0)), 1e-8);
  EXPECT_NEAR(t.t_bar, std::sqrt((1.0 + std::sqrt(2.2)) / 0.6), 1e-8);
  EXPECT_NEAR(t.t_minus, std::sqrt(5.0 + std::sqrt(15.0)), 1e-8);
}

TEST(FiberRoots, ConditionFails) {
  const FiberProfile p = profile(1.0, 1.0, 1.0, 3.0);
  EXPECT_FALSE(two_root_condition(p));
  EXPECT_TRUE(std::holds_alternative<NoRoots>(fiber_roots(p)));
  for (double t = 1e-3; t < 1e3; t *= 1.1) ASSERT_LT(p.f(t), 0.0);
}

TEST(FiberRoots, NonPositiveCGivesSingleRoot) {
  EXPECT_FALSE(two_root_condition(profile(1.0, 1.0, 0.0, 3.0)));
  const FiberProfile p = profile(1.0, 1.0, -0.5, 3.0);
  EXPECT_FALSE(two_root_condition(p));
  const FiberRootSet r = fiber_roots(p);
  ASSERT_TRUE(std::holds_alternative<SingleRoot>(r));
  const double t = std::get<SingleRoot>(r).t;
  EXPECT_NEAR(t + 0.5 * t * t * t, 1.0 / t, 1e-12);
  EXPECT_GT(p.df(t), 0.0);
}

TEST(FiberRoots, InvalidExponentThrows) {
  EXPECT_THROW(two_root_condition(profile(1.0, 1.0, 0.1, 1.0)), std::invalid_argument);
}

TEST(FiberRoots, RandomProfilesOrdered) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> logu(-3.0, 3.0);
  std::uniform_real_distribution<double> qd(1.0, 6.0);
  int two = 0, unrepresentable = 0;
  for (int k = 0; k < 1000; ++k) {
    double q = qd(rng);
    if (q <= 1.0 + 1e-3) q = 1.5;
    const FiberProfile p = profile(std::pow(10.0, logu(rng)), std::pow(10.0, logu(rng)), std::pow(10.0, logu(rng)), q);
    const FiberRootSet r = fiber_roots(p);
    if (!two_root_condition(p)) {
      ASSERT_TRUE(std::holds_alternative<NoRoots>(r));
      continue;
    }
    // For q close to 1 the larger root behaves like (A/C)^(1/(q-1)) and can leave
    // the floating-point range; such profiles report NoRoots.
    if ((p.q + 1.0) * std::log(2.0 * p.A / p.C) / (p.q - 1.0) > 690.0) {
      ++unrepresentable;
      continue;
    }
    ASSERT_TRUE(std::holds_alternative<FiberRoots>(r)) << p.A << " " << p.B << " " << p.C << " " << p.q;
    const FiberRoots& t = std::get<FiberRoots>(r);
    ++two;
    ASSERT_LT(0.0, t.t_plus);
    ASSERT_LT(t.t_plus, t.t_bar);
    ASSERT_LT(t.t_bar, t.t_minus);
    ASSERT_LE(std::abs(p.f(t.t_plus)), 1e-12 * f_terms(p, t.t_plus));
    ASSERT_LE(std::abs(p.f(t.t_minus)), 1e-12 * f_terms(p, t.t_minus));
    ASSERT_LE(std::abs(p.g(t.t_bar)), 1e-12 * g_terms(p, t.t_bar));
    ASSERT_GT(p.df(t.t_plus), 0.0);
    ASSERT_LT(p.df(t.t_minus), 0.0);
    ASSERT_LT(p.F(t.t_plus), p.F(t.t_minus));
  }
  EXPECT_GT(two, 100);
  EXPECT_LT(unrepresentable, 50);
}

TEST(FiberRoots, LargeRootsBeyondOldScan) {
  // q = 1.1, A / C = 1e3: t_minus ~ 1e30.
  const FiberProfile p = profile(1.0, 1.0, 1e-3, 1.1);
  const FiberRootSet r = fiber_roots(p);
  ASSERT_TRUE(std::holds_alternative<FiberRoots>(r));
  const FiberRoots& t = std::get<FiberRoots>(r);
  EXPECT_GT(t.t_minus, 1e20);
  EXPECT_LE(std::abs(p.f(t.t_minus)), 1e-12 * f_terms(p, t.t_minus));
  EXPECT_LE(std::abs(p.f(t.t_plus)), 1e-12 * f_terms(p, t.t_plus));
}

TEST(Rescale, IdentityAtOne) {
  const Grid2D g = make_grid(64, 6.0);
  const StatePair s = gaussian_state(g, kTwoRoot);
  const StatePair r = rescale(s, 1.0);
  for (std::size_t k = 0; k < g.size(); ++k) ASSERT_NEAR(r.u().values()[k], s.u().values()[k], 1e-15);
  EXPECT_THROW(rescale(s, 0.0), std::invalid_argument);
  EXPECT_THROW(rescale(s, -1.0), std::invalid_argument);
}

TEST(Rescale, PreservesMassAndScalesQ) {
  const Grid2D g = make_grid(256, 8.0);
  const StatePair s = gaussian_state(g, kTwoRoot);
  const LogKernelTable table(g);
  const double A = fiber_profile(s, table).A;
  for (double t : {0.5, 0.8, 1.5, 2.0}) {
    // Four-point Lagrange leaves an O(h^4) mass drift of a few 1e-6 at this width.
    const Field rc = rescale_field(s.u(), t);
    EXPECT_LE(relative_error(inner(rc, rc), inner(s.u(), s.u())), 5e-6) << t;
    const Field rs = rescale_field(s.u(), t, Interpolation::Spectral);
    EXPECT_LE(relative_error(inner(rs, rs), inner(s.u(), s.u())), 1e-6) << t;
  }
  EXPECT_LE(relative_error(fiber_profile(rescale(s, 1.5), table).A, 2.25 * A), 1e-3);
}

TEST(Rescale, EnergyFollowsFiber) {
  const Grid2D g = make_grid(256, 8.0);
  const LogKernelTable table(g);
  const StatePair s = gaussian_state(g, kTwoRoot);
  const FiberProfile p = fiber_profile(s, table);
  EXPECT_LE(relative_error(eval_I(rescale(s, 1.5), table), p.F(1.5)), 1e-3);
}

TEST(Omega, FOneIsM) {
  const Grid2D g = make_grid(64, 8.0);
  const LogKernelTable table(g);
  std::mt19937_64 rng(22);
  for (int k = 0; k < 5; ++k) {
    const StatePair s = oracle::random_state(g, {2.5, 0.5, 1.0, 0.3, 1.0, 1.2}, rng);
    EXPECT_LE(relative_error(fiber_profile(s, table).f(1.0), M_value(s, table), 1e-300), 1e-12);
  }
}

TEST(Omega, RescaledStatesAreClassified) {
  const Grid2D g = make_grid(256, 8.0);
  const LogKernelTable table(g);
  const StatePair s = gaussian_state(g, kTwoRoot);
  const FiberProfile p = fiber_profile(s, table);
  ASSERT_TRUE(two_root_condition(p));
  const FiberRoots roots = std::get<FiberRoots>(fiber_roots(p));
  EXPECT_EQ(classify_omega(s, table).kind, OmegaClass::OffManifold);
  const double sep = 2.0 * p.B;  // (p-1)/(p-2) B at p = 3
  for (auto interp : {Interpolation::Cubic, Interpolation::Spectral}) {
    const StatePair plus = rescale(s, roots.t_plus, interp);
    const StatePair minus = rescale(s, roots.t_minus, interp);
    EXPECT_EQ(classify_omega(plus, table, 1e-4).kind, OmegaClass::OmegaPlus);
    EXPECT_EQ(classify_omega(minus, table, 1e-4).kind, OmegaClass::OmegaMinus);
    EXPECT_LT(fiber_profile(plus, table).A, sep);
    EXPECT_GT(fiber_profile(minus, table).A, sep);
  }
}

TEST(Omega, RootsScaleInversely) {
  const Grid2D g = make_grid(256, 8.0);
  const LogKernelTable table(g);
  const StatePair s = gaussian_state(g, kTwoRoot);
  const double tp = std::get<FiberRoots>(fiber_roots(fiber_profile(s, table))).t_plus;
  for (double tau : {0.8, 1.25}) {
    const FiberRootSet r = fiber_roots(fiber_profile(rescale(s, tau), table));
    ASSERT_TRUE(std::holds_alternative<FiberRoots>(r));
    EXPECT_LE(relative_error(std::get<FiberRoots>(r).t_plus, tp / tau), 1e-2);
  }
}

TEST(Omega, DegenerateFlag) {
  // f(1) = 0 and g(1) = 0: A = B + C, 2B = C (q - 1) with q = 3 gives C = B.
  const OmegaResult r = classify_omega(profile(2.0, 1.0, 1.0, 3.0));
  EXPECT_EQ(r.kind, OmegaClass::OffManifold);
  EXPECT_TRUE(r.degenerate);
}
