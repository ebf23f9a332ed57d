#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "logsp/regimes.hpp"
#include "oracles.hpp"

using namespace logsp;
using oracle::relative_error;

// Squared L2 norm of the positive radial solution of -Delta Phi + Phi = Phi^3.
constexpr double kTownesMass = 11.70089;

TEST(Classify, Thm1CaseI) {
  for (double p : {1.5, 2.0, 3.0}) {
    const Regime r = classify_regime({p, -2.0, -1.0, 1.0, 1.0, 1.0}, 0.17, 0.05);
    EXPECT_EQ(r.kind, RegimeKind::Thm1_i);
    EXPECT_DOUBLE_EQ(r.mu0, 0.0);
  }
}

TEST(Classify, Thm1CaseII) {
  const Regime r = classify_regime({1.5, 1.0, 1.0, 1.0, 1.0, 1.0});
  EXPECT_EQ(r.kind, RegimeKind::Thm1_ii);
  EXPECT_DOUBLE_EQ(r.mu0, 2.0);
}

TEST(Classify, Thm1CaseIII) {
  const double K4 = 2.0 / kTownesMass;
  const Regime r = classify_regime({2.0, 0.5, 0.5, 0.5, 1.0, 1.0}, K4);
  EXPECT_EQ(r.kind, RegimeKind::Thm1_iii);
  EXPECT_NEAR(r.slack, 2.0 - K4, 1e-3);
  EXPECT_THROW(classify_regime({2.0, 0.5, 0.5, 0.5, 1.0, 1.0}), std::invalid_argument);
}

TEST(Classify, Thm2AndUnclassified) {
  const ModelParams small{3.0, 1.0, 1.0, 1.0, 0.5, 0.5};
  const Regime r = classify_regime(small, std::nullopt, 0.047);
  EXPECT_EQ(r.kind, RegimeKind::Thm2);
  ASSERT_TRUE(r.threshold.has_value());
  EXPECT_GT(*r.threshold, small.total_mass());
  const Regime big = classify_regime({3.0, 1.0, 1.0, 1.0, 5.0, 5.0}, std::nullopt, 0.047);
  EXPECT_EQ(big.kind, RegimeKind::Unclassified);
  EXPECT_LT(big.slack, 0.0);
  EXPECT_THROW(classify_regime(small), std::invalid_argument);
}

TEST(Classify, NonPositiveBetaUnclassified) {
  EXPECT_EQ(classify_regime({2.5, -1.0, -1.0, 0.0, 1.0, 1.0}).kind, RegimeKind::Unclassified);
  EXPECT_EQ(classify_regime({2.5, -1.0, -1.0, -0.5, 1.0, 1.0}).kind, RegimeKind::Unclassified);
}

TEST(Classify, BarelySupercriticalUnclassified) {
  EXPECT_EQ(classify_regime({2.0 + 1e-8, 1.0, 1.0, 1.0, 0.1, 0.1}, std::nullopt, 0.1).kind,
            RegimeKind::Unclassified);
}

TEST(Classify, OrderedMatch) {
  // p < 2 with nonpositive mu0 satisfies (i) and (ii); (i) wins.
  EXPECT_EQ(classify_regime({1.5, -3.0, -3.0, 1.0, 1.0, 1.0}).kind, RegimeKind::Thm1_i);
  EXPECT_STREQ(to_string(RegimeKind::Thm1_iii), "Thm1_iii");
}

TEST(Threshold, CubicCaseSimplifies) {
  const ModelParams prm{3.0, 1.0, 0.5, 1.0, 1.0, 1.0};
  const double K6 = 0.0473;
  EXPECT_LE(relative_error(mass_threshold(prm, K6), std::cbrt(3.0 / (2.0 * K6 * 2.0))), 1e-14);
}

TEST(Threshold, PowerLawInMu0) {
  for (double p : {2.5, 3.0, 4.0}) {
    const double a = mass_threshold({p, 1.0, 1.0, 1.0, 1, 1}, 0.05);
    const double b = mass_threshold({p, 3.0, 3.0, 1.0, 1, 1}, 0.05);
    EXPECT_LE(relative_error(b / a, std::pow(2.0, -1.0 / (2.0 * p - 3.0))), 1e-13);
  }
}

TEST(Threshold, DecreasingInMu0AndK) {
  double prev = INFINITY;
  for (double mu = 0.1; mu < 10.0; mu *= 1.5) {
    const double t = mass_threshold({3.0, mu, mu, mu, 1, 1}, 0.05);
    EXPECT_LT(t, prev);
    prev = t;
  }
  prev = INFINITY;
  for (double K = 0.01; K < 1.0; K *= 1.5) {
    const double t = mass_threshold({3.5, 1, 1, 1, 1, 1}, K);
    EXPECT_LT(t, prev);
    prev = t;
  }
  EXPECT_THROW(mass_threshold({2.0, 1, 1, 1, 1, 1}, 0.1), std::invalid_argument);
  EXPECT_THROW(mass_threshold({3.0, -2, -2, 1, 1, 1}, 0.1), std::invalid_argument);
}

TEST(Weinstein, ScaleInvariant) {
  const Grid2D g = make_grid(128, 8.0);
  const auto f = [](double a, double b) {
    return [a, b](double x, double y) {
      const double X = b * x, Y = b * y;
      return a * std::exp(-X * X - 0.5 * Y * Y) * (1.0 + 0.3 * X);
    };
  };
  const double q0 = weinstein_quotient(Field::sample(g, f(1.0, 1.0)), 4.0);
  EXPECT_LE(relative_error(weinstein_quotient(Field::sample(g, f(3.0, 1.0)), 4.0), q0), 1e-12);
  EXPECT_LE(relative_error(weinstein_quotient(Field::sample(g, f(0.2, 1.4)), 4.0), q0), 1e-10);
}

TEST(GNConstant, RadialShootingMass) {
  EXPECT_LE(relative_error(radial_ground_mass(4.0), kTownesMass), 1e-5);
  EXPECT_LE(relative_error(gn_constant_from_mass(4.0, kTownesMass), 2.0 / kTownesMass), 1e-14);
  EXPECT_THROW(radial_ground_mass(2.0), std::invalid_argument);
}

TEST(GNConstant, TwoMethodsAgree) {
  for (double q : {4.0, 6.0}) {
    const GNConstant k = gn_constant(q);
    EXPECT_LE(k.relative_gap, kGNAgreement) << q;
    EXPECT_DOUBLE_EQ(k.K, std::max(k.K_ascent, k.K_shooting));
    EXPECT_GT(k.K, 0.0);
  }
  EXPECT_LE(relative_error(gn_constant(4.0).K_shooting, 2.0 / kTownesMass), 1e-4);
  EXPECT_THROW(gn_constant(2.0), std::invalid_argument);
}

TEST(GNConstant, NoFieldBeatsTheConstant) {
  const Grid2D g = make_grid(64, 8.0);
  std::mt19937_64 rng(31);
  for (double q : {4.0, 6.0}) {
    const double K = gn_constant(q).K;
    for (int k = 0; k < 500; ++k) {
      ASSERT_LE(weinstein_quotient(oracle::random_smooth_field(g, rng), q), K * (1.0 + 1e-6));
    }
  }
}
