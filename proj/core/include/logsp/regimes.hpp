#pragma once

#include <optional>
#include <string>

#include "logsp/functionals.hpp"
#include "logsp/grid.hpp"

namespace logsp {

enum class RegimeKind { Thm1_i, Thm1_ii, Thm1_iii, Thm2, Unclassified };

const char* to_string(RegimeKind kind) noexcept;

struct Regime {
  RegimeKind kind = RegimeKind::Unclassified;
  /// max(mu1 + beta, mu2 + beta)
  double mu0 = 0.0;
  /// Thm2 mass threshold, when it could be evaluated.
  std::optional<double> threshold;
  /// Margin of the deciding inequality: positive for the matched case,
  /// negative (the nearest failed inequality) for Unclassified.
  double slack = 0.0;
  /// Short human-readable account of which inequality decided the case.
  std::string reason;
};

struct GNConstant {
  double q = 0.0;
  /// Certified value: the larger of the two estimates.
  double K = 0.0;
  std::string method;
  /// Relative L^2 norm of the quotient gradient at the end of the ascent.
  double residual = 0.0;
  double K_ascent = 0.0;
  double K_shooting = 0.0;
  /// Squared L^2 norm of the radial solution of -Phi'' - Phi'/r + Phi = Phi^(q-1).
  double ground_mass = 0.0;
  /// |K_ascent - K_shooting| / K_shooting
  double relative_gap = 0.0;
  int iterations = 0;
};

/// Relative tolerance on the agreement of the two estimates.
inline constexpr double kGNAgreement = 0.01;

/// Weinstein quotient ||u||_q^q / (||grad u||^(q-2) ||u||^2) of a field.
double weinstein_quotient(const Field& u, double q);

/// Squared L^2 norm of the positive radial solution of -Delta Phi + Phi = Phi^(q-1)
/// on R^2, by shooting on Phi(0). Throws for q <= 2.
double radial_ground_mass(double q);

/// K_q from the ground-state mass M: (q/2) (2/(q-2))^((q-2)/2) / M^((q-2)/2).
double gn_constant_from_mass(double q, double mass);

/// Best Gagliardo-Nirenberg constant estimated by preconditioned ascent of the
/// Weinstein quotient on `grid`, cross-checked against radial shooting. Results
/// are cached per (q, n, L). Throws std::runtime_error if the ascent diverges or
/// the two estimates disagree by more than kGNAgreement.
GNConstant gn_constant(double q, const Grid2D& grid);

/// Grid used when a constant is needed independently of any solve grid
/// (n = 128, L = 8).
Grid2D gn_reference_grid();
GNConstant gn_constant(double q);

/// Thm2 mass threshold
/// 4^((p-2)/(2p-3)) [p (p-2)^(p-2) / (K_2p mu0 (p-1)^p)]^(1/(2p-3)).
double mass_threshold(const ModelParams& params, double K2p);

/// Smallest p treated as mass-supercritical in Thm2 paths.
inline constexpr double kSupercriticalMargin = 1e-6;

/// First matching case in the order Thm1_i, Thm1_ii, Thm1_iii, Thm2. K4 is
/// required when p = 2, K2p when p > 2 with mu1, mu2, beta > 0.
Regime classify_regime(const ModelParams& params, std::optional<double> K4 = std::nullopt,
                       std::optional<double> K2p = std::nullopt);

}  // namespace logsp
