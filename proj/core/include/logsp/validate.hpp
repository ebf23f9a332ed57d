#pragma once

#include <vector>

#include "logsp/fiber.hpp"
#include "logsp/functionals.hpp"

namespace logsp {

/// Pohozaev-Nehari functional Q(u) + Q(v) - ((p-1)/p) R - (c1 + c2)^2 / 4.
double M_value(const FunctionalBreakdown& bd, const ModelParams& params);
double M_value(const StatePair& s, const LogKernelTable& table);

/// Natural scale for M: Q(u) + Q(v) + (c1 + c2)^2 / 4.
double M_scale(const FunctionalBreakdown& bd, const ModelParams& params);

/// Signed terms of a scalar identity that should sum to zero.
struct IdentityTerms {
  std::vector<double> terms;
  double sum() const;
  /// |sum| / max |term|; zero when all terms vanish.
  double relative() const;
};

/// lambda1 c1 + lambda2 c2 + W0 + (c1 + c2)^2 / 4 - R / p
IdentityTerms pohozaev_terms(const FunctionalBreakdown& bd, const ModelParams& params, double lambda1,
                             double lambda2);
/// Q(u) + Q(v) + lambda1 c1 + lambda2 c2 + W0 - R
IdentityTerms nehari_terms(const FunctionalBreakdown& bd, const ModelParams& params, double lambda1,
                           double lambda2);

double pohozaev_residual(const StatePair& s, double lambda1, double lambda2, const LogKernelTable& table);
double nehari_residual(const StatePair& s, double lambda1, double lambda2, const LogKernelTable& table);

/// Relative errors of the dilation laws at one t.
struct TransformErrors {
  double t = 1.0;
  double Q = 0.0;   ///< Q -> t^2 Q
  double P_u = 0.0; ///< P -> t^(2p-2) P
  double P_v = 0.0;
  double P0 = 0.0;
  double R = 0.0;
  double W0 = 0.0;  ///< |W0(phi) - W0 + (c1+c2)^2 log t| / |W0|
  double max() const;
};

std::vector<TransformErrors> check_transform(const StatePair& s, const LogKernelTable& table,
                                             const std::vector<double>& t_list,
                                             Interpolation interp = Interpolation::Cubic);

struct KernelBounds {
  double W2 = 0.0;
  /// Energy of the cell-averaged 1/r kernel.
  double riesz = 0.0;
  bool ok = false;
};

KernelBounds kernel_bounds(const StatePair& s, const LogKernelTable& table);
/// 0 <= W2 <= Riesz energy.
bool check_kernel_bounds(const StatePair& s, const LogKernelTable& table);

struct IdentityReport {
  double pohozaev_residual = 0.0;
  double nehari_residual = 0.0;
  double M_value = 0.0;
  double M_scale = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// |W0 - (W1 - W2)| / max(|W1|, |W2|, 1)
  double split_error = 0.0;
  std::vector<TransformErrors> transform_errors;
  bool hls_ok = false;
};

/// Full identity check with multipliers extracted from the state.
IdentityReport validate_state(const StatePair& s, const LogKernelTable& table, const std::vector<double>& t_list);

}  // namespace logsp
