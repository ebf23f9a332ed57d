#pragma once

#include <utility>

#include "logsp/grid.hpp"
#include "logsp/log_kernel.hpp"

namespace logsp {

/// Exponent p, couplings mu1, mu2, beta and target masses c1, c2.
struct ModelParams {
  double p = 2.0;
  double mu1 = 0.0;
  double mu2 = 0.0;
  double beta = 0.0;
  double c1 = 1.0;
  double c2 = 1.0;

  /// Throws std::invalid_argument unless p > 1 and c1, c2 > 0.
  void validate() const;
  double total_mass() const noexcept { return c1 + c2; }
};

/// A pair (u, v) on one grid together with its model parameters.
///
/// The regular constructor rescales u and v so that their masses are exactly
/// c1 and c2. `diagnostic` keeps the samples untouched; it exists for tests
/// that evaluate functionals on fixed analytic profiles.
class StatePair {
 public:
  StatePair(Field u, Field v, ModelParams params);
  static StatePair diagnostic(Field u, Field v, ModelParams params);

  const Field& u() const noexcept { return u_; }
  const Field& v() const noexcept { return v_; }
  const ModelParams& params() const noexcept { return params_; }
  const Grid2D& grid() const noexcept { return u_.grid(); }
  bool normalized() const noexcept { return normalized_; }

  /// Same state with the roles of the two components (and their parameters) exchanged.
  StatePair swapped() const;

 private:
  StatePair(Field u, Field v, ModelParams params, bool normalize);

  Field u_;
  Field v_;
  ModelParams params_;
  bool normalized_ = true;
};

struct FunctionalBreakdown {
  double Q_u = 0.0;
  double Q_v = 0.0;
  double P_u = 0.0;
  double P_v = 0.0;
  double P0 = 0.0;
  double R = 0.0;
  double W0 = 0.0;
  double W1 = 0.0;
  double W2 = 0.0;
  double norm0_u = 0.0;
  double norm0_v = 0.0;
  double I = 0.0;
};

/// Every functional of the state. W1 and W2 cost two extra convolutions.
FunctionalBreakdown eval_breakdown(const StatePair& s, const LogKernelTable& table);

/// The local part of the breakdown (Q, P, P0, R, W0, I) plus the log potential
/// w = log * (u^2 + v^2), which gradients and multipliers reuse. W1, W2 and the
/// weighted norms are left at zero.
struct EnergyEval {
  FunctionalBreakdown bd;
  Field potential;
};
EnergyEval evaluate_energy(const StatePair& s, const LogKernelTable& table);

/// I(u, v) = (Q(u) + Q(v)) / 2 + W0 / 4 - R / (2p).
double eval_I(const StatePair& s, const LogKernelTable& table);

/// Weights of the three parts of the gradient. {1, 1, 1} is the gradient of I;
/// setting entries to zero isolates terms, and {t^2, 1, t^(2p-2)} gives the
/// gradient of the fiber-scaled energy used by the Thm2 solvers.
struct TermWeights {
  double kinetic = 1.0;
  double convolution = 1.0;
  double nonlinear = 1.0;
};

using FieldPair = std::pair<Field, Field>;

/// L^2 gradient (g_u, g_v) of I, without the multiplier terms.
FieldPair l2_gradient(const StatePair& s, const LogKernelTable& table, TermWeights weights = {});
/// Same with a precomputed potential w.
FieldPair l2_gradient(const StatePair& s, const Field& potential, TermWeights weights = {});

/// Rayleigh projections lambda_i = -<g_i, u_i> / |u_i|^2, so that g_i + lambda_i u_i
/// is orthogonal to u_i. For normalised states |u_i|^2 = c_i. Zero components give 0.
std::pair<double, double> multipliers(const StatePair& s, const LogKernelTable& table);
std::pair<double, double> multipliers(const StatePair& s, const FieldPair& gradient);

}  // namespace logsp
