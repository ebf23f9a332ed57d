#pragma once

#include <string>

#include "logsp/functionals.hpp"

namespace logsp::detail {

struct PolishResult {
  StatePair state;
  int newton_steps = 0;
  int krylov_iterations = 0;
  /// Field part of the residual, ||(g_u + l1 u, g_v + l2 v)|| / sqrt(c1 + c2).
  double residual = 0.0;
  bool converged = false;
  std::string message;
};

/// Newton-Krylov iteration on the constrained Euler-Lagrange system
///   g_u + l1 u = 0, g_v + l2 v = 0, |u|^2 = c1, |v|^2 = c2
/// with finite-difference Jacobian products and resolvent-preconditioned GMRES.
/// Converges to the nearest critical point whatever its Morse index.
PolishResult newton_polish(const StatePair& start, const LogKernelTable& table, double tol, int max_steps = 12);

}  // namespace logsp::detail
