#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "logsp/fiber.hpp"
#include "logsp/functionals.hpp"
#include "logsp/regimes.hpp"

namespace logsp {

struct SolveOptions {
  int max_iters = 3000;
  /// Stop when ||(g_u + lambda1 u, g_v + lambda2 v)|| / sqrt(c1 + c2) falls below this.
  double grad_tol = 1e-6;
  /// ... and |M(u, v)| <= manifold_tol * (Q(u) + Q(v) + (c1 + c2)^2 / 4).
  double manifold_tol = 1e-4;
  double step0 = 1.0;
  /// Backtracking factor and sufficient-decrease constant, both in (0, 1).
  double armijo_shrink = 0.5;
  double armijo_c = 1e-4;
  std::uint64_t seed = 0;
  /// Amplitude of the seeded smooth perturbation of the initial Gaussians.
  double perturbation = 0.0;
  /// Width and centre offset of the initial Gaussians.
  double initial_width = 1.0;
  double initial_offset = 0.5;
  /// Thm2 branches resample the iterate onto its fiber critical point
  /// once |log t| exceeds this.
  double recenter_threshold = 0.1;
  /// Excited branch: once the projected gradient of I- drops below
  /// polish_switch (or the descent stalls) the iterate is finished by Newton-Krylov
  /// on the constrained Euler-Lagrange system.
  bool polish = true;
  double polish_switch = 1e-2;

  void validate() const;
};

enum class Branch { Ground, Excited };

const char* to_string(Branch b) noexcept;

struct Residuals {
  double projected_grad = 0.0;
  double M_value = 0.0;
  /// Q(u) + Q(v) + (c1 + c2)^2 / 4, the scale |M| is compared with.
  double M_scale = 0.0;
  double pohozaev = 0.0;
  double nehari = 0.0;
};

struct SolveReport {
  explicit SolveReport(StatePair s) : state(std::move(s)) {}

  StatePair state;
  FunctionalBreakdown breakdown;
  double energy = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  Residuals residuals;
  Branch branch = Branch::Ground;
  Regime regime;
  int iterations = 0;
  std::vector<double> energy_trace;
  bool converged = false;
  std::string message;
  /// Thm2 only: ((p-1)/(p-2)) (c1+c2)^2/4 - (Q(u) + Q(v)) for the ground
  /// branch and its negative for the excited branch; positive means separated.
  std::optional<double> separation_slack;
  /// Fiber classification of the final state at tolerance manifold_tol.
  std::optional<OmegaClass> omega;
  /// Newton steps of the excited-branch polish, when it ran.
  std::optional<int> newton_steps;
};

/// Offset Gaussians renormalised to (c1, c2), plus a seeded smooth perturbation
/// when opts.perturbation > 0.
StatePair initial_state(const ModelParams& params, const Grid2D& grid, const SolveOptions& opts = {});

/// Classifies the parameters, computing the Gagliardo-Nirenberg constants the
/// classification needs on gn_reference_grid().
Regime regime_for(const ModelParams& params);

/// Ground state. Thm1 regimes minimise I on S(c1) x S(c2); the Thm2
/// regime minimises I at the fiber minimum, I+(u, v) = F_{u,v}(t+), which keeps
/// every projected iterate in Omega+. Throws for Unclassified parameters.
SolveReport solve_ground(const ModelParams& params, const Grid2D& grid, const SolveOptions& opts = {});
SolveReport solve_ground(const StatePair& start, const LogKernelTable& table, const Regime& regime,
                         const SolveOptions& opts = {});

/// I-(u, v) = F_{u,v}(t-) and the fiber roots. Throws std::domain_error when the
/// two-root condition fails.
std::pair<double, FiberRoots> eval_I_minus(const StatePair& s, const LogKernelTable& table);

/// Excited state by descent on I-. The returned state is rescaled onto its own
/// fiber maximum, so it lies in Omega-. Requires the Thm2 regime.
SolveReport solve_excited(const ModelParams& params, const Grid2D& grid, const SolveOptions& opts = {});
SolveReport solve_excited(const StatePair& start, const LogKernelTable& table, const Regime& regime,
                          const SolveOptions& opts = {});

/// Residuals, multipliers and energy of an arbitrary state.
SolveReport assess_state(const StatePair& s, const LogKernelTable& table, double manifold_tol);

}  // namespace logsp
