#pragma once

#include <variant>

#include "logsp/functionals.hpp"

namespace logsp {

/// Energy of the dilated state t u(t x) as a function of t:
///   F(t) = A t^2 / 2 + W - B log t - C t^(q+1) / (q+1)
///   f(t) = F'(t) = A t - B / t - C t^q
///   g(t) = t^2 f'(t) = A t^2 + B - C q t^(q+1)
/// with A = Q(u) + Q(v), B = (c1 + c2)^2 / 4, C = ((p-1)/p) R, q = 2p - 3 and
/// W = W0 / 4.
struct FiberProfile {
  double A = 0.0;
  double B = 0.0;
  double C = 0.0;
  double q = 0.0;
  double W = 0.0;

  double F(double t) const;
  double f(double t) const;
  double g(double t) const;
  /// d f / d t
  double df(double t) const;
};

FiberProfile fiber_profile(const FunctionalBreakdown& bd, const ModelParams& params);
FiberProfile fiber_profile(const StatePair& s, const LogKernelTable& table);

/// Left-hand side of the two-root condition,
/// (q-1)^((q-1)/2) / (q+1)^((q+1)/2) * A^((q+1)/2) / B^((q-1)/2).
double two_root_lhs(const FiberProfile& pr);

/// lhs > C/2. False whenever C <= 0. Throws for q <= 1 or non-positive A, B.
bool two_root_condition(const FiberProfile& pr);

/// t_plus < t_bar < t_minus: local minimum of F, zero of g, local maximum of F.
struct FiberRoots {
  double t_plus = 0.0;
  double t_bar = 0.0;
  double t_minus = 0.0;
};
/// The unique zero of f when f is increasing through it.
struct SingleRoot {
  double t = 0.0;
};
struct NoRoots {};

using FiberRootSet = std::variant<FiberRoots, SingleRoot, NoRoots>;

/// Zeros of f for any profile with B > 0.
FiberRootSet fiber_roots(const FiberProfile& pr);

enum class Interpolation { Cubic, Spectral };

/// t u(t x) sampled on the grid of u; reads outside [-L, L]^2 are zero. Cubic
/// uses separable 4-point Lagrange interpolation, Spectral the trigonometric
/// interpolant of the periodic extension. No mass renormalisation.
Field rescale_field(const Field& u, double t, Interpolation interp = Interpolation::Cubic);

/// (phi(t, u), phi(t, v)) renormalised to the masses of the input state.
StatePair rescale(const StatePair& s, double t, Interpolation interp = Interpolation::Cubic);

enum class OmegaClass { OmegaPlus, OmegaMinus, OffManifold };

struct OmegaResult {
  OmegaClass kind = OmegaClass::OffManifold;
  /// Set when f(1) vanishes but g(1) is zero within tolerance as well.
  bool degenerate = false;
  double f1 = 0.0;
  double g1 = 0.0;
};

inline constexpr double kOmegaTolerance = 1e-8;

OmegaResult classify_omega(const FiberProfile& pr, double tol = kOmegaTolerance);
OmegaResult classify_omega(const StatePair& s, const LogKernelTable& table, double tol = kOmegaTolerance);

const char* to_string(OmegaClass kind) noexcept;

}  // namespace logsp
