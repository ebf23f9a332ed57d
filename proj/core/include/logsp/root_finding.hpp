#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace logsp {

struct RootResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Safeguarded Newton iteration on a sign-changing bracket [lo, hi].
///
/// `fdf(x)` returns {f(x), f'(x)}. A Newton step is taken when it stays inside
/// the current bracket and shrinks |f| fast enough; otherwise the bracket is
/// bisected. Stops when the bracket is narrower than xtol * max(1, |x|) or f
/// vanishes exactly.
template <class FDF>
RootResult newton_bisect(FDF&& fdf, double lo, double hi, double xtol = 1e-15, int max_iter = 200) {
  auto [flo, dlo] = fdf(lo);
  auto [fhi, dhi] = fdf(hi);
  (void)dlo;
  (void)dhi;
  if (flo == 0.0) return {lo, 0, true};
  if (fhi == 0.0) return {hi, 0, true};
  if ((flo > 0.0) == (fhi > 0.0)) throw std::invalid_argument("newton_bisect: bracket does not change sign");
  // Orient so that f(neg) < 0 < f(pos).
  double neg = flo < 0.0 ? lo : hi;
  double pos = flo < 0.0 ? hi : lo;
  double x = 0.5 * (lo + hi);
  double dx_old = std::abs(hi - lo);
  double dx = dx_old;
  auto [fx, dfx] = fdf(x);
  for (int it = 1; it <= max_iter; ++it) {
    const bool newton_leaves = ((x - pos) * dfx - fx) * ((x - neg) * dfx - fx) > 0.0;
    const bool newton_slow = std::abs(2.0 * fx) > std::abs(dx_old * dfx);
    dx_old = dx;
    if (newton_leaves || newton_slow || dfx == 0.0) {
      dx = 0.5 * (pos - neg);
      x = neg + dx;
    } else {
      dx = fx / dfx;
      x -= dx;
    }
    if (std::abs(dx) <= xtol * std::max(1.0, std::abs(x))) return {x, it, true};
    std::tie(fx, dfx) = fdf(x);
    if (fx == 0.0) return {x, it, true};
    if (fx < 0.0) {
      neg = x;
    } else {
      pos = x;
    }
    if (std::abs(pos - neg) <= xtol * std::max(1.0, std::abs(x))) return {x, it, true};
  }
  return {x, max_iter, false};
}

}  // namespace logsp
