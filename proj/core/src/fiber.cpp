#include "logsp/fiber.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

#include "logsp/root_finding.hpp"

namespace logsp {

double FiberProfile::F(double t) const {
  return 0.5 * A * t * t + W - B * std::log(t) - C * std::pow(t, q + 1.0) / (q + 1.0);
}

double FiberProfile::f(double t) const { return A * t - B / t - C * std::pow(t, q); }

double FiberProfile::g(double t) const { return A * t * t + B - C * q * std::pow(t, q + 1.0); }

double FiberProfile::df(double t) const { return A + B / (t * t) - C * q * std::pow(t, q - 1.0); }

FiberProfile fiber_profile(const FunctionalBreakdown& bd, const ModelParams& params) {
  const double total = params.c1 + params.c2;
  FiberProfile pr;
  pr.A = bd.Q_u + bd.Q_v;
  pr.B = 0.25 * total * total;
  pr.C = (params.p - 1.0) / params.p * bd.R;
  pr.q = 2.0 * params.p - 3.0;
  pr.W = 0.25 * bd.W0;
  return pr;
}

FiberProfile fiber_profile(const StatePair& s, const LogKernelTable& table) {
  return fiber_profile(evaluate_energy(s, table).bd, s.params());
}

double two_root_lhs(const FiberProfile& pr) {
  const double q = pr.q;
  return std::pow(q - 1.0, 0.5 * (q - 1.0)) / std::pow(q + 1.0, 0.5 * (q + 1.0)) * std::pow(pr.A, 0.5 * (q + 1.0)) /
         std::pow(pr.B, 0.5 * (q - 1.0));
}

bool two_root_condition(const FiberProfile& pr) {
  if (!(pr.q > 1.0)) throw std::invalid_argument("two_root_condition requires q > 1 (p > 2)");
  if (!(pr.A > 0.0) || !(pr.B > 0.0)) throw std::invalid_argument("two_root_condition requires A > 0 and B > 0");
  if (pr.C <= 0.0) return false;
  return two_root_lhs(pr) > 0.5 * pr.C;
}

namespace {

constexpr double kScanLow = 1e-150;
constexpr double kScanHigh = 1e150;

// Geometric bisection of a sign-changing bracket until hi / lo < 4, so that the
// linear Newton-bisection below never faces a bracket spanning many decades.
template <class Fn>
void narrow(Fn&& fn, double& lo, double& hi) {
  const bool neg_lo = fn(lo) < 0.0;
  while (hi > 4.0 * lo) {
    const double mid = std::sqrt(lo) * std::sqrt(hi);
    if ((fn(mid) < 0.0) == neg_lo) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
}

double solve_f(const FiberProfile& pr, double lo, double hi) {
  narrow([&](double t) { return pr.f(t); }, lo, hi);
  const auto r = newton_bisect([&](double t) { return std::pair{pr.f(t), pr.df(t)}; }, lo, hi);
  return r.root;
}

// The single increasing zero of f, searched on [kScanLow, kScanHigh].
FiberRootSet single_root(const FiberProfile& pr) {
  double lo = 1.0;
  while (pr.f(lo) >= 0.0 && lo > kScanLow) lo *= 0.5;
  double hi = 1.0;
  while (pr.f(hi) <= 0.0 && hi < kScanHigh) hi *= 2.0;
  if (pr.f(lo) >= 0.0 || pr.f(hi) <= 0.0) return NoRoots{};
  return SingleRoot{solve_f(pr, lo, hi)};
}

}  // namespace

FiberRootSet fiber_roots(const FiberProfile& pr) {
  if (!(pr.B > 0.0)) throw std::invalid_argument("fiber_roots requires B > 0");
  if (pr.A < 0.0) throw std::invalid_argument("fiber_roots requires A >= 0");
  if (pr.C <= 0.0) {
    if (pr.A == 0.0 && pr.C == 0.0) return NoRoots{};
    return single_root(pr);
  }
  // With C > 0, t f(t) = A t^2 - B - C t^(q+1) has one zero for q < 1, one
  // zero iff A > C for q = 1, and two or none for q > 1.
  if (pr.q < 1.0) return single_root(pr);
  if (pr.q == 1.0) {
    if (pr.A <= pr.C) return NoRoots{};
    return SingleRoot{std::sqrt(pr.B / (pr.A - pr.C))};
  }
  if (!(pr.A > 0.0) || !two_root_condition(pr)) return NoRoots{};

  // Brackets from the shape of g and f, in log space so that large roots do not
  // overflow before the test. g rises from B to its maximum at t_star and then
  // falls; g < 0 once C q t^(q+1) >= 2 max(A t^2, B), and f < 0 once
  // C t^(q-1) >= 2A or t^2 < B / A.
  const double lq = std::log(pr.C * pr.q);
  const double log_star = (std::log(2.0 * pr.A) - lq - std::log(pr.q + 1.0)) / (pr.q - 1.0);
  const double log_g_hi =
      std::max((std::log(2.0 * pr.A) - lq) / (pr.q - 1.0), (std::log(2.0 * pr.B) - lq) / (pr.q + 1.0));
  const double log_f_hi = (std::log(2.0 * pr.A) - std::log(pr.C)) / (pr.q - 1.0) + 1e-12;
  // Roots whose powers leave the floating-point range cannot be represented.
  constexpr double kLogMax = 700.0;
  if ((pr.q + 1.0) * std::max(log_g_hi, log_f_hi) > kLogMax) return NoRoots{};
  double lo = std::exp(log_star);
  double hi = std::exp(log_g_hi) * (1.0 + 1e-12);
  if (!(pr.g(lo) > 0.0) || !(pr.g(hi) < 0.0)) return NoRoots{};
  narrow([&](double t) { return pr.g(t); }, lo, hi);
  const auto bar = newton_bisect(
      [&](double t) {
        return std::pair{pr.g(t), 2.0 * pr.A * t - pr.C * pr.q * (pr.q + 1.0) * std::pow(t, pr.q)};
      },
      lo, hi);
  const double t_bar = bar.root;
  if (!(pr.f(t_bar) > 0.0)) return NoRoots{};

  const double left = std::min(0.5 * std::sqrt(pr.B / pr.A), 0.5 * t_bar);
  const double right = std::max(std::exp(log_f_hi), 2.0 * t_bar);
  if (!(pr.f(left) < 0.0) || !(pr.f(right) < 0.0)) return NoRoots{};
  FiberRoots roots;
  roots.t_bar = t_bar;
  roots.t_plus = solve_f(pr, left, t_bar);
  roots.t_minus = solve_f(pr, t_bar, right);
  return roots;
}

namespace {

// Interpolation weights for one output coordinate; taps are clipped to the grid.
struct Row {
  std::size_t first = 0;
  std::vector<double> w;
};

std::vector<Row> interpolation_rows(const Grid2D& grid, double t, Interpolation interp) {
  const std::size_t n = grid.n();
  const double h = grid.spacing();
  const double L = grid.half_width();
  std::vector<Row> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = t * grid.node(i);
    Row& row = rows[i];
    if (interp == Interpolation::Cubic) {
      const double xi = (s + L) / h - 0.5;
      double base = std::floor(xi);
      double tau = xi - base;
      if (tau > 1.0 - 1e-13) {
        base += 1.0;
        tau = 0.0;
      } else if (tau < 1e-13) {
        tau = 0.0;
      }
      const double w[4] = {-tau * (tau - 1.0) * (tau - 2.0) / 6.0, (tau + 1.0) * (tau - 1.0) * (tau - 2.0) / 2.0,
                           -(tau + 1.0) * tau * (tau - 2.0) / 2.0, (tau + 1.0) * tau * (tau - 1.0) / 6.0};
      const long first = static_cast<long>(base) - 1;
      const long lo = std::max(first, 0L);
      const long hi = std::min(first + 3, static_cast<long>(n) - 1);
      if (lo > hi) continue;
      row.first = static_cast<std::size_t>(lo);
      for (long j = lo; j <= hi; ++j) row.w.push_back(w[j - first]);
    } else {
      if (std::abs(s) > L) continue;
      row.w.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        const double d = s - grid.node(j);
        if (std::abs(d) < 1e-14 * L) {
          row.w[j] = 1.0;
        } else {
          row.w[j] = std::sin(std::numbers::pi * d / h) /
                     (static_cast<double>(n) * std::tan(std::numbers::pi * d / (2.0 * L)));
        }
      }
    }
  }
  return rows;
}

}  // namespace

Field rescale_field(const Field& u, double t, Interpolation interp) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("rescale: t must be positive");
  if (t == 1.0) return u;
  const Grid2D& grid = u.grid();
  const std::size_t n = grid.n();
  const auto rows = interpolation_rows(grid, t, interp);
  // Along the second index, then the first.
  std::vector<double> tmp(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t j = 0; j < n; ++j) {
      const Row& r = rows[j];
      double acc = 0.0;
      for (std::size_t k = 0; k < r.w.size(); ++k) acc += r.w[k] * u(a, r.first + k);
      tmp[a * n + j] = acc;
    }
  }
  Field out(grid);
  for (std::size_t i = 0; i < n; ++i) {
    const Row& r = rows[i];
    for (std::size_t k = 0; k < r.w.size(); ++k) {
      const double wk = t * r.w[k];
      const double* src = &tmp[(r.first + k) * n];
      for (std::size_t j = 0; j < n; ++j) out(i, j) += wk * src[j];
    }
  }
  return out;
}

StatePair rescale(const StatePair& s, double t, Interpolation interp) {
  if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("rescale: t must be positive");
  if (t == 1.0) return s;
  Field u = rescale_field(s.u(), t, interp);
  Field v = rescale_field(s.v(), t, interp);
  if (t < 1.0) {
    // Dilation spreads the profile; flag states that no longer fit the box.
    const double before = std::max(s.u().boundary_max_abs(), s.v().boundary_max_abs());
    const double after = std::max(u.boundary_max_abs(), v.boundary_max_abs());
    if (after > kBoundaryDecayTolerance && after > 2.0 * before) {
      std::ostringstream os;
      os << "rescale by t=" << t << " raised the boundary value to " << after << "; results may be inaccurate";
      warn(os.str());
    }
  }
  if (s.normalized()) return StatePair(std::move(u), std::move(v), s.params());
  const double mu = inner(s.u(), s.u());
  const double mv = inner(s.v(), s.v());
  if (mu > 0.0) normalize_mass(u, mu);
  if (mv > 0.0) normalize_mass(v, mv);
  return StatePair::diagnostic(std::move(u), std::move(v), s.params());
}

OmegaResult classify_omega(const FiberProfile& pr, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("classify_omega: tol must be positive");
  OmegaResult r;
  r.f1 = pr.f(1.0);
  r.g1 = pr.g(1.0);
  const double scale = std::max(std::abs(pr.A), std::abs(pr.B));
  if (std::abs(r.f1) > tol * scale) return r;
  if (std::abs(r.g1) <= tol * scale) {
    r.degenerate = true;
    return r;
  }
  r.kind = r.g1 > 0.0 ? OmegaClass::OmegaPlus : OmegaClass::OmegaMinus;
  return r;
}

OmegaResult classify_omega(const StatePair& s, const LogKernelTable& table, double tol) {
  return classify_omega(fiber_profile(s, table), tol);
}

const char* to_string(OmegaClass kind) noexcept {
  switch (kind) {
    case OmegaClass::OmegaPlus:
      return "OmegaPlus";
    case OmegaClass::OmegaMinus:
      return "OmegaMinus";
    case OmegaClass::OffManifold:
      return "OffManifold";
  }
  return "OffManifold";
}

}  // namespace logsp
