#include "logsp/regimes.hpp"

#include "logsp/fiber.hpp"

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace logsp {

const char* to_string(RegimeKind kind) noexcept {
  switch (kind) {
    case RegimeKind::Thm1_i:
      return "Thm1_i";
    case RegimeKind::Thm1_ii:
      return "Thm1_ii";
    case RegimeKind::Thm1_iii:
      return "Thm1_iii";
    case RegimeKind::Thm2:
      return "Thm2";
    case RegimeKind::Unclassified:
      return "Unclassified";
  }
  return "Unclassified";
}

namespace {

double abs_pow(double x, double e) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), e); }

double lq_power(const Field& u, double q) {
  double sum = 0.0;
  for (double x : u.values()) sum += abs_pow(x, q);
  return u.grid().cell_area() * sum;
}

}  // namespace

double weinstein_quotient(const Field& u, double q) {
  const double mass = inner(u, u);
  const double kinetic = gradient_energy(u);
  if (!(mass > 0.0) || !(kinetic > 0.0)) throw std::invalid_argument("weinstein_quotient: field must be nonconstant");
  return lq_power(u, q) / (std::pow(kinetic, 0.5 * (q - 2.0)) * mass);
}

namespace {

enum class Shot { Overshoot, Undershoot };

struct ShotResult {
  Shot kind;
  double mass;  // 2 pi int Phi^2 r dr up to the decision point
};

// Integrates Phi'' = -Phi'/r + Phi - |Phi|^(q-2) Phi from Phi(0) = a.
ShotResult shoot(double a, double q) {
  constexpr double dr = 1e-3;
  constexpr double r_max = 60.0;
  auto rhs = [q](double r, double y, double z) {
    return std::array<double, 2>{z, -z / r + y - abs_pow(y, q - 2.0) * y};
  };
  // Series start avoids the 1/r singularity.
  double r = 1e-4;
  const double c2 = 0.25 * (a - std::pow(a, q - 1.0));
  double y = a + c2 * r * r;
  double z = 2.0 * c2 * r;
  double mass = std::numbers::pi * a * a * r * r;  // int_0^r 2 pi a^2 s ds
  while (r < r_max) {
    const auto k1 = rhs(r, y, z);
    const auto k2 = rhs(r + 0.5 * dr, y + 0.5 * dr * k1[0], z + 0.5 * dr * k1[1]);
    const auto k3 = rhs(r + 0.5 * dr, y + 0.5 * dr * k2[0], z + 0.5 * dr * k2[1]);
    const auto k4 = rhs(r + dr, y + dr * k3[0], z + dr * k3[1]);
    const double yn = y + dr / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    const double zn = z + dr / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    // Trapezoid on Phi^2 r is O(dr^2); Simpson-like accuracy is not needed at 1e-3.
    mass += std::numbers::pi * dr * (y * y * r + yn * yn * (r + dr));
    r += dr;
    y = yn;
    z = zn;
    if (y < 0.0) return {Shot::Overshoot, mass};
    if (z > 0.0) return {Shot::Undershoot, mass};
  }
  return {Shot::Undershoot, mass};
}

}  // namespace

double radial_ground_mass(double q) {
  if (!(q > 2.0)) throw std::invalid_argument("radial_ground_mass requires q > 2");
  double lo = 1.0;  // Phi(0) <= 1 never reaches zero
  double hi = 2.0;
  while (shoot(hi, q).kind == Shot::Undershoot) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw std::runtime_error("radial_ground_mass: no overshooting start found");
  }
  for (int it = 0; it < 200 && hi - lo > 4e-16 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (shoot(mid, q).kind == Shot::Overshoot) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  // The two bracketing trajectories agree until the tail is negligible.
  return 0.5 * (shoot(lo, q).mass + shoot(hi, q).mass);
}

double gn_constant_from_mass(double q, double mass) {
  const double e = 0.5 * (q - 2.0);
  return 0.5 * q * std::pow(2.0 / (q - 2.0), e) / std::pow(mass, e);
}

namespace {

struct AscentResult {
  double K = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

Field dilation_generator(const Field& f) {
  const Grid2D& g = f.grid();
  auto [fx, fy] = spectral_gradient(f);
  Field z = f;
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) z(i, j) += g.node(i) * fx(i, j) + g.node(j) * fy(i, j);
  }
  return z;
}

// Preconditioned gradient ascent on log J(u) = log P - ((q-2)/2) log Q - log M.
AscentResult quotient_ascent(double q, const Grid2D& grid) {
  // Start from the Gaussian whose width roughly matches the maximiser.
  Field u = Field::sample(grid, [](double x, double y) { return std::exp(-0.5 * (x * x + y * y)); });
  normalize_mass(u, 1.0);
  const double kinetic0 = gradient_energy(u);
  auto log_quotient = [q](const Field& f) { return std::log(weinstein_quotient(f, q)); };
  double J = log_quotient(u);
  double tau = 1.0;
  AscentResult out;
  constexpr int kMaxIters = 2000;
  constexpr double kTol = 1e-10;
  for (int it = 0; it < kMaxIters; ++it) {
    const double P = lq_power(u, q);
    const double Q = gradient_energy(u);
    const double M = inner(u, u);
    Field grad = spectral_laplacian(u);
    grad *= (q - 2.0) / Q;  // -(q-2)(-Delta u)/Q
    Field nl(grid);
    auto nv = nl.values();
    const auto uv = u.values();
    for (std::size_t k = 0; k < uv.size(); ++k) nv[k] = q * abs_pow(uv[k], q - 2.0) * uv[k] / P - 2.0 * uv[k] / M;
    grad += nl;
    // The quotient is invariant under u -> a u(b x). Both generators are
    // removed from the gradient and the search direction so the iterate keeps
    // its amplitude and width; the residual is measured on what remains.
    const Field z = dilation_generator(u);
    const double zz = inner(z, z);
    grad.axpy(-inner(grad, u) / M, u);
    grad.axpy(-inner(grad, z) / zz, z);
    out.residual = std::sqrt(inner(grad, grad) * M);
    out.iterations = it;
    if (!std::isfinite(out.residual)) throw std::runtime_error("gn_constant: quotient ascent diverged");
    if (out.residual < kTol) break;
    // At the maximiser (q-2)/Q (-Delta u) + 2u/M balances the nonlinear term,
    // so the matching resolvent is a near-Newton preconditioner.
    const double shift = 2.0 * Q / ((q - 2.0) * M);
    Field dir = apply_resolvent(grad, shift);
    dir *= Q / (q - 2.0);
    dir.axpy(-inner(dir, u) / M, u);
    dir.axpy(-inner(dir, z) / zz, z);
    const double slope = inner(grad, dir);
    if (!(slope > 0.0)) break;
    tau = std::min(2.0 * tau, 1.0);
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      Field trial = u;
      trial.axpy(tau, dir);
      normalize_mass(trial, 1.0);
      const double Jt = log_quotient(trial);
      if (std::isfinite(Jt) && Jt >= J + 1e-4 * tau * slope) {
        const double t = std::sqrt(kinetic0 / gradient_energy(trial));
        if (std::abs(std::log(t)) > 0.02) {
          trial = rescale_field(trial, t, Interpolation::Spectral);
          normalize_mass(trial, 1.0);
        }
        u = std::move(trial);
        J = log_quotient(u);
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) break;  // no further ascent possible at rounding level
  }
  if (!std::isfinite(J)) throw std::runtime_error("gn_constant: quotient ascent diverged");
  out.K = std::exp(J);
  return out;
}

std::mutex& cache_mutex() {
  static std::mutex m;
  return m;
}

std::map<std::tuple<double, std::size_t, double>, GNConstant>& cache() {
  static std::map<std::tuple<double, std::size_t, double>, GNConstant> c;
  return c;
}

}  // namespace

GNConstant gn_constant(double q, const Grid2D& grid) {
  if (!(q > 2.0) || !std::isfinite(q)) throw std::invalid_argument("gn_constant requires q > 2");
  const auto key = std::make_tuple(q, grid.n(), grid.half_width());
  {
    std::lock_guard lock(cache_mutex());
    if (auto it = cache().find(key); it != cache().end()) return it->second;
  }
  GNConstant out;
  out.q = q;
  out.ground_mass = radial_ground_mass(q);
  out.K_shooting = gn_constant_from_mass(q, out.ground_mass);
  const AscentResult asc = quotient_ascent(q, grid);
  out.K_ascent = asc.K;
  out.residual = asc.residual;
  out.iterations = asc.iterations;
  out.relative_gap = std::abs(out.K_ascent - out.K_shooting) / out.K_shooting;
  out.K = std::max(out.K_ascent, out.K_shooting);
  out.method = out.K_ascent >= out.K_shooting ? "quotient_ascent" : "radial_shooting";
  if (out.relative_gap > kGNAgreement) {
    std::ostringstream os;
    os << "gn_constant: ascent (" << out.K_ascent << ") and shooting (" << out.K_shooting << ") disagree by "
       << out.relative_gap;
    throw std::runtime_error(os.str());
  }
  std::lock_guard lock(cache_mutex());
  cache().emplace(key, out);
  return out;
}

double mass_threshold(const ModelParams& params, double K2p) {
  const double p = params.p;
  const double mu0 = std::max(params.mu1 + params.beta, params.mu2 + params.beta);
  if (!(p > 2.0)) throw std::invalid_argument("mass_threshold requires p > 2");
  if (!(mu0 > 0.0)) throw std::invalid_argument("mass_threshold requires mu0 > 0");
  if (!(K2p > 0.0)) throw std::invalid_argument("mass_threshold requires K_2p > 0");
  const double e = 1.0 / (2.0 * p - 3.0);
  const double inner_term = p * std::pow(p - 2.0, p - 2.0) / (K2p * mu0 * std::pow(p - 1.0, p));
  return std::pow(4.0, (p - 2.0) * e) * std::pow(inner_term, e);
}

Regime classify_regime(const ModelParams& params, std::optional<double> K4, std::optional<double> K2p) {
  params.validate();
  Regime r;
  r.mu0 = std::max(params.mu1 + params.beta, params.mu2 + params.beta);
  const double p = params.p;
  if (!(params.beta > 0.0)) {
    r.slack = params.beta;
    r.reason = "beta <= 0: no regime covers it";
    return r;
  }
  if (r.mu0 <= 0.0) {
    r.kind = RegimeKind::Thm1_i;
    r.slack = -r.mu0;
    r.reason = "max(mu1+beta, mu2+beta) <= 0";
    return r;
  }
  if (p < 2.0) {
    r.kind = RegimeKind::Thm1_ii;
    r.slack = 2.0 - p;
    r.reason = "1 < p < 2";
    return r;
  }
  if (p == 2.0) {
    if (!K4) throw std::invalid_argument("classify_regime: K4 is required when p = 2");
    const double m1 = 2.0 - *K4 * (params.mu1 + params.beta) * params.c1;
    const double m2 = 2.0 - *K4 * (params.mu2 + params.beta) * params.c2;
    r.slack = std::min(m1, m2);
    if (r.slack > 0.0) {
      r.kind = RegimeKind::Thm1_iii;
      r.reason = "p = 2 and 2 - K4 (mu_i + beta) c_i > 0 for i = 1, 2";
    } else {
      r.reason = "p = 2 but 2 - K4 (mu_i + beta) c_i <= 0";
    }
    return r;
  }
  const double min_coeff = std::min({params.mu1, params.mu2, params.beta});
  if (min_coeff <= 0.0) {
    r.slack = min_coeff;
    r.reason = "p > 2 requires mu1, mu2, beta > 0 for Thm2";
    return r;
  }
  if (!K2p) throw std::invalid_argument("classify_regime: K_2p is required when p > 2 with positive couplings");
  r.threshold = mass_threshold(params, *K2p);
  if (p < 2.0 + kSupercriticalMargin) {
    r.slack = p - 2.0 - kSupercriticalMargin;
    r.reason = "p too close to 2 for the Thm2 analysis";
    return r;
  }
  r.slack = *r.threshold - params.total_mass();
  if (r.slack > 0.0) {
    r.kind = RegimeKind::Thm2;
    r.reason = "p > 2, mu1, mu2, beta > 0 and c1 + c2 below the mass threshold";
  } else {
    r.reason = "c1 + c2 is not below the Thm2 mass threshold";
  }
  return r;
}

Grid2D gn_reference_grid() { return make_grid(128, 8.0); }

GNConstant gn_constant(double q) { return gn_constant(q, gn_reference_grid()); }

}  // namespace logsp
