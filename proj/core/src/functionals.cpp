#include "logsp/functionals.hpp"

#include <cmath>
#include <stdexcept>

namespace logsp {

void ModelParams::validate() const {
  if (!(p > 1.0) || !std::isfinite(p)) throw std::invalid_argument("p must exceed 1");
  if (!(c1 > 0.0) || !(c2 > 0.0) || !std::isfinite(c1) || !std::isfinite(c2)) {
    throw std::invalid_argument("masses c1 and c2 must be positive");
  }
  if (!std::isfinite(mu1) || !std::isfinite(mu2) || !std::isfinite(beta)) {
    throw std::invalid_argument("mu1, mu2 and beta must be finite");
  }
}

StatePair::StatePair(Field u, Field v, ModelParams params) : StatePair(std::move(u), std::move(v), params, true) {}

StatePair::StatePair(Field u, Field v, ModelParams params, bool normalize)
    : u_(std::move(u)), v_(std::move(v)), params_(params), normalized_(normalize) {
  params_.validate();
  require_same_grid(u_.grid(), v_.grid(), "StatePair");
  if (normalize) {
    normalize_mass(u_, params_.c1);
    normalize_mass(v_, params_.c2);
  }
}

StatePair StatePair::diagnostic(Field u, Field v, ModelParams params) {
  return StatePair(std::move(u), std::move(v), params, false);
}

StatePair StatePair::swapped() const {
  ModelParams q = params_;
  std::swap(q.mu1, q.mu2);
  std::swap(q.c1, q.c2);
  return StatePair(v_, u_, q, false);
}

namespace {

// |x|^e with the convention 0^e = 0.
inline double abs_pow(double x, double e) { return x == 0.0 ? 0.0 : std::pow(std::abs(x), e); }

}  // namespace

EnergyEval evaluate_energy(const StatePair& s, const LogKernelTable& table) {
  const auto& prm = s.params();
  const double p = prm.p;
  const auto u = s.u().values();
  const auto v = s.v().values();
  Field rho(s.grid());
  auto r = rho.values();
  double pu = 0.0, pv = 0.0, p0 = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    pu += abs_pow(u[k], 2.0 * p);
    pv += abs_pow(v[k], 2.0 * p);
    p0 += abs_pow(u[k] * v[k], p);
    r[k] = u[k] * u[k] + v[k] * v[k];
  }
  const double area = s.grid().cell_area();
  EnergyEval out{FunctionalBreakdown{}, log_convolution(rho, table)};
  auto& bd = out.bd;
  bd.Q_u = gradient_energy(s.u());
  bd.Q_v = gradient_energy(s.v());
  bd.P_u = area * pu;
  bd.P_v = area * pv;
  bd.P0 = area * p0;
  bd.R = prm.mu1 * bd.P_u + prm.mu2 * bd.P_v + 2.0 * prm.beta * bd.P0;
  bd.W0 = inner(rho, out.potential);
  bd.I = 0.5 * (bd.Q_u + bd.Q_v) + 0.25 * bd.W0 - bd.R / (2.0 * p);
  return out;
}

FunctionalBreakdown eval_breakdown(const StatePair& s, const LogKernelTable& table) {
  FunctionalBreakdown bd = evaluate_energy(s, table).bd;
  const auto u = s.u().values();
  const auto v = s.v().values();
  Field rho(s.grid());
  auto r = rho.values();
  for (std::size_t k = 0; k < u.size(); ++k) r[k] = u[k] * u[k] + v[k] * v[k];
  bd.W1 = inner(rho, table.convolve(rho, KernelKind::LogOnePlusR));
  bd.W2 = inner(rho, table.convolve(rho, KernelKind::LogOnePlusInvR));

  const Grid2D& g = s.grid();
  const std::size_t n = g.n();
  double nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double weight = std::log1p(std::hypot(g.node(i), g.node(j)));
      nu += weight * s.u()(i, j) * s.u()(i, j);
      nv += weight * s.v()(i, j) * s.v()(i, j);
    }
  }
  bd.norm0_u = g.cell_area() * nu;
  bd.norm0_v = g.cell_area() * nv;
  return bd;
}

double eval_I(const StatePair& s, const LogKernelTable& table) { return evaluate_energy(s, table).bd.I; }

FieldPair l2_gradient(const StatePair& s, const Field& potential, TermWeights weights) {
  require_same_grid(s.grid(), potential.grid(), "l2_gradient");
  const auto& prm = s.params();
  const double p = prm.p;
  Field gu = spectral_laplacian(s.u());
  Field gv = spectral_laplacian(s.v());
  gu *= -weights.kinetic;
  gv *= -weights.kinetic;
  const auto u = s.u().values();
  const auto v = s.v().values();
  const auto w = potential.values();
  auto a = gu.values();
  auto b = gv.values();
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double uk = u[k];
    const double vk = v[k];
    // |u|^{p-2} u |v|^p, written to stay finite at u = 0 when p < 2.
    const double cross_u = uk == 0.0 ? 0.0 : abs_pow(vk, p) * abs_pow(uk, p - 1.0) * (uk > 0 ? 1.0 : -1.0);
    const double cross_v = vk == 0.0 ? 0.0 : abs_pow(uk, p) * abs_pow(vk, p - 1.0) * (vk > 0 ? 1.0 : -1.0);
    const double self_u = abs_pow(uk, 2.0 * p - 2.0) * uk;
    const double self_v = abs_pow(vk, 2.0 * p - 2.0) * vk;
    a[k] += weights.convolution * w[k] * uk - weights.nonlinear * (prm.mu1 * self_u + prm.beta * cross_u);
    b[k] += weights.convolution * w[k] * vk - weights.nonlinear * (prm.mu2 * self_v + prm.beta * cross_v);
  }
  return {std::move(gu), std::move(gv)};
}

FieldPair l2_gradient(const StatePair& s, const LogKernelTable& table, TermWeights weights) {
  Field rho = hadamard(s.u(), s.u());
  rho += hadamard(s.v(), s.v());
  return l2_gradient(s, log_convolution(rho, table), weights);
}

std::pair<double, double> multipliers(const StatePair& s, const FieldPair& gradient) {
  const double mu = inner(s.u(), s.u());
  const double mv = inner(s.v(), s.v());
  const double l1 = mu > 0.0 ? -inner(gradient.first, s.u()) / mu : 0.0;
  const double l2 = mv > 0.0 ? -inner(gradient.second, s.v()) / mv : 0.0;
  return {l1, l2};
}

std::pair<double, double> multipliers(const StatePair& s, const LogKernelTable& table) {
  return multipliers(s, l2_gradient(s, table));
}

}  // namespace logsp
