#include "logsp/validate.hpp"

#include <algorithm>
#include <cmath>

namespace logsp {

double M_value(const FunctionalBreakdown& bd, const ModelParams& params) {
  const double total = params.total_mass();
  return bd.Q_u + bd.Q_v - (params.p - 1.0) / params.p * bd.R - 0.25 * total * total;
}

double M_value(const StatePair& s, const LogKernelTable& table) {
  return M_value(evaluate_energy(s, table).bd, s.params());
}

double M_scale(const FunctionalBreakdown& bd, const ModelParams& params) {
  const double total = params.total_mass();
  return bd.Q_u + bd.Q_v + 0.25 * total * total;
}

double IdentityTerms::sum() const {
  double s = 0.0;
  for (double t : terms) s += t;
  return s;
}

double IdentityTerms::relative() const {
  double m = 0.0;
  for (double t : terms) m = std::max(m, std::abs(t));
  return m > 0.0 ? std::abs(sum()) / m : 0.0;
}

IdentityTerms pohozaev_terms(const FunctionalBreakdown& bd, const ModelParams& params, double lambda1,
                             double lambda2) {
  const double total = params.total_mass();
  return {{lambda1 * params.c1, lambda2 * params.c2, bd.W0, 0.25 * total * total, -bd.R / params.p}};
}

IdentityTerms nehari_terms(const FunctionalBreakdown& bd, const ModelParams& params, double lambda1,
                           double lambda2) {
  return {{bd.Q_u + bd.Q_v, lambda1 * params.c1, lambda2 * params.c2, bd.W0, -bd.R}};
}

double pohozaev_residual(const StatePair& s, double lambda1, double lambda2, const LogKernelTable& table) {
  return pohozaev_terms(evaluate_energy(s, table).bd, s.params(), lambda1, lambda2).relative();
}

double nehari_residual(const StatePair& s, double lambda1, double lambda2, const LogKernelTable& table) {
  return nehari_terms(evaluate_energy(s, table).bd, s.params(), lambda1, lambda2).relative();
}

double TransformErrors::max() const { return std::max({Q, P_u, P_v, P0, R, W0}); }

namespace {

double rel(double actual, double expected) {
  const double d = std::abs(actual - expected);
  return expected != 0.0 ? d / std::abs(expected) : d;
}

}  // namespace

std::vector<TransformErrors> check_transform(const StatePair& s, const LogKernelTable& table,
                                             const std::vector<double>& t_list, Interpolation interp) {
  const FunctionalBreakdown base = evaluate_energy(s, table).bd;
  const double p = s.params().p;
  const double mu = inner(s.u(), s.u());
  const double mv = inner(s.v(), s.v());
  const double total = mu + mv;
  std::vector<TransformErrors> out;
  out.reserve(t_list.size());
  for (double t : t_list) {
    if (!(t > 0.0)) throw std::invalid_argument("check_transform: every t must be positive");
    const FunctionalBreakdown bd = evaluate_energy(rescale(s, t, interp), table).bd;
    const double tp = std::pow(t, 2.0 * p - 2.0);
    TransformErrors e;
    e.t = t;
    e.Q = rel(bd.Q_u + bd.Q_v, t * t * (base.Q_u + base.Q_v));
    e.P_u = rel(bd.P_u, tp * base.P_u);
    e.P_v = rel(bd.P_v, tp * base.P_v);
    e.P0 = rel(bd.P0, tp * base.P0);
    e.R = rel(bd.R, tp * base.R);
    const double shift = bd.W0 - base.W0 + total * total * std::log(t);
    e.W0 = base.W0 != 0.0 ? std::abs(shift) / std::abs(base.W0) : std::abs(shift);
    out.push_back(e);
  }
  return out;
}

KernelBounds kernel_bounds(const StatePair& s, const LogKernelTable& table) {
  Field rho = hadamard(s.u(), s.u());
  rho += hadamard(s.v(), s.v());
  KernelBounds kb;
  kb.W2 = inner(rho, table.convolve(rho, KernelKind::LogOnePlusInvR));
  kb.riesz = inner(rho, table.convolve(rho, KernelKind::InverseR));
  kb.ok = kb.W2 >= 0.0 && kb.W2 <= kb.riesz;
  return kb;
}

bool check_kernel_bounds(const StatePair& s, const LogKernelTable& table) { return kernel_bounds(s, table).ok; }

IdentityReport validate_state(const StatePair& s, const LogKernelTable& table, const std::vector<double>& t_list) {
  IdentityReport r;
  const FunctionalBreakdown bd = eval_breakdown(s, table);
  const auto [l1, l2] = multipliers(s, table);
  r.lambda1 = l1;
  r.lambda2 = l2;
  r.pohozaev_residual = pohozaev_terms(bd, s.params(), l1, l2).relative();
  r.nehari_residual = nehari_terms(bd, s.params(), l1, l2).relative();
  r.M_value = M_value(bd, s.params());
  r.M_scale = M_scale(bd, s.params());
  r.split_error = std::abs(bd.W0 - (bd.W1 - bd.W2)) / std::max({std::abs(bd.W1), std::abs(bd.W2), 1.0});
  r.transform_errors = check_transform(s, table, t_list);
  r.hls_ok = check_kernel_bounds(s, table);
  return r;
}

}  // namespace logsp
