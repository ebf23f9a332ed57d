#include "logsp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "logsp/validate.hpp"
#include "newton_polish.hpp"

namespace logsp {

void SolveOptions::validate() const {
  if (max_iters < 0) throw std::invalid_argument("max_iters must be nonnegative");
  if (!(grad_tol > 0.0) || !(manifold_tol > 0.0)) throw std::invalid_argument("tolerances must be positive");
  if (!(step0 > 0.0)) throw std::invalid_argument("step0 must be positive");
  if (!(armijo_shrink > 0.0 && armijo_shrink < 1.0) || !(armijo_c > 0.0 && armijo_c < 1.0)) {
    throw std::invalid_argument("armijo constants must lie in (0, 1)");
  }
  if (perturbation < 0.0) throw std::invalid_argument("perturbation must be nonnegative");
  if (!(initial_width > 0.0)) throw std::invalid_argument("initial_width must be positive");
  if (!(recenter_threshold > 0.0)) throw std::invalid_argument("recenter_threshold must be positive");
  if (!(polish_switch > 0.0)) throw std::invalid_argument("polish_switch must be positive");
}

const char* to_string(Branch b) noexcept { return b == Branch::Ground ? "Ground" : "Excited"; }

StatePair initial_state(const ModelParams& params, const Grid2D& grid, const SolveOptions& opts) {
  opts.validate();
  const double s2 = 2.0 * opts.initial_width * opts.initial_width;
  const double d = opts.initial_offset;
  Field u = Field::sample(grid, [&](double x, double y) { return std::exp(-((x - d) * (x - d) + y * y) / s2); });
  Field v = Field::sample(grid, [&](double x, double y) { return std::exp(-((x + d) * (x + d) + y * y) / s2); });
  if (opts.perturbation > 0.0) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    auto perturb = [&](Field& f) {
      constexpr int kModes = 6;
      double kx[kModes], ky[kModes], a[kModes], ph[kModes];
      for (int m = 0; m < kModes; ++m) {
        kx[m] = 2.0 * coeff(rng) / opts.initial_width;
        ky[m] = 2.0 * coeff(rng) / opts.initial_width;
        a[m] = coeff(rng) / kModes;
        ph[m] = phase(rng);
      }
      const Field base = f;
      for (std::size_t i = 0; i < grid.n(); ++i) {
        const double x = grid.node(i);
        for (std::size_t j = 0; j < grid.n(); ++j) {
          const double y = grid.node(j);
          double wave = 0.0;
          for (int m = 0; m < kModes; ++m) wave += a[m] * std::cos(kx[m] * x + ky[m] * y + ph[m]);
          f(i, j) = base(i, j) * (1.0 + opts.perturbation * wave);
        }
      }
    };
    perturb(u);
    perturb(v);
  }
  return StatePair(std::move(u), std::move(v), params);
}

Regime regime_for(const ModelParams& params) {
  params.validate();
  std::optional<double> K4, K2p;
  if (params.p == 2.0) K4 = gn_constant(4.0).K;
  if (params.p > 2.0 && params.mu1 > 0.0 && params.mu2 > 0.0 && params.beta > 0.0) {
    K2p = gn_constant(2.0 * params.p).K;
  }
  return classify_regime(params, K4, K2p);
}

namespace {

enum class Objective { Plain, FiberMinus };

struct Eval {
  double value = 0.0;
  double t = 1.0;
  EnergyEval energy;
  FiberProfile profile;
};

std::optional<Eval> evaluate(const StatePair& s, const LogKernelTable& table, Objective obj) {
  EnergyEval e = evaluate_energy(s, table);
  FiberProfile pr = fiber_profile(e.bd, s.params());
  if (obj == Objective::Plain) {
    const double I = e.bd.I;
    return Eval{I, 1.0, std::move(e), pr};
  }
  const FiberRootSet roots = fiber_roots(pr);
  const auto* two = std::get_if<FiberRoots>(&roots);
  if (two == nullptr) return std::nullopt;
  return Eval{pr.F(two->t_minus), two->t_minus, std::move(e), pr};
}

TermWeights weights_at(double t, double p) { return {t * t, 1.0, std::pow(t, 2.0 * p - 2.0)}; }

double norm_pair(const Field& a, const Field& b, double total_mass) {
  return std::sqrt((inner(a, a) + inner(b, b)) / total_mass);
}

// x . grad f + f, the generator of the fiber dilation.
Field generator(const Field& f) {
  const Grid2D& g = f.grid();
  auto [fx, fy] = spectral_gradient(f);
  Field z = f;
  for (std::size_t i = 0; i < g.n(); ++i) {
    const double x = g.node(i);
    for (std::size_t j = 0; j < g.n(); ++j) z(i, j) += x * fx(i, j) + g.node(j) * fy(i, j);
  }
  return z;
}

// Steepest descent direction in the resolvent metric, orthogonal to the mass
// constraints and, for fiber objectives, to the dilation generator.
std::pair<Field, Field> constrained_direction(const StatePair& s, const Field& ru, const Field& rv, double shift,
                                              bool drop_dilation) {
  const Field zero(s.grid());
  std::vector<std::pair<Field, Field>> cons;
  cons.emplace_back(s.u(), zero);
  cons.emplace_back(zero, s.v());
  if (drop_dilation) cons.emplace_back(generator(s.u()), generator(s.v()));
  const std::size_t m = cons.size();
  std::vector<std::pair<Field, Field>> pc;
  pc.reserve(m);
  for (const auto& c : cons) pc.emplace_back(apply_resolvent(c.first, shift), apply_resolvent(c.second, shift));
  Field du = apply_resolvent(ru, shift);
  Field dv = apply_resolvent(rv, shift);

  // Gram system G a = b with G_jk = <c_j, M^-1 c_k>, b_j = <c_j, M^-1 r>.
  std::vector<double> G(m * m), b(m);
  for (std::size_t j = 0; j < m; ++j) {
    b[j] = inner(cons[j].first, du) + inner(cons[j].second, dv);
    for (std::size_t k = 0; k < m; ++k) {
      G[j * m + k] = inner(cons[j].first, pc[k].first) + inner(cons[j].second, pc[k].second);
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r) {
      if (std::abs(G[r * m + c]) > std::abs(G[piv * m + c])) piv = r;
    }
    if (G[piv * m + c] == 0.0) return {std::move(du), std::move(dv)};
    if (piv != c) {
      for (std::size_t k = 0; k < m; ++k) std::swap(G[c * m + k], G[piv * m + k]);
      std::swap(b[c], b[piv]);
    }
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = G[r * m + c] / G[c * m + c];
      for (std::size_t k = c; k < m; ++k) G[r * m + k] -= f * G[c * m + k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> a(m);
  for (std::size_t c = m; c-- > 0;) {
    double acc = b[c];
    for (std::size_t k = c + 1; k < m; ++k) acc -= G[c * m + k] * a[k];
    a[c] = acc / G[c * m + c];
  }
  for (std::size_t k = 0; k < m; ++k) {
    du.axpy(-a[k], pc[k].first);
    dv.axpy(-a[k], pc[k].second);
  }
  return {std::move(du), std::move(dv)};
}

// Shifts both components so that the centre of mass of u^2 + v^2 sits at the origin.
StatePair centred(const StatePair& s) {
  const Grid2D& g = s.grid();
  double m = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < g.n(); ++i) {
    for (std::size_t j = 0; j < g.n(); ++j) {
      const double rho = s.u()(i, j) * s.u()(i, j) + s.v()(i, j) * s.v()(i, j);
      m += rho;
      mx += rho * g.node(i);
      my += rho * g.node(j);
    }
  }
  if (m == 0.0) return s;
  const double ax = -mx / m, ay = -my / m;
  return StatePair(spectral_translate(s.u(), ax, ay), spectral_translate(s.v(), ax, ay), s.params());
}

double separation_threshold(const ModelParams& prm) {
  const double total = prm.total_mass();
  return (prm.p - 1.0) / (prm.p - 2.0) * 0.25 * total * total;
}

// Moves a fiber iterate onto its critical point of F.
StatePair recenter(const StatePair& s, double t) {
  return rescale(s, t, Interpolation::Spectral);
}

}  // namespace

SolveReport assess_state(const StatePair& s, const LogKernelTable& table, double manifold_tol) {
  SolveReport r(s);
  const EnergyEval e = evaluate_energy(s, table);
  r.breakdown = e.bd;
  r.energy = e.bd.I;
  const FieldPair grad = l2_gradient(s, e.potential);
  const auto [l1, l2] = multipliers(s, grad);
  r.lambda1 = l1;
  r.lambda2 = l2;
  Field ru = grad.first;
  ru.axpy(l1, s.u());
  Field rv = grad.second;
  rv.axpy(l2, s.v());
  r.residuals.projected_grad = norm_pair(ru, rv, inner(s.u(), s.u()) + inner(s.v(), s.v()));
  r.residuals.M_value = M_value(e.bd, s.params());
  r.residuals.M_scale = M_scale(e.bd, s.params());
  r.residuals.pohozaev = pohozaev_terms(e.bd, s.params(), l1, l2).relative();
  r.residuals.nehari = nehari_terms(e.bd, s.params(), l1, l2).relative();
  r.omega = classify_omega(fiber_profile(e.bd, s.params()), manifold_tol).kind;
  return r;
}

namespace {

SolveReport descend(StatePair s, const LogKernelTable& table, const Regime& regime, const SolveOptions& opts,
                    Objective obj, Branch branch) {
  opts.validate();
  require_same_grid(s.grid(), table.grid(), "solver");
  const ModelParams prm = s.params();
  const bool fiber = obj != Objective::Plain;
  std::ostringstream msg;

  auto ev = evaluate(s, table, obj);
  if (!ev) throw std::domain_error("initial state violates the two-root condition");
  if (fiber) {
    // Start on the branch of the fiber that the objective follows.
    s = recenter(s, ev->t);
    ev = evaluate(s, table, obj);
    if (!ev) throw std::domain_error("initial state violates the two-root condition");
  }

  std::vector<double> trace{ev->value};
  double tau = opts.step0;
  bool converged = false;
  bool failed = false;
  bool stalled = false;
  const bool polish = obj == Objective::FiberMinus && opts.polish;
  int it = 0;
  double min_ball_slack = std::numeric_limits<double>::infinity();
  const bool guard_ball = obj == Objective::Plain && regime.kind == RegimeKind::Thm2;
  const double ball = separation_threshold(prm);
  if (guard_ball) min_ball_slack = ball - ev->profile.A;

  for (; it < opts.max_iters; ++it) {
    const TermWeights w = weights_at(ev->t, prm.p);
    FieldPair grad = l2_gradient(s, ev->energy.potential, w);
    const auto [l1, l2] = multipliers(s, grad);
    Field ru = std::move(grad.first);
    ru.axpy(l1, s.u());
    Field rv = std::move(grad.second);
    rv.axpy(l2, s.v());
    const double mu = inner(s.u(), s.u());
    const double mv = inner(s.v(), s.v());
    const double res = norm_pair(ru, rv, mu + mv);
    if (!std::isfinite(res)) {
      msg << "non-finite gradient at iteration " << it;
      failed = true;
      break;
    }

    if (res <= opts.grad_tol) {
      if (fiber && std::abs(std::log(ev->t)) > 1e-10) {
        s = recenter(s, ev->t);
        ev = evaluate(s, table, obj);
        if (!ev) {
          msg << "two-root condition lost while recentring";
          failed = true;
          break;
        }
        continue;
      }
      const double M = M_value(ev->energy.bd, prm);
      const double scale = M_scale(ev->energy.bd, prm);
      if (std::abs(M) <= opts.manifold_tol * scale) {
        converged = true;
      } else {
        msg << "stationary point with |M|/scale = " << std::abs(M) / scale << " above manifold_tol";
      }
      break;
    }

    if (polish && res <= opts.polish_switch) break;

    const double shift = std::max({1.0, std::abs(l1), std::abs(l2)});
    auto [du, dv] = constrained_direction(s, ru, rv, shift, fiber);
    const double slope = inner(ru, du) + inner(rv, dv);
    if (!(slope > 0.0)) {
      msg << "no descent direction at iteration " << it;
      stalled = true;
      break;
    }

    tau = std::min(2.0 * tau, 10.0 * opts.step0);
    std::optional<StatePair> trial;
    std::optional<Eval> trial_ev;
    while (true) {
      Field un = s.u();
      un.axpy(-tau, du);
      Field vn = s.v();
      vn.axpy(-tau, dv);
      StatePair cand(std::move(un), std::move(vn), prm);
      auto cev = evaluate(cand, table, obj);
      if (cev && cev->value <= ev->value - opts.armijo_c * tau * slope) {
        trial.emplace(std::move(cand));
        trial_ev = std::move(cev);
        break;
      }
      tau *= opts.armijo_shrink;
      if (tau < 1e-14 * opts.step0) break;
    }
    if (!trial) {
      msg << "line search stalled at iteration " << it << " (projected gradient " << res << ")";
      stalled = true;
      break;
    }
    s = std::move(*trial);
    ev = std::move(trial_ev);
    trace.push_back(ev->value);

    if (guard_ball) min_ball_slack = std::min(min_ball_slack, ball - ev->profile.A);
    if (fiber && std::abs(std::log(ev->t)) > opts.recenter_threshold) {
      s = recenter(s, ev->t);
      ev = evaluate(s, table, obj);
      if (!ev) {
        msg << "two-root condition lost while recentring";
        failed = true;
        break;
      }
    }
  }
  if (!converged && !failed && !stalled && it == opts.max_iters) {
    msg << "iteration cap " << opts.max_iters << " reached";
  }

  if (fiber && ev && std::abs(std::log(ev->t)) > 0.0) s = recenter(s, ev->t);
  std::optional<int> newton_steps;
  if (polish && !failed && !converged) {
    // The descent leaves a residual along the discretely broken dilation
    // symmetry; finish on the Euler-Lagrange system itself.
    detail::PolishResult pr = detail::newton_polish(centred(s), table, 0.1 * opts.grad_tol);
    newton_steps = pr.newton_steps;
    const OmegaClass cls = classify_omega(fiber_profile(pr.state, table), opts.manifold_tol).kind;
    std::ostringstream pmsg;
    if (!pr.converged) {
      pmsg << "Newton polish failed: " << pr.message;
    } else if (cls != OmegaClass::OmegaMinus) {
      pmsg << "Newton polish left Omega-minus (" << to_string(cls) << ")";
    } else {
      s = std::move(pr.state);
      const SolveReport chk = assess_state(s, table, opts.manifold_tol);
      converged = chk.residuals.projected_grad <= opts.grad_tol &&
                  std::abs(chk.residuals.M_value) <= opts.manifold_tol * chk.residuals.M_scale;
      msg.str("");
      if (!converged) pmsg << "Newton polish ended above tolerance";
    }
    if (!pmsg.str().empty()) msg << (msg.str().empty() ? "" : "; ") << pmsg.str();
  }
  SolveReport report = assess_state(s, table, opts.manifold_tol);
  report.newton_steps = newton_steps;
  report.branch = branch;
  report.regime = regime;
  report.iterations = it;
  report.energy_trace = std::move(trace);
  report.converged = converged;
  if (regime.kind == RegimeKind::Thm2) {
    const double A = report.breakdown.Q_u + report.breakdown.Q_v;
    const double slack = separation_threshold(prm) - A;
    report.separation_slack = branch == Branch::Ground ? slack : -slack;
    if (*report.separation_slack <= 0.0) {
      report.converged = false;
      msg << (msg.str().empty() ? "" : "; ") << "Thm2 gradient-ball separation violated";
    }
    if (guard_ball && min_ball_slack <= 0.0) {
      report.converged = false;
      msg << (msg.str().empty() ? "" : "; ") << "an iterate left the gradient ball";
    }
  }
  report.message = converged && msg.str().empty() ? "converged" : msg.str();
  return report;
}

}  // namespace

std::pair<double, FiberRoots> eval_I_minus(const StatePair& s, const LogKernelTable& table) {
  const FiberProfile pr = fiber_profile(s, table);
  const FiberRootSet roots = fiber_roots(pr);
  const auto* two = std::get_if<FiberRoots>(&roots);
  if (two == nullptr) throw std::domain_error("eval_I_minus: two-root condition fails for this state");
  return {pr.F(two->t_minus), *two};
}

SolveReport solve_ground(const StatePair& start, const LogKernelTable& table, const Regime& regime,
                         const SolveOptions& opts) {
  switch (regime.kind) {
    case RegimeKind::Thm1_i:
    case RegimeKind::Thm1_ii:
    case RegimeKind::Thm1_iii:
      return descend(start, table, regime, opts, Objective::Plain, Branch::Ground);
    case RegimeKind::Thm2: {
      // Local minimum of I in the gradient ball: start from the fiber minimum.
      const FiberRootSet roots = fiber_roots(fiber_profile(start, table));
      const auto* two = std::get_if<FiberRoots>(&roots);
      if (two == nullptr) throw std::domain_error("initial state violates the two-root condition");
      return descend(recenter(start, two->t_plus), table, regime, opts, Objective::Plain, Branch::Ground);
    }
    case RegimeKind::Unclassified:
      break;
  }
  throw std::invalid_argument("solve_ground: parameters are Unclassified (" + regime.reason + ")");
}

SolveReport solve_ground(const ModelParams& params, const Grid2D& grid, const SolveOptions& opts) {
  const Regime regime = regime_for(params);
  if (regime.kind == RegimeKind::Unclassified) {
    throw std::invalid_argument("solve_ground: parameters are Unclassified (" + regime.reason + ")");
  }
  const LogKernelTable table(grid);
  return solve_ground(initial_state(params, grid, opts), table, regime, opts);
}

SolveReport solve_excited(const StatePair& start, const LogKernelTable& table, const Regime& regime,
                          const SolveOptions& opts) {
  if (regime.kind != RegimeKind::Thm2) {
    throw std::invalid_argument("solve_excited requires the Thm2 regime");
  }
  return descend(start, table, regime, opts, Objective::FiberMinus, Branch::Excited);
}

SolveReport solve_excited(const ModelParams& params, const Grid2D& grid, const SolveOptions& opts) {
  const Regime regime = regime_for(params);
  if (regime.kind != RegimeKind::Thm2) throw std::invalid_argument("solve_excited requires the Thm2 regime");
  const LogKernelTable table(grid);
  return solve_excited(initial_state(params, grid, opts), table, regime, opts);
}

}  // namespace logsp
