#include "newton_polish.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

namespace logsp::detail {

namespace {

// Unknowns (u, v, l1, l2) and residual vectors share this layout.
struct KVec {
  Field u, v;
  double a = 0.0, b = 0.0;

  explicit KVec(const Grid2D& g) : u(g), v(g) {}
  KVec(Field uu, Field vv, double aa, double bb) : u(std::move(uu)), v(std::move(vv)), a(aa), b(bb) {}

  KVec& axpy(double s, const KVec& o) {
    u.axpy(s, o.u);
    v.axpy(s, o.v);
    a += s * o.a;
    b += s * o.b;
    return *this;
  }
  KVec& scale(double s) {
    u *= s;
    v *= s;
    a *= s;
    b *= s;
    return *this;
  }
};

double dot(const KVec& x, const KVec& y) { return inner(x.u, y.u) + inner(x.v, y.v) + x.a * y.a + x.b * y.b; }
double norm(const KVec& x) { return std::sqrt(dot(x, x)); }

class System {
 public:
  System(const LogKernelTable& table, ModelParams params) : table_(table), params_(params) {}

  KVec residual(const KVec& x) const {
    const StatePair s = StatePair::diagnostic(x.u, x.v, params_);
    FieldPair g = l2_gradient(s, table_);
    g.first.axpy(x.a, x.u);
    g.second.axpy(x.b, x.v);
    return KVec(std::move(g.first), std::move(g.second), 0.5 * (inner(x.u, x.u) - params_.c1),
                0.5 * (inner(x.v, x.v) - params_.c2));
  }

  // Central difference of the residual along d.
  KVec jacobian_times(const KVec& x, const KVec& d) const {
    const double dn = std::sqrt(inner(d.u, d.u) + inner(d.v, d.v));
    if (dn == 0.0) {
      KVec out(x.u.grid());
      out.u.axpy(d.a, x.u);
      out.v.axpy(d.b, x.v);
      return out;
    }
    const double xn = std::sqrt(inner(x.u, x.u) + inner(x.v, x.v));
    const double eps = 1e-6 * std::max(xn, 1.0) / dn;
    KVec xp = x;
    xp.axpy(eps, d);
    KVec xm = x;
    xm.axpy(-eps, d);
    KVec out = residual(xp);
    out.axpy(-1.0, residual(xm));
    return out.scale(0.5 / eps);
  }

  KVec precondition(const KVec& r, double shift) const {
    return KVec(apply_resolvent(r.u, shift), apply_resolvent(r.v, shift), r.a, r.b);
  }

 private:
  const LogKernelTable& table_;
  ModelParams params_;
};

// Right-preconditioned restarted GMRES for J dx = rhs; dx is accumulated from
// preconditioned basis vectors. Returns the iteration count.
int gmres(const System& sys, const KVec& x, const KVec& rhs, double shift, double rtol, int restart, int max_iter,
          KVec& dx) {
  const double bnorm = norm(rhs);
  int total = 0;
  if (bnorm == 0.0) return 0;
  while (total < max_iter) {
    KVec r = rhs;
    if (total > 0) r.axpy(-1.0, sys.jacobian_times(x, dx));
    const double beta = norm(r);
    if (beta <= rtol * bnorm) break;
    std::vector<KVec> V;
    std::vector<KVec> Z;
    V.push_back(r.scale(1.0 / beta));
    std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), e(restart + 1, 0.0);
    e[0] = beta;
    int k = 0;
    bool done = false;
    while (k < restart && total < max_iter && !done) {
      Z.push_back(sys.precondition(V[k], shift));
      KVec w = sys.jacobian_times(x, Z[k]);
      for (int i = 0; i <= k; ++i) {
        H[i][k] = dot(w, V[i]);
        w.axpy(-H[i][k], V[i]);
      }
      const double wn = norm(w);
      H[k + 1][k] = wn;
      for (int i = 0; i < k; ++i) {
        const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
        H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
        H[i][k] = t;
      }
      const double den = std::hypot(H[k][k], H[k + 1][k]);
      cs[k] = den > 0.0 ? H[k][k] / den : 1.0;
      sn[k] = den > 0.0 ? H[k + 1][k] / den : 0.0;
      H[k][k] = den;
      H[k + 1][k] = 0.0;
      e[k + 1] = -sn[k] * e[k];
      e[k] *= cs[k];
      ++k;
      ++total;
      done = std::abs(e[k]) <= rtol * bnorm || wn == 0.0;
      if (!done) V.push_back(w.scale(1.0 / wn));
    }
    std::vector<double> y(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
      double acc = e[i];
      for (int j = i + 1; j < k; ++j) acc -= H[i][j] * y[j];
      y[i] = H[i][i] != 0.0 ? acc / H[i][i] : 0.0;
    }
    for (int i = 0; i < k; ++i) dx.axpy(y[i], Z[i]);
    if (done) break;
  }
  return total;
}

double field_residual(const KVec& r, double total_mass) {
  return std::sqrt((inner(r.u, r.u) + inner(r.v, r.v)) / total_mass);
}

}  // namespace

PolishResult newton_polish(const StatePair& start, const LogKernelTable& table, double tol, int max_steps) {
  const ModelParams prm = start.params();
  const double total = prm.total_mass();
  const System sys(table, prm);
  const auto [l1, l2] = multipliers(start, table);
  KVec x(start.u(), start.v(), l1, l2);
  KVec F = sys.residual(x);
  double merit = norm(F);
  PolishResult out{start, 0, 0, 0.0, false, {}};
  out.residual = field_residual(F, total);
  std::ostringstream msg;

  for (int step = 0; step < max_steps; ++step) {
    if (out.residual <= tol) {
      out.converged = true;
      break;
    }
    const double shift = std::max({1.0, std::abs(x.a), std::abs(x.b)});
    KVec rhs = F;
    rhs.scale(-1.0);
    KVec dx(x.u.grid());
    out.krylov_iterations += gmres(sys, x, rhs, shift, 1e-4, 60, 600, dx);

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 20; ++ls, alpha *= 0.5) {
      KVec trial = x;
      trial.axpy(alpha, dx);
      KVec Ft = sys.residual(trial);
      const double mt = norm(Ft);
      if (std::isfinite(mt) && mt < (1.0 - 1e-4 * alpha) * merit) {
        x = std::move(trial);
        F = std::move(Ft);
        merit = mt;
        accepted = true;
        break;
      }
    }
    ++out.newton_steps;
    out.residual = field_residual(F, total);
    if (!accepted) {
      msg << "Newton line search failed at step " << step;
      break;
    }
  }
  if (!out.converged && out.residual <= tol) out.converged = true;
  out.state = StatePair(std::move(x.u), std::move(x.v), prm);
  if (!out.converged && msg.str().empty()) msg << "Newton step limit reached";
  out.message = out.converged ? "converged" : msg.str();
  return out;
}

}  // namespace logsp::detail
