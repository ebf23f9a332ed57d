#include "logsp/log_kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <vector>

#include "fft.hpp"

namespace logsp {

using detail::Complex;

namespace {

// Integral of log|x| over [0,X] x [0,Y], X, Y >= 0.
double quadrant_log(double X, double Y) {
  if (X == 0.0 || Y == 0.0) return 0.0;
  return 0.5 * (X * Y * (std::log(X * X + Y * Y) - 3.0) + X * X * std::atan(Y / X) +
                Y * Y * std::atan(X / Y));
}

// Integral of 1/|x| over [0,X] x [0,Y], X, Y >= 0.
double quadrant_inverse_r(double X, double Y) {
  if (X == 0.0 || Y == 0.0) return 0.0;
  return X * std::asinh(Y / X) + Y * std::asinh(X / Y);
}

// Mean of an even-even kernel over a cell from its quadrant antiderivative.
template <class Quadrant>
double cell_mean_even(Quadrant&& F, double zx, double zy, double h) {
  auto S = [&](double a, double b) {
    const double s = (a < 0.0 ? -1.0 : 1.0) * (b < 0.0 ? -1.0 : 1.0);
    return s * F(std::abs(a), std::abs(b));
  };
  const double a0 = zx - 0.5 * h, a1 = zx + 0.5 * h;
  const double b0 = zy - 0.5 * h, b1 = zy + 0.5 * h;
  return (S(a1, b1) - S(a0, b1) - S(a1, b0) + S(a0, b0)) / (h * h);
}

// 16-point Gauss-Legendre nodes and weights on [-1, 1], positive half.
constexpr std::array<double, 8> kGL16x = {
    0.0950125098376374402, 0.2816035507792589133, 0.4580167776572273863, 0.6178762444026437484,
    0.7554044083550030339, 0.8656312023878317439, 0.9445750230732325761, 0.9894009349916499326};
constexpr std::array<double, 8> kGL16w = {
    0.1894506104550684963, 0.1826034150449235889, 0.1691565193950025382, 0.1495959888165767321,
    0.1246289712555338721, 0.0951585116824927848, 0.0622535239386478929, 0.0271524594117540949};

template <class Fn>
double gauss16(Fn&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t k = 0; k < kGL16x.size(); ++k) {
    sum += kGL16w[k] * (f(mid - half * kGL16x[k]) + f(mid + half * kGL16x[k]));
  }
  return half * sum;
}

// Integral of r log(1+r) dr from 0 to R.
double radial_log1p(double R) {
  if (R < 1e-3) {
    // Series avoids cancellation between the closed-form terms.
    return R * R * R * (1.0 / 3.0 - R * (1.0 / 8.0 - R * (1.0 / 15.0 - R / 24.0)));
  }
  return 0.5 * (R * R - 1.0) * std::log1p(R) - 0.25 * R * R + 0.5 * R;
}

}  // namespace

double cell_mean_log(double zx, double zy, double h) { return cell_mean_even(quadrant_log, zx, zy, h); }

double cell_mean_inverse_r(double zx, double zy, double h) {
  return cell_mean_even(quadrant_inverse_r, zx, zy, h);
}

double cell_mean_log1p(double zx, double zy, double h) {
  const double half = 0.5 * h;
  if (std::abs(zx) < half && std::abs(zy) < half) {
    if (zx != 0.0 || zy != 0.0) {
      throw std::invalid_argument("cell_mean_log1p: cell must be lattice-aligned with the origin");
    }
    // Eight congruent triangles from the origin to the cell edges.
    const double theta_integral =
        gauss16([&](double th) { return radial_log1p(half / std::cos(th)); }, 0.0, std::numbers::pi / 4.0);
    return 8.0 * theta_integral / (h * h);
  }
  // Cells touching the singular point at the origin are subdivided.
  const double dist = std::max(std::abs(zx), std::abs(zy)) / h;
  const int sub = dist < 2.5 ? 4 : 1;
  const double step = h / sub;
  double sum = 0.0;
  for (int a = 0; a < sub; ++a) {
    const double x0 = zx - half + a * step;
    for (int b = 0; b < sub; ++b) {
      const double y0 = zy - half + b * step;
      sum += gauss16(
          [&](double x) {
            return gauss16([&](double y) { return std::log1p(std::hypot(x, y)); }, y0, y0 + step);
          },
          x0, x0 + step);
    }
  }
  return sum / (h * h);
}

struct LogKernelTable::Impl {
  std::size_t n = 0;
  double h = 0.0;
  // Quadrant weights indexed [|di| * (n + 1) + |dj|].
  std::vector<double> log_w;
  std::vector<double> log1p_w;
  std::vector<double> inv_w;
  std::vector<Complex> log_spec;
  std::vector<Complex> log1p_spec;
  std::vector<Complex> loginv_spec;
  std::vector<Complex> inv_spec;
  std::once_flag split_once;
  std::once_flag inv_once;

  template <class Fn>
  std::vector<double> quadrant(Fn&& mean) const {
    std::vector<double> w((n + 1) * (n + 1));
    for (std::size_t a = 0; a <= n; ++a) {
      for (std::size_t b = a; b <= n; ++b) {
        const double value = mean(static_cast<double>(a) * h, static_cast<double>(b) * h);
        w[a * (n + 1) + b] = value;
        w[b * (n + 1) + a] = value;
      }
    }
    return w;
  }

  std::vector<Complex> spectrum(const detail::Spectral& sp, const std::vector<double>& w) const {
    const std::size_t m = 2 * n;
    std::vector<double> padded(m * m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
      if (a == n) continue;
      const std::size_t ia = a < n ? a : m - a;
      for (std::size_t b = 0; b < m; ++b) {
        if (b == n) continue;
        const std::size_t ib = b < n ? b : m - b;
        padded[a * m + b] = w[ia * (n + 1) + ib];
      }
    }
    std::vector<Complex> spec(sp.padded().complex_size());
    sp.padded().forward(padded, spec);
    return spec;
  }
};

LogKernelTable::LogKernelTable(Grid2D grid) : grid_(std::move(grid)), impl_(std::make_shared<Impl>()) {
  impl_->n = grid_.n();
  impl_->h = grid_.spacing();
  const double h = impl_->h;
  impl_->log_w = impl_->quadrant([h](double x, double y) { return cell_mean_log(x, y, h); });
  impl_->log_w[0] += kLogOriginCorrection;
  impl_->log_spec = impl_->spectrum(grid_.spectral(), impl_->log_w);
}

namespace {

void ensure_split(LogKernelTable::Impl& impl, const detail::Spectral& sp) {
  std::call_once(impl.split_once, [&] {
    const double h = impl.h;
    impl.log1p_w = impl.quadrant([h](double x, double y) { return cell_mean_log1p(x, y, h); });
    std::vector<double> loginv(impl.log1p_w.size());
    for (std::size_t k = 0; k < loginv.size(); ++k) loginv[k] = impl.log1p_w[k] - impl.log_w[k];
    impl.log1p_spec = impl.spectrum(sp, impl.log1p_w);
    impl.loginv_spec = impl.spectrum(sp, loginv);
  });
}

void ensure_inverse(LogKernelTable::Impl& impl, const detail::Spectral& sp) {
  std::call_once(impl.inv_once, [&] {
    const double h = impl.h;
    impl.inv_w = impl.quadrant([h](double x, double y) { return cell_mean_inverse_r(x, y, h); });
    impl.inv_spec = impl.spectrum(sp, impl.inv_w);
  });
}

}  // namespace

double LogKernelTable::weight(KernelKind kind, long di, long dj) const {
  const std::size_t n = impl_->n;
  const std::size_t a = static_cast<std::size_t>(std::labs(di));
  const std::size_t b = static_cast<std::size_t>(std::labs(dj));
  if (a >= n || b >= n) throw std::out_of_range("LogKernelTable::weight: offset outside the padded lattice");
  const std::size_t k = a * (n + 1) + b;
  switch (kind) {
    case KernelKind::Log:
      return impl_->log_w[k];
    case KernelKind::LogOnePlusR:
      ensure_split(*impl_, grid_.spectral());
      return impl_->log1p_w[k];
    case KernelKind::LogOnePlusInvR:
      ensure_split(*impl_, grid_.spectral());
      return impl_->log1p_w[k] - impl_->log_w[k];
    case KernelKind::InverseR:
      ensure_inverse(*impl_, grid_.spectral());
      return impl_->inv_w[k];
  }
  throw std::invalid_argument("unknown kernel kind");
}

Field LogKernelTable::convolve(const Field& rho, KernelKind kind) const {
  require_same_grid(rho.grid(), grid_, "log kernel convolution");
  const auto& sp = grid_.spectral();
  const std::vector<Complex>* spec = nullptr;
  switch (kind) {
    case KernelKind::Log:
      spec = &impl_->log_spec;
      break;
    case KernelKind::LogOnePlusR:
      ensure_split(*impl_, sp);
      spec = &impl_->log1p_spec;
      break;
    case KernelKind::LogOnePlusInvR:
      ensure_split(*impl_, sp);
      spec = &impl_->loginv_spec;
      break;
    case KernelKind::InverseR:
      ensure_inverse(*impl_, sp);
      spec = &impl_->inv_spec;
      break;
  }
  const std::size_t n = impl_->n;
  const std::size_t m = 2 * n;
  std::vector<double> padded(m * m, 0.0);
  const auto src = rho.values();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(i * n), n, padded.begin() + static_cast<std::ptrdiff_t>(i * m));
  }
  std::vector<Complex> buf(sp.padded().complex_size());
  sp.padded().forward(padded, buf);
  for (std::size_t k = 0; k < buf.size(); ++k) buf[k] *= (*spec)[k];
  sp.padded().inverse(buf, padded);
  const double scale = impl_->h * impl_->h / static_cast<double>(m * m);
  Field out(grid_);
  auto dst = out.values();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dst[i * n + j] = scale * padded[i * m + j];
  }
  return out;
}

Field log_convolution(const Field& rho, const LogKernelTable& table) {
  return table.convolve(rho, KernelKind::Log);
}

}  // namespace logsp
