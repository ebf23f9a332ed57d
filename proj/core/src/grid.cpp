#include "logsp/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iostream>
#include <mutex>
#include <sstream>

#include "fft.hpp"

namespace logsp {

using detail::Complex;

Grid2D::Grid2D(std::size_t n, double half_width, std::shared_ptr<const detail::Spectral> spectral)
    : n_(n), half_width_(half_width), spacing_(2.0 * half_width / static_cast<double>(n)),
      spectral_(std::move(spectral)) {}

Grid2D make_grid(std::size_t n, double half_width) {
  if (n < 2 || !std::has_single_bit(n)) {
    throw std::invalid_argument("grid size n must be a power of two >= 2, got " + std::to_string(n));
  }
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw std::invalid_argument("grid half-width L must be positive and finite");
  }
  return Grid2D(n, half_width, std::make_shared<const detail::Spectral>(n, half_width));
}

void require_same_grid(const Grid2D& a, const Grid2D& b, std::string_view context) {
  if (!(a == b)) {
    std::ostringstream os;
    os << context << ": grid mismatch (n=" << a.n() << ", L=" << a.half_width() << " vs n=" << b.n()
       << ", L=" << b.half_width() << ")";
    throw GridMismatch(os.str());
  }
}

Field::Field(Grid2D grid) : grid_(std::move(grid)), values_(grid_.size(), 0.0) {}

Field::Field(Grid2D grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw std::invalid_argument("field sample count does not match grid");
  }
  if (!all_finite()) {
    throw std::invalid_argument("field samples must be finite");
  }
}

Field Field::sample(const Grid2D& grid, const std::function<double(double, double)>& f) {
  Field out(grid);
  const std::size_t n = grid.n();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.node(i);
    for (std::size_t j = 0; j < n; ++j) out(i, j) = f(x, grid.node(j));
  }
  if (!out.all_finite()) throw std::invalid_argument("sampled function produced non-finite values");
  return out;
}

bool Field::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

double Field::max_abs() const noexcept {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double Field::boundary_max_abs() const noexcept {
  const std::size_t n = grid_.n();
  double m = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    m = std::max({m, std::abs((*this)(0, k)), std::abs((*this)(n - 1, k)), std::abs((*this)(k, 0)),
                  std::abs((*this)(k, n - 1))});
  }
  return m;
}

Field& Field::operator+=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field::operator+=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Field& Field::operator-=(const Field& other) {
  require_same_grid(grid_, other.grid_, "Field::operator-=");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

Field& Field::axpy(double a, const Field& other) {
  require_same_grid(grid_, other.grid_, "Field::axpy");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += a * other.values_[k];
  return *this;
}

Field hadamard(const Field& a, const Field& b) {
  require_same_grid(a.grid_, b.grid_, "hadamard");
  Field out(a.grid_);
  for (std::size_t k = 0; k < a.values_.size(); ++k) out.values_[k] = a.values_[k] * b.values_[k];
  return out;
}

double integrate(const Field& f) {
  double sum = 0.0;
  for (double v : f.values()) sum += v;
  return f.grid().cell_area() * sum;
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f.grid(), g.grid(), "inner");
  const auto a = f.values();
  const auto b = g.values();
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return f.grid().cell_area() * sum;
}

void normalize_mass(Field& f, double mass) {
  const double current = inner(f, f);
  if (!(current > 0.0)) throw std::invalid_argument("cannot normalise a field with zero mass");
  f *= std::sqrt(mass / current);
}

namespace {

// Applies a real, even multiplier m(kx, ky) in Fourier space.
template <class Multiplier>
Field apply_multiplier(const Field& f, Multiplier&& multiplier) {
  const auto& sp = f.grid().spectral();
  const std::size_t n = sp.n();
  const std::size_t nc = n / 2 + 1;
  std::vector<Complex> spec(sp.plain().complex_size());
  sp.plain().forward(f.values(), spec);
  const double norm = 1.0 / static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < nc; ++j) spec[i * nc + j] *= norm * multiplier(i, j);
  }
  Field out(f.grid());
  sp.plain().inverse(spec, out.values());
  return out;
}

}  // namespace

Field spectral_laplacian(const Field& f) {
  const auto& sp = f.grid().spectral();
  return apply_multiplier(f, [&](std::size_t i, std::size_t j) {
    return -(sp.wavenumber_sq(i) + sp.wavenumber_sq(j));
  });
}

Field apply_resolvent(const Field& f, double shift) {
  if (!(shift > 0.0)) throw std::invalid_argument("resolvent shift must be positive");
  const auto& sp = f.grid().spectral();
  return apply_multiplier(f, [&](std::size_t i, std::size_t j) {
    return 1.0 / (sp.wavenumber_sq(i) + sp.wavenumber_sq(j) + shift);
  });
}

Field spectral_translate(const Field& f, double ax, double ay) {
  const auto& sp = f.grid().spectral();
  const std::size_t n = sp.n();
  const std::size_t nc = n / 2 + 1;
  std::vector<Complex> spec(sp.plain().complex_size());
  sp.plain().forward(f.values(), spec);
  const double norm = 1.0 / static_cast<double>(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    const double kx = sp.wavenumber(i);
    for (std::size_t j = 0; j < nc; ++j) {
      const double phase = -(kx * ax + sp.wavenumber(j) * ay);
      // Nyquist rows carry no phase information in a real field; keep their real part.
      const Complex m = sp.is_nyquist(i) || sp.is_nyquist(j) ? Complex(std::cos(phase), 0.0)
                                                             : Complex(std::cos(phase), std::sin(phase));
      spec[i * nc + j] *= norm * m;
    }
  }
  Field out(f.grid());
  sp.plain().inverse(spec, out.values());
  return out;
}

std::pair<Field, Field> spectral_gradient(const Field& f) {
  const auto& sp = f.grid().spectral();
  const std::size_t n = sp.n();
  const std::size_t nc = n / 2 + 1;
  std::vector<Complex> spec(sp.plain().complex_size());
  sp.plain().forward(f.values(), spec);
  const double norm = 1.0 / static_cast<double>(n * n);
  std::vector<Complex> dx(spec.size());
  std::vector<Complex> dy(spec.size());
  const Complex I(0.0, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double kx = sp.is_nyquist(i) ? 0.0 : sp.wavenumber(i);
    for (std::size_t j = 0; j < nc; ++j) {
      const double ky = sp.is_nyquist(j) ? 0.0 : sp.wavenumber(j);
      const Complex s = spec[i * nc + j] * norm;
      dx[i * nc + j] = I * kx * s;
      dy[i * nc + j] = I * ky * s;
    }
  }
  Field gx(f.grid());
  Field gy(f.grid());
  sp.plain().inverse(dx, gx.values());
  sp.plain().inverse(dy, gy.values());
  return {std::move(gx), std::move(gy)};
}

double gradient_energy(const Field& f) {
  const auto& sp = f.grid().spectral();
  const std::size_t n = sp.n();
  const std::size_t nc = n / 2 + 1;
  std::vector<Complex> spec(sp.plain().complex_size());
  sp.plain().forward(f.values(), spec);
  // Parseval over the half spectrum: interior columns stand for two modes.
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < nc; ++j) {
      const double weight = (j == 0 || j == n / 2) ? 1.0 : 2.0;
      sum += weight * (sp.wavenumber_sq(i) + sp.wavenumber_sq(j)) * std::norm(spec[i * nc + j]);
    }
  }
  return f.grid().cell_area() * sum / static_cast<double>(n * n);
}

namespace {

std::mutex& sink_mutex() {
  static std::mutex m;
  return m;
}

WarningSink& sink_storage() {
  static WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return sink;
}

}  // namespace

void set_warning_sink(WarningSink sink) {
  std::lock_guard lock(sink_mutex());
  sink_storage() = sink ? std::move(sink) : [](std::string_view) {};
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  sink_storage()(message);
}

bool check_boundary_decay(const Field& f, std::string_view label, double tol) {
  const double edge = f.boundary_max_abs();
  if (edge <= tol) return true;
  std::ostringstream os;
  os << label << ": boundary value " << edge << " exceeds decay tolerance " << tol
     << "; enlarge the domain half-width";
  warn(os.str());
  return false;
}

}  // namespace logsp
