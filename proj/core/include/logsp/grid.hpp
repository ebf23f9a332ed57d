#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace logsp {

namespace detail {
class Spectral;
}

/// Thrown when two fields (or a field and a kernel table) live on different grids.
class GridMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Uniform node-centred discretisation of [-L, L]^2 with n nodes per axis.
///
/// Node i sits at x_i = -L + (i + 1/2) h with h = 2L / n. The grid carries the
/// FFT plans used by every spectral operation on fields that live on it; copies
/// share those plans, so Grid2D is cheap to pass by value.
class Grid2D {
 public:
  std::size_t n() const noexcept { return n_; }
  double half_width() const noexcept { return half_width_; }
  double spacing() const noexcept { return spacing_; }
  double cell_area() const noexcept { return spacing_ * spacing_; }
  std::size_t size() const noexcept { return n_ * n_; }
  double node(std::size_t i) const noexcept {
    return -half_width_ + (static_cast<double>(i) + 0.5) * spacing_;
  }

  const detail::Spectral& spectral() const noexcept { return *spectral_; }

  friend bool operator==(const Grid2D& a, const Grid2D& b) noexcept {
    return a.n_ == b.n_ && a.half_width_ == b.half_width_;
  }

 private:
  friend Grid2D make_grid(std::size_t n, double half_width);
  Grid2D(std::size_t n, double half_width, std::shared_ptr<const detail::Spectral> spectral);

  std::size_t n_ = 0;
  double half_width_ = 0.0;
  double spacing_ = 0.0;
  std::shared_ptr<const detail::Spectral> spectral_;
};

/// Builds the grid on [-L, L]^2. n must be a power of two and L positive.
Grid2D make_grid(std::size_t n, double half_width);

void require_same_grid(const Grid2D& a, const Grid2D& b, std::string_view context);

/// Real samples on a Grid2D, row-major: value(i, j) is the sample at (x_i, x_j).
class Field {
 public:
  explicit Field(Grid2D grid);
  Field(Grid2D grid, std::vector<double> values);

  /// Samples f(x, y) at every node.
  static Field sample(const Grid2D& grid, const std::function<double(double, double)>& f);

  const Grid2D& grid() const noexcept { return grid_; }
  std::size_t n() const noexcept { return grid_.n(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * grid_.n() + j]; }
  double& operator()(std::size_t i, std::size_t j) noexcept { return values_[i * grid_.n() + j]; }

  bool all_finite() const noexcept;
  double max_abs() const noexcept;
  /// Largest |value| on the outermost ring of nodes.
  double boundary_max_abs() const noexcept;

  Field& operator+=(const Field& other);
  Field& operator-=(const Field& other);
  Field& operator*=(double s) noexcept;
  /// this += a * other
  Field& axpy(double a, const Field& other);

  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(Field a, double s) { return a *= s; }
  friend Field operator*(double s, Field a) { return a *= s; }

  /// Pointwise product.
  friend Field hadamard(const Field& a, const Field& b);

 private:
  Grid2D grid_;
  std::vector<double> values_;
};

/// Midpoint rule: h^2 * sum of samples.
double integrate(const Field& f);

/// h^2 * sum of f * g.
double inner(const Field& f, const Field& g);

/// Multiplies f in place so that integrate(f^2) == mass. Throws on a zero field.
void normalize_mass(Field& f, double mass);

/// Fourier-differentiated Laplacian of the periodic extension.
Field spectral_laplacian(const Field& f);

/// Spectral partial derivatives (d/dx_1, d/dx_2); the Nyquist mode is dropped.
std::pair<Field, Field> spectral_gradient(const Field& f);

/// f(x - ax, y - ay) by a Fourier phase shift of the periodic extension.
Field spectral_translate(const Field& f, double ax, double ay);

/// Dirichlet energy: integral of |grad f|^2 evaluated in Fourier space. Equals
/// -inner(f, spectral_laplacian(f)) up to rounding.
double gradient_energy(const Field& f);

/// Solves (-Laplacian + shift) g = f spectrally. shift must be positive.
Field apply_resolvent(const Field& f, double shift);

/// Warnings raised by numerical checks (boundary decay, accuracy of rescaling).
/// The default sink writes to stderr.
using WarningSink = std::function<void(std::string_view)>;
void set_warning_sink(WarningSink sink);
void warn(std::string_view message);

/// Default boundary-decay threshold for fields that should vanish at the edge.
inline constexpr double kBoundaryDecayTolerance = 1e-8;

/// Returns true if |f| <= tol on the outer ring; otherwise emits a warning.
bool check_boundary_decay(const Field& f, std::string_view label, double tol = kBoundaryDecayTolerance);

}  // namespace logsp
