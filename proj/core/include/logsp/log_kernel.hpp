#pragma once

#include <memory>

#include "logsp/grid.hpp"

namespace logsp {

/// Radial kernels used by the nonlocal energies.
enum class KernelKind {
  Log,             ///< log r
  LogOnePlusR,     ///< log(1 + r), the W1 part of the split
  LogOnePlusInvR,  ///< log(1 + 1/r), the W2 part of the split
  InverseR,        ///< 1/r, the Riesz comparison kernel
};

/// Mean of log|x| over the h x h cell centred at (zx, zy). Closed form.
double cell_mean_log(double zx, double zy, double h);
/// Mean of 1/|x| over the h x h cell centred at (zx, zy). Closed form.
double cell_mean_inverse_r(double zx, double zy, double h);
/// Mean of log(1+|x|) over the cell. Gauss-Legendre off the origin, polar
/// quadrature with an exact radial integral on the origin cell.
double cell_mean_log1p(double zx, double zy, double h);

/// Weight added to the log kernel at offset zero, in units of the cell area.
///
/// The midpoint rule applied to a cell-averaged log kernel has a leading error
/// (pi h^2 / 12) * integral(rho^2), which comes from the delta function in the
/// Laplacian of log r. Subtracting pi/12 from the origin weight cancels it and
/// makes the discrete W0 fourth-order accurate for smooth densities. The same
/// constant is added to the log(1+1/r) origin weight so that the split stays
/// exact weight by weight.
inline constexpr double kLogOriginCorrection = -0.26179938779914941;  // -pi/12

/// Precomputed spectra of the cell-averaged kernels on the zero-padded
/// 2n x 2n lattice of a grid. The log spectrum is built on construction; the
/// split and 1/r kernels are built on first use. Copies share storage and the
/// object is safe to use from several threads.
class LogKernelTable {
 public:
  explicit LogKernelTable(Grid2D grid);

  const Grid2D& grid() const noexcept { return grid_; }

  /// Convolution weight at lattice offset (di, dj), |di|, |dj| < n. Off the
  /// origin this is the cell mean of the kernel; at the origin it includes the
  /// correction described at kLogOriginCorrection.
  double weight(KernelKind kind, long di, long dj) const;

  /// Aperiodic discrete convolution h^2 * sum_j K(x_i - x_j) rho_j.
  Field convolve(const Field& rho, KernelKind kind) const;

  struct Impl;

 private:
  Grid2D grid_;
  std::shared_ptr<Impl> impl_;
};

/// w = log-kernel convolution of rho. Throws GridMismatch if the grids differ.
Field log_convolution(const Field& rho, const LogKernelTable& table);

}  // namespace logsp
