#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace logsp::detail {

using Complex = std::complex<double>;

/// Number of threads FFTW may use; capped by the LOGSP_THREADS environment variable.
int kernel_threads();

/// Owns one forward/inverse pair of 2-D real FFTW plans of size m x m. Plans are
/// created with FFTW_ESTIMATE so results are reproducible run to run, and with
/// FFTW_UNALIGNED so they can be executed on any std::vector storage.
class RealFft2D {
 public:
  explicit RealFft2D(std::size_t m);
  ~RealFft2D();
  RealFft2D(const RealFft2D&) = delete;
  RealFft2D& operator=(const RealFft2D&) = delete;

  std::size_t size() const noexcept { return m_; }
  std::size_t complex_size() const noexcept { return m_ * (m_ / 2 + 1); }

  void forward(std::span<const double> in, std::span<Complex> out) const;
  /// Unnormalised inverse; `in` is clobbered.
  void inverse(std::span<Complex> in, std::span<double> out) const;

 private:
  std::size_t m_;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

/// FFT plans and wavenumbers for an n x n grid plus its 2n x 2n zero-padded twin.
class Spectral {
 public:
  Spectral(std::size_t n, double half_width);

  std::size_t n() const noexcept { return n_; }
  const RealFft2D& plain() const noexcept { return plain_; }
  const RealFft2D& padded() const noexcept { return padded_; }

  /// Angular wavenumber for FFT index i along one axis.
  double wavenumber(std::size_t i) const noexcept { return k_[i]; }
  /// Squared wavenumber used by second derivatives; the Nyquist index keeps its
  /// full value there, while first derivatives drop it.
  double wavenumber_sq(std::size_t i) const noexcept { return k_sq_[i]; }
  bool is_nyquist(std::size_t i) const noexcept { return i == n_ / 2; }

 private:
  std::size_t n_;
  std::vector<double> k_;
  std::vector<double> k_sq_;
  RealFft2D plain_;
  RealFft2D padded_;
};

}  // namespace logsp::detail
