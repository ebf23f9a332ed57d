#include "fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>

namespace logsp::detail {

namespace {

// The FFTW planner is not re-entrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

void init_threads_once() {
#ifdef LOGSP_HAVE_FFTW_THREADS
  static std::once_flag flag;
  std::call_once(flag, [] { fftw_init_threads(); });
#endif
}

}  // namespace

int kernel_threads() {
  int threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("LOGSP_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) threads = std::min(threads, cap);
    } catch (const std::exception&) {
      // Malformed values leave the default in place.
    }
  }
  return threads;
}

RealFft2D::RealFft2D(std::size_t m) : m_(m) {
  std::lock_guard lock(planner_mutex());
  init_threads_once();
#ifdef LOGSP_HAVE_FFTW_THREADS
  // Small transforms are faster single-threaded.
  fftw_plan_with_nthreads(m >= 256 ? kernel_threads() : 1);
#endif
  std::vector<double> real(m * m);
  std::vector<Complex> spec(m * (m / 2 + 1));
  auto* cplx = reinterpret_cast<fftw_complex*>(spec.data());
  const int mi = static_cast<int>(m);
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c_2d(mi, mi, real.data(), cplx, flags);
  inverse_plan_ = fftw_plan_dft_c2r_2d(mi, mi, cplx, real.data(), flags);
  if (forward_plan_ == nullptr || inverse_plan_ == nullptr) {
    throw std::runtime_error("FFTW failed to create a plan of size " + std::to_string(m));
  }
}

RealFft2D::~RealFft2D() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

void RealFft2D::forward(std::span<const double> in, std::span<Complex> out) const {
  // FFTW does not modify the input of an out-of-place r2c transform.
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), const_cast<double*>(in.data()),
                       reinterpret_cast<fftw_complex*>(out.data()));
}

void RealFft2D::inverse(std::span<Complex> in, std::span<double> out) const {
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_), reinterpret_cast<fftw_complex*>(in.data()),
                       out.data());
}

Spectral::Spectral(std::size_t n, double half_width)
    : n_(n), k_(n), k_sq_(n), plain_(n), padded_(2 * n) {
  const double base = 2.0 * std::numbers::pi / (2.0 * half_width);
  for (std::size_t i = 0; i < n; ++i) {
    const double signed_index =
        i <= n / 2 ? static_cast<double>(i) : static_cast<double>(i) - static_cast<double>(n);
    k_[i] = base * signed_index;
    k_sq_[i] = k_[i] * k_[i];
  }
}

}  // namespace logsp::detail
