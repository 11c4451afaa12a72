#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "cohsim/time_grid.hpp"

namespace cohsim::detail {

/// Per-thread Eigen FFT engine. The kissfft backend caches twiddles and is not
/// safe to share between threads.
inline Eigen::FFT<double>& thread_fft() {
  thread_local Eigen::FFT<double> fft = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::Unscaled);
    return f;
  }();
  return fft;
}

/// out[m] = sum_k in[k] exp(-2 pi i m k / n)
inline void dft_minus(const Complex* in, Complex* out, std::size_t n) {
  thread_fft().fwd(out, in, static_cast<Eigen::Index>(n));
}

/// out[m] = sum_k in[k] exp(+2 pi i m k / n), unscaled.
inline void dft_plus(const Complex* in, Complex* out, std::size_t n) {
  thread_fft().inv(out, in, static_cast<Eigen::Index>(n));
}

/// Signed bin number of DFT index j on an n-point transform, in [-n/2, n - n/2).
inline long signed_bin(std::size_t j, std::size_t n) {
  const long jj = static_cast<long>(j);
  const long nn = static_cast<long>(n);
  return jj < nn - nn / 2 ? jj : jj - nn;
}

}  // namespace cohsim::detail
