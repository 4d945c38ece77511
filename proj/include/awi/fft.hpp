#ifndef AWI_FFT_HPP
#define AWI_FFT_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace awi {

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// In-place iterative radix-2 FFT. The inverse transform includes the 1/N
// factor, so fft(ifft(x)) == x.
inline void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0) return;
  if ((n & (n - 1)) != 0)
    throw std::invalid_argument("fft_inplace: length must be a power of two");

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  // twiddle table for the full size; stage tables are strided views of it
  static thread_local std::vector<std::complex<double>> twiddle;
  static thread_local std::size_t twiddle_n = 0;
  static thread_local bool twiddle_inv = false;
  if (twiddle_n != n || twiddle_inv != inverse) {
    twiddle.resize(n / 2);
    const double sign = inverse ? 1.0 : -1.0;
    const double base = sign * 2.0 * 3.14159265358979323846 / static_cast<double>(n);
    for (std::size_t k = 0; k < n / 2; ++k)
      twiddle[k] = std::polar(1.0, base * static_cast<double>(k));
    twiddle_n = n;
    twiddle_inv = inverse;
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const std::size_t stride = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> w = twiddle[k * stride];
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }

  if (inverse) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

}  // namespace awi

#endif  // AWI_FFT_HPP
