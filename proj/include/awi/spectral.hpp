#ifndef AWI_SPECTRAL_HPP
#define AWI_SPECTRAL_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "awi/fft.hpp"
#include "awi/trace.hpp"

namespace awi {

constexpr double kPi = 3.14159265358979323846;

// Discrete stand-in for the continuum Fourier transform with forward sign
// convention x_hat(w) = int x(t) exp(-i w t) dt. Coefficients carry the dt
// weight of the forward transform; the inverse carries dw/(2 pi) = 1/(N dt).
struct Spectrum {
  std::vector<std::complex<double>> coeff;
  double domega = 0.0;  // rad/s per bin
  double dt = 0.0;      // sampling interval of the originating trace

  std::size_t size() const { return coeff.size(); }

  // Signed angular frequency of bin k (negative frequencies in the upper half).
  double omega(std::size_t k) const {
    const std::size_t n = coeff.size();
    return (k <= n / 2 ? static_cast<double>(k)
                       : static_cast<double>(k) - static_cast<double>(n)) *
           domega;
  }
};

// Forward transform of a trace, zero-padded to nfft (a power of two >= size).
// The trace's absolute start time enters as a phase so that the spectrum is
// that of the signal with its true time origin.
inline Spectrum analyze(const Trace& x, std::size_t nfft) {
  if (nfft < x.size()) throw std::invalid_argument("analyze: nfft too small");
  if ((nfft & (nfft - 1)) != 0)
    throw std::invalid_argument("analyze: nfft must be a power of two");
  Spectrum s;
  s.dt = x.dt;
  s.domega = 2.0 * kPi / (static_cast<double>(nfft) * x.dt);
  s.coeff.assign(nfft, {0.0, 0.0});
  for (std::size_t i = 0; i < x.size(); ++i) s.coeff[i] = x.samples[i];
  fft_inplace(s.coeff, false);
  for (auto& c : s.coeff) c *= x.dt;
  if (x.t0 != 0.0) {
    for (std::size_t k = 0; k < s.size(); ++k)
      s.coeff[k] *= std::polar(1.0, -s.omega(k) * x.t0);
  }
  return s;
}

// Inverse transform onto a trace of n_out samples starting at t0_out. Content
// outside [t0_out, t0_out + N dt) aliases circularly; callers keep signals
// well inside the transform window.
inline Trace synthesize(const Spectrum& s, std::size_t n_out, double t0_out) {
  if (n_out > s.size()) throw std::invalid_argument("synthesize: n_out > nfft");
  std::vector<std::complex<double>> c(s.coeff);
  if (t0_out != 0.0) {
    for (std::size_t k = 0; k < c.size(); ++k)
      c[k] *= std::polar(1.0, s.omega(k) * t0_out);
  }
  fft_inplace(c, true);
  Trace out;
  out.dt = s.dt;
  out.t0 = t0_out;
  out.samples.resize(n_out);
  const double inv_dt = 1.0 / s.dt;
  for (std::size_t i = 0; i < n_out; ++i) out.samples[i] = c[i].real() * inv_dt;
  return out;
}

// Relative deviation from Hermitian symmetry; ~0 for spectra of real traces.
inline double hermitian_defect(const Spectrum& s) {
  const std::size_t n = s.size();
  double num = 0.0, den = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    num += std::norm(s.coeff[k] - std::conj(s.coeff[n - k]));
    den += std::norm(s.coeff[k]);
  }
  return den > 0.0 ? std::sqrt(num / den) : 0.0;
}

// Linear (non-circular) convolution approximating int a(s) b(t-s) ds.
// Output start time is a.t0 + b.t0.
inline Trace convolve(const Trace& a, const Trace& b) {
  if (a.dt != b.dt) throw std::invalid_argument("convolve: dt mismatch");
  if (a.samples.empty() || b.samples.empty())
    throw std::invalid_argument("convolve: empty trace");
  const std::size_t n_out = a.size() + b.size() - 1;
  const std::size_t nfft = next_pow2(n_out);
  Spectrum sa = analyze(a, nfft);
  const Spectrum sb = analyze(b, nfft);
  for (std::size_t k = 0; k < nfft; ++k) sa.coeff[k] *= sb.coeff[k];
  return synthesize(sa, n_out, a.t0 + b.t0);
}

// p-fold Hilbert transform via the spectral multiplier (-i sgn w)^p.
// p = 0 is the identity. Computed circularly: the output keeps the full
// transform grid (starting at x.t0) so the slow power-law tails of odd
// powers are not truncated; re-applying on the returned grid is exact.
inline Trace hilbert_power(const Trace& x, unsigned p) {
  if (p == 0) return x;
  const std::size_t n = x.size();
  const std::size_t nfft = (n & (n - 1)) == 0 ? n : next_pow2(2 * n);
  Spectrum s = analyze(x, nfft);
  const std::complex<double> mi(0.0, -1.0);
  for (std::size_t k = 0; k < nfft; ++k) {
    const double w = s.omega(k);
    std::complex<double> m(0.0, 0.0);
    if (w > 0.0 && k != nfft / 2)
      m = std::pow(mi, static_cast<double>(p));
    else if (w < 0.0)
      m = std::pow(-mi, static_cast<double>(p));
    s.coeff[k] *= m;
  }
  return synthesize(s, nfft, x.t0);
}

// Multiply samples by their own time coordinate (the operator T).
inline Trace apply_T(const Trace& x) {
  Trace out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] *= out.time(i);
  return out;
}

// Bounded variant: multiply by t / sqrt(1 + eps^2 t^2); eps = 0 recovers T.
inline Trace apply_T_eps(const Trace& x, double eps) {
  if (eps < 0.0) throw std::invalid_argument("apply_T_eps: eps must be >= 0");
  Trace out = x;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double t = out.time(i);
    out.samples[i] *= t / std::sqrt(1.0 + eps * eps * t * t);
  }
  return out;
}

// Band-limited (phase-ramp) delay of x by tau, evaluated on the target axis.
// Sub-sample delays are exact up to spectral interpolation of the smooth
// signal; the shift is unitary on the transform circle.
inline Trace delayed_onto(const Trace& x, double tau, const TimeAxis& axis) {
  if (x.dt != axis.dt) throw std::invalid_argument("delayed_onto: dt mismatch");
  const double lead = x.t0 + tau;
  const double trail = x.t_end() + tau;
  if (lead < axis.t0 - 0.5 * axis.dt || trail > axis.t_end() + 0.5 * axis.dt)
    throw window_error("delayed event support [" + std::to_string(lead) + ", " +
                       std::to_string(trail) + "] clipped by window [" +
                       std::to_string(axis.t0) + ", " +
                       std::to_string(axis.t_end()) + "]");
  const std::size_t nfft = next_pow2(axis.n + x.size());
  Spectrum s = analyze(x, nfft);
  for (std::size_t k = 0; k < nfft; ++k)
    s.coeff[k] *= std::polar(1.0, -s.omega(k) * tau);
  return synthesize(s, axis.n, axis.t0);
}

}  // namespace awi

#endif  // AWI_SPECTRAL_HPP
