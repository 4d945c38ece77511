#ifndef AWI_WAVELET_HPP
#define AWI_WAVELET_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "awi/spectral.hpp"
#include "awi/trace.hpp"

namespace awi {

enum class WaveletKind { gaussian_derivative, ricker };

inline const char* to_string(WaveletKind k) {
  return k == WaveletKind::gaussian_derivative ? "gaussian_derivative" : "ricker";
}

inline WaveletKind wavelet_kind_from_string(const std::string& s) {
  if (s == "gaussian_derivative") return WaveletKind::gaussian_derivative;
  if (s == "ricker") return WaveletKind::ricker;
  throw std::invalid_argument("unknown wavelet kind: " + s);
}

// Zero-mean band-limited pulse on a symmetric support about t = 0.
struct Wavelet {
  Trace trace;
  double lambda_scale = 1.0;
  WaveletKind kind = WaveletKind::ricker;
  double half_support = 0.0;  // of the mother wavelet, in seconds
};

namespace detail {

inline double wavelet_shape(WaveletKind kind, double t) {
  const double g = std::exp(-0.5 * t * t);
  switch (kind) {
    case WaveletKind::gaussian_derivative:
      return -t * g;  // d/dt of the unit-width Gaussian
    case WaveletKind::ricker:
      return (1.0 - t * t) * g;  // negated second derivative
  }
  return 0.0;
}

// Sample lambda^{-1/2} shape(t/lambda) on the dt grid over symmetric support
// [-lambda h, lambda h], then project out the residual mean with a smooth
// cos^2 taper so the zero-mean invariant holds at any support length.
inline Trace sample_scaled_shape(WaveletKind kind, double dt, double half_support,
                                 double lambda) {
  const double h = lambda * half_support;
  const std::size_t half_n = static_cast<std::size_t>(std::llround(h / dt));
  const std::size_t n = 2 * half_n + 1;
  Trace w;
  w.dt = dt;
  w.t0 = -static_cast<double>(half_n) * dt;
  w.samples.resize(n);
  const double amp = 1.0 / std::sqrt(lambda);
  for (std::size_t i = 0; i < n; ++i)
    w.samples[i] = amp * wavelet_shape(kind, w.time(i) / lambda);

  double mean = integral(w);
  if (mean != 0.0) {
    const double hw = static_cast<double>(half_n) * dt;
    double taper_int = 0.0;
    std::vector<double> taper(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double c = std::cos(0.5 * kPi * w.time(i) / hw);
      taper[i] = c * c;
      taper_int += taper[i];
    }
    taper_int *= dt;
    const double scale = mean / taper_int;
    for (std::size_t i = 0; i < n; ++i) w.samples[i] -= scale * taper[i];
  }
  return w;
}

}  // namespace detail

// Mother wavelet: lambda = 1, unit L2 norm, zero mean, symmetric support.
inline Wavelet make_mother_wavelet(WaveletKind kind, double dt, double half_support) {
  if (dt <= 0.0) throw std::invalid_argument("make_mother_wavelet: dt must be > 0");
  if (half_support <= 0.0)
    throw std::invalid_argument("make_mother_wavelet: half_support must be > 0");
  Wavelet w;
  w.kind = kind;
  w.lambda_scale = 1.0;
  w.half_support = half_support;
  w.trace = detail::sample_scaled_shape(kind, dt, half_support, 1.0);
  const double s = 1.0 / norm2(w.trace);
  for (double& v : w.trace.samples) v *= s;
  return w;
}

// w_lambda(t) = lambda^{-1/2} w_1(t / lambda) on the same dt grid, normalized
// to unit L2 norm exactly (the continuum scaling preserves the norm; exact
// renormalization keeps the family norm lambda-independent on the grid too).
inline Wavelet scale_wavelet(const Wavelet& w1, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("scale_wavelet: lambda must be in (0, 1]");
  if (w1.lambda_scale != 1.0)
    throw std::invalid_argument("scale_wavelet: input must be a mother wavelet");
  Wavelet w;
  w.kind = w1.kind;
  w.lambda_scale = lambda;
  w.half_support = w1.half_support;
  const double dt = w1.trace.dt;
  w.trace = detail::sample_scaled_shape(w.kind, dt, w.half_support, lambda);
  const double s = 1.0 / norm2(w.trace);
  for (double& v : w.trace.samples) v *= s;
  return w;
}

// Cumulative integral of the wavelet scaled by 1/rho: the source waveform
// whose time derivative (times rho) is the wavelet.
inline Trace integrate_wavelet(const Wavelet& w, double rho = 1.0) {
  Trace f;
  f.dt = w.trace.dt;
  f.t0 = w.trace.t0;
  f.samples.resize(w.trace.size());
  double acc = 0.0;
  double prev = 0.0;
  for (std::size_t i = 0; i < f.samples.size(); ++i) {
    const double cur = w.trace.samples[i];
    if (i > 0) acc += 0.5 * (prev + cur) * f.dt;
    prev = cur;
    f.samples[i] = acc / rho;
  }
  return f;
}

// RMS temporal spread about t = 0: ||Tx|| / ||x||.
inline double pulse_width(const Trace& x) {
  const double nx = norm2(x);
  if (nx == 0.0) throw zero_trace_error("pulse_width: zero trace");
  return norm2(apply_T(x)) / nx;
}

// RMS angular frequency: sqrt( (1/2pi) int dw (w |x_hat|)^2 / int dt x^2 ).
// The 1/(2 pi) makes numerator and denominator Parseval-consistent.
inline double rms_frequency(const Trace& x) {
  const double e = norm2_sq(x);
  if (e == 0.0) throw zero_trace_error("rms_frequency: zero trace");
  const std::size_t nfft = next_pow2(2 * x.size());
  const Spectrum s = analyze(x, nfft);
  double num = 0.0;
  for (std::size_t k = 0; k < nfft; ++k) {
    const double w = s.omega(k);
    num += w * w * std::norm(s.coeff[k]);
  }
  num *= s.domega / (2.0 * kPi);
  return std::sqrt(num / e);
}

}  // namespace awi

#endif  // AWI_WAVELET_HPP
