#ifndef AWI_FILTER_HPP
#define AWI_FILTER_HPP

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "awi/spectral.hpp"
#include "awi/trace.hpp"
#include "awi/wavelet.hpp"

namespace awi {

// Tikhonov-regularized matching filter on a symmetric lag axis (units 1/time).
struct MatchingFilter {
  Trace trace;         // lag axis symmetric about 0
  double sigma = 0.0;  // pressure^2 * time^2
  // Fraction of filter energy on the full transform grid that falls outside
  // the lag window (reported, not silently dropped).
  double out_of_window_energy = 0.0;
};

struct FilterDiagnostics {
  double norm_u = 0.0;         // 1/time^{1/2}
  double norm_Tu = 0.0;        // time^{1/2}
  double ratio = 0.0;          // seconds, norm_Tu / norm_u
  double residual_norm = 0.0;  // || predicted * u - observed ||
  double data_norm = 0.0;      // || observed ||
  double residual_ratio = 0.0;
  // Fraction of ||Tu||^2 carried by the outermost 10% of lags on each side.
  double edge_mass = 0.0;
};

namespace detail {

inline std::size_t filter_nfft(std::size_t n_pred, std::size_t n_obs) {
  return next_pow2(n_pred + n_obs);
}

inline double spectrum_energy(const Spectrum& s) {
  double e = 0.0;
  for (const auto& c : s.coeff) e += std::norm(c);
  return e * s.domega / (2.0 * kPi);
}

// Crop a full-grid spectrum-domain signal onto the symmetric lag window.
inline Trace crop_to_lags(const Spectrum& s, double lag_half) {
  const std::size_t half_n = static_cast<std::size_t>(std::llround(lag_half / s.dt));
  const std::size_t nlag = 2 * half_n + 1;
  if (nlag > s.size())
    throw std::invalid_argument("lag window exceeds transform length");
  return synthesize(s, nlag, -static_cast<double>(half_n) * s.dt);
}

}  // namespace detail

// Frequency-domain solve of the per-trace normal equation
// (S^T S + sigma I) u = S^T d with S = convolution by the predicted trace:
// u_hat = conj(p_hat) d_hat / (|p_hat|^2 + sigma). Transforms carry dt and
// dw/(2 pi) weights so sigma keeps continuum units of pressure^2 * time^2.
// The filter is computed on the full FFT grid and restricted to the lag
// window [-lag_half, lag_half]; lag_half < 0 selects half the trace duration.
inline MatchingFilter solve_filter(const Trace& predicted, const Trace& observed,
                                   double sigma, double lag_half = -1.0) {
  if (sigma <= 0.0) throw std::invalid_argument("solve_filter: sigma must be > 0");
  if (predicted.dt != observed.dt)
    throw std::invalid_argument("solve_filter: dt mismatch");
  if (norm2_sq(predicted) == 0.0)
    throw std::domain_error("solve_filter: predicted trace is identically zero");

  const std::size_t nfft = detail::filter_nfft(predicted.size(), observed.size());
  Spectrum su = analyze(predicted, nfft);
  const Spectrum sd = analyze(observed, nfft);
  for (std::size_t k = 0; k < nfft; ++k)
    su.coeff[k] =
        std::conj(su.coeff[k]) * sd.coeff[k] / (std::norm(su.coeff[k]) + sigma);

  if (lag_half < 0.0)
    lag_half = 0.5 * static_cast<double>(observed.size()) * observed.dt;
  lag_half = std::min(lag_half,
                      (static_cast<double>(nfft) / 2.0 - 1.0) * observed.dt);

  MatchingFilter mf;
  mf.sigma = sigma;
  mf.trace = detail::crop_to_lags(su, lag_half);
  const double e_tot = detail::spectrum_energy(su);
  const double e_win = norm2_sq(mf.trace);
  mf.out_of_window_energy = e_tot > 0.0 ? std::max(0.0, 1.0 - e_win / e_tot) : 0.0;
  return mf;
}

// Inverse transform of |w_hat|^2 / (|w_hat|^2 + mu): the approximate-Dirac
// kernel of the regularized deconvolution. Real and even.
inline Trace g_kernel(const Wavelet& w, double mu, double lag_half = -1.0,
                      std::size_t min_fft = 0) {
  if (mu <= 0.0) throw std::invalid_argument("g_kernel: mu must be > 0");
  const std::size_t nfft =
      next_pow2(std::max(min_fft, 2 * w.trace.size()));
  Spectrum s = analyze(w.trace, nfft);
  for (std::size_t k = 0; k < nfft; ++k) {
    const double p = std::norm(s.coeff[k]);
    s.coeff[k] = p / (p + mu);
  }
  if (lag_half < 0.0)
    lag_half = (static_cast<double>(nfft) / 2.0 - 1.0) * s.dt;
  else
    lag_half =
        std::min(lag_half, (static_cast<double>(nfft) / 2.0 - 1.0) * s.dt);
  return detail::crop_to_lags(s, lag_half);
}

// Norms, dispersion ratio, and filtered-residual diagnostics of a filter
// against the trace pair it was solved from.
inline FilterDiagnostics filter_diagnostics(const MatchingFilter& u,
                                            const Trace& predicted,
                                            const Trace& observed) {
  if (u.trace.dt != predicted.dt || predicted.dt != observed.dt)
    throw std::invalid_argument("filter_diagnostics: dt mismatch");
  FilterDiagnostics d;
  d.norm_u = norm2(u.trace);
  const Trace tu = apply_T(u.trace);
  d.norm_Tu = norm2(tu);
  d.ratio = d.norm_u > 0.0 ? d.norm_Tu / d.norm_u : 0.0;

  const std::size_t nfft =
      next_pow2(predicted.size() + observed.size() + u.trace.size());
  Spectrum sp = analyze(predicted, nfft);
  const Spectrum sd = analyze(observed, nfft);
  const Spectrum sf = analyze(u.trace, nfft);
  for (std::size_t k = 0; k < nfft; ++k)
    sp.coeff[k] = sp.coeff[k] * sf.coeff[k] - sd.coeff[k];
  d.residual_norm = std::sqrt(detail::spectrum_energy(sp));
  d.data_norm = norm2(observed);
  if (d.data_norm == 0.0)
    throw zero_trace_error("filter_diagnostics: observed trace is zero");
  d.residual_ratio = d.residual_norm / d.data_norm;

  // ||Tu||^2 mass in the outermost 10% of lags
  const std::size_t n = u.trace.size();
  const std::size_t edge = std::max<std::size_t>(1, n / 10);
  double edge_e = 0.0;
  const double tu_sq = norm2_sq(tu);
  for (std::size_t i = 0; i < n; ++i) {
    if (i < edge / 2 || i + edge / 2 >= n)
      edge_e += tu.samples[i] * tu.samples[i] * tu.dt;
  }
  d.edge_mass = tu_sq > 0.0 ? edge_e / tu_sq : 0.0;
  return d;
}

// Relative residual of the discrete normal equation, evaluated spectrally
// with the (windowed) filter on the same transform grid the solve used, so
// the result measures the lag-window truncation and not grid re-sampling.
inline double normal_equation_residual(const Trace& predicted, const Trace& observed,
                                       double sigma, const MatchingFilter& u) {
  const std::size_t nfft =
      detail::filter_nfft(predicted.size(), observed.size());
  const Spectrum sp = analyze(predicted, nfft);
  const Spectrum sd = analyze(observed, nfft);
  const Spectrum sf = analyze(u.trace, nfft);
  Spectrum num = sf, rhs = sf;
  for (std::size_t k = 0; k < nfft; ++k) {
    const std::complex<double> stsd = std::conj(sp.coeff[k]) * sd.coeff[k];
    rhs.coeff[k] = stsd;
    num.coeff[k] = (std::norm(sp.coeff[k]) + sigma) * sf.coeff[k] - stsd;
  }
  const double den = std::sqrt(detail::spectrum_energy(rhs));
  return den > 0.0 ? std::sqrt(detail::spectrum_energy(num)) / den : 0.0;
}

}  // namespace awi

#endif  // AWI_FILTER_HPP
