#ifndef AWI_FORWARD_HPP
#define AWI_FORWARD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "awi/medium.hpp"
#include "awi/spectral.hpp"
#include "awi/trace.hpp"
#include "awi/wavelet.hpp"

namespace awi {

// Per-trace list of (amplitude, travel time, caustic index), earliest first.
// The earliest arrival has caustic index 0.
struct ArrivalSet {
  struct Arrival {
    double amplitude = 0.0;
    double tau = 0.0;
    unsigned caustic_index = 0;
  };
  std::vector<Arrival> arrivals;

  void validate() const {
    if (arrivals.empty()) throw std::invalid_argument("ArrivalSet: empty");
    std::vector<Arrival> sorted = arrivals;
    std::sort(sorted.begin(), sorted.end(),
              [](const Arrival& a, const Arrival& b) { return a.tau < b.tau; });
    if (sorted.front().caustic_index != 0)
      throw std::invalid_argument("ArrivalSet: earliest arrival must have caustic index 0");
    for (std::size_t i = 0; i < sorted.size(); ++i) {
      if (!(sorted[i].amplitude > 0.0))
        throw std::invalid_argument("ArrivalSet: amplitudes must be positive");
      if (i > 0 && !(sorted[i].tau > sorted[i - 1].tau))
        throw std::invalid_argument("ArrivalSet: arrival times must be strictly increasing");
    }
  }

  ArrivalSet sorted() const {
    ArrivalSet s = *this;
    std::sort(s.arrivals.begin(), s.arrivals.end(),
              [](const Arrival& a, const Arrival& b) { return a.tau < b.tau; });
    return s;
  }
};

// Ensemble of traces over the pair set, all on one shared time axis.
struct Gather {
  std::map<int, Trace> traces;
  TimeAxis axis;
};

// Smooth remainder kernel b(t) = B exp(-decay t), switched on over
// [0, onset_window] by a C1 polynomial ramp. b0 is the separate delta weight.
struct RemainderSpec {
  double b0 = 0.0;
  double decay_delta = 1.0;  // 1/s, > 0
  double scale_B = 0.0;
  double onset_window = 0.1;  // s
};

// a * w_lambda(t - tau) via band-limited delay.
inline Trace leading_term_trace(double a, double tau, const Wavelet& w,
                                const TimeAxis& axis) {
  Trace out = delayed_onto(w.trace, tau, axis);
  for (double& v : out.samples) v *= a;
  return out;
}

namespace detail {

inline double smoothstep01(double s) {
  if (s <= 0.0) return 0.0;
  if (s >= 1.0) return 1.0;
  return s * s * (3.0 - 2.0 * s);
}

inline double smoothstep01_deriv(double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return 6.0 * s * (1.0 - s);
}

}  // namespace detail

// Remainder component: (b0 delta + d/dt[b] H) * f_lambda, delayed by tau,
// with f_lambda the cumulative integral of the wavelet over density.
inline Trace remainder_trace(const RemainderSpec& spec, double tau, const Wavelet& w,
                             const TimeAxis& axis, double rho = 1.0) {
  if (!(spec.decay_delta > 0.0))
    throw std::invalid_argument("remainder_trace: decay_delta must be > 0");
  Trace f = integrate_wavelet(w, rho);

  Trace out(axis);
  if (spec.b0 == 0.0 && spec.scale_B == 0.0) return out;

  // kernel length: decay to ~1e-14 of scale_B, truncated to the room left in
  // the window after the delay (the discarded tail is exponentially small)
  const double room = axis.t_end() - tau - f.t_end() - axis.dt;
  if (room <= std::max(spec.onset_window, axis.dt))
    throw window_error("remainder_trace: no room for remainder kernel after tau=" +
                       std::to_string(tau));
  const double t_kernel = std::min(std::max(spec.onset_window, 32.0 / spec.decay_delta), room);
  const std::size_t nk =
      static_cast<std::size_t>(std::ceil(t_kernel / axis.dt)) + 1;
  Trace kernel;
  kernel.dt = axis.dt;
  kernel.t0 = 0.0;
  kernel.samples.resize(nk);
  const double on = std::max(spec.onset_window, axis.dt);
  for (std::size_t i = 0; i < nk; ++i) {
    const double t = kernel.time(i);
    const double e = std::exp(-spec.decay_delta * t);
    const double s = detail::smoothstep01(t / on);
    const double ds = detail::smoothstep01_deriv(t / on) / on;
    // d/dt [ B e^{-delta t} s(t/on) ]
    kernel.samples[i] = spec.scale_B * (-spec.decay_delta * e * s + e * ds);
  }

  Trace tail = convolve(kernel, f);  // rho * (d_t b H) * f
  for (double& v : tail.samples) v *= rho;

  // rho * b0 * f, on the same axis as tail
  Trace combined = tail;
  // f starts at f.t0 relative to tail.t0 = kernel.t0 + f.t0 = f.t0; aligned.
  for (std::size_t i = 0; i < f.size() && i < combined.size(); ++i)
    combined.samples[i] += rho * spec.b0 * f.samples[i];

  return delayed_onto(combined, tau, axis);
}

struct GatherOptions {
  std::optional<RemainderSpec> remainder;
  AmplitudeModel amplitude_model = AmplitudeModel::unit;
};

// Synthesize one trace per source-receiver pair: leading term plus optional
// remainder, with travel time and amplitude from the medium.
inline Gather model_gather(const MediumModel& medium, const Geometry& geometry,
                           const Wavelet& w, const TimeAxis& axis,
                           const GatherOptions& opts = {}) {
  Gather g;
  g.axis = axis;

  // cache eikonal fields per distinct source for grid media
  std::vector<std::pair<Vec2, TravelTimeField>> fields;
  auto tt = [&](const Vec2& xs, const Vec2& xr) -> double {
    if (medium.kind != MediumModel::Kind::grid) return travel_time(medium, xs, xr);
    for (const auto& [src, fld] : fields)
      if (src.x == xs.x && src.z == xs.z) return fld.interpolate(xr);
    fields.emplace_back(xs, eikonal_solve(medium, xs));
    return fields.back().second.interpolate(xr);
  };

  for (const auto& pair : geometry.pairs) {
    const double tau = tt(pair.source, pair.receiver);
    const double a = amplitude(medium, pair.source, pair.receiver, opts.amplitude_model);
    Trace tr;
    try {
      tr = leading_term_trace(a, tau, w, axis);
      if (opts.remainder) {
        const Trace rem = remainder_trace(*opts.remainder, tau, w, axis, medium.rho);
        for (std::size_t i = 0; i < tr.size(); ++i) {
          tr.samples[i] += a * rem.samples[i];
        }
      }
    } catch (const window_error& e) {
      throw window_error("pair id=" + std::to_string(pair.id) + ": " + e.what());
    }
    g.traces.emplace(pair.id, std::move(tr));
  }
  return g;
}

// One arrival event: H^p w delayed by tau, done in a single spectral pass so
// the Hilbert rotation and the band-limited delay share one grid. The window
// check applies to the wavelet support; the rotation's power-law tails decay
// within the transform padding.
inline Trace rotated_delayed_event(const Trace& w, unsigned p, double tau,
                                   const TimeAxis& axis) {
  if (w.dt != axis.dt)
    throw std::invalid_argument("rotated_delayed_event: dt mismatch");
  const double lead = w.t0 + tau;
  const double trail = w.t_end() + tau;
  if (lead < axis.t0 - 0.5 * axis.dt || trail > axis.t_end() + 0.5 * axis.dt)
    throw window_error("arrival support [" + std::to_string(lead) + ", " +
                       std::to_string(trail) + "] clipped by window [" +
                       std::to_string(axis.t0) + ", " +
                       std::to_string(axis.t_end()) + "]");
  const std::size_t nfft = next_pow2(axis.n + w.size());
  Spectrum s = analyze(w, nfft);
  const std::complex<double> mi(0.0, -1.0);
  for (std::size_t k = 0; k < nfft; ++k) {
    const double om = s.omega(k);
    std::complex<double> m = std::polar(1.0, -om * tau);
    if (p > 0) {
      if (om > 0.0 && k != nfft / 2)
        m *= std::pow(mi, static_cast<double>(p));
      else if (om < 0.0)
        m *= std::pow(-mi, static_cast<double>(p));
      else
        m = 0.0;
    }
    s.coeff[k] *= m;
  }
  return synthesize(s, axis.n, axis.t0);
}

// Sum over arrivals of a_i H^{p_i} w(t - tau_i).
inline Trace multi_arrival_trace(const ArrivalSet& arrivals, const Wavelet& w,
                                 const TimeAxis& axis) {
  arrivals.validate();
  Trace out(axis);
  for (const auto& arr : arrivals.sorted().arrivals) {
    const Trace ev = rotated_delayed_event(w.trace, arr.caustic_index, arr.tau, axis);
    for (std::size_t i = 0; i < out.size(); ++i)
      out.samples[i] += arr.amplitude * ev.samples[i];
  }
  return out;
}

}  // namespace awi

#endif  // AWI_FORWARD_HPP
