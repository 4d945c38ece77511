#ifndef AWI_TRACE_HPP
#define AWI_TRACE_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace awi {

// Thrown by ratio-type operations (pulse width, AWI value, ...) that are
// undefined on an identically zero trace.
struct zero_trace_error : std::domain_error {
  explicit zero_trace_error(const std::string& what) : std::domain_error(what) {}
};

// Thrown when an event plus its wavelet support does not fit the time window.
struct window_error : std::runtime_error {
  explicit window_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown on iterative-solver failure (CG stagnation, non-finite objective).
struct numerical_error : std::runtime_error {
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Uniform time axis: n samples at t0, t0+dt, ..., t0+(n-1)dt.
struct TimeAxis {
  std::size_t n = 0;
  double dt = 0.0;
  double t0 = 0.0;

  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double t_end() const { return n == 0 ? t0 : time(n - 1); }
};

// Uniformly sampled time series. All L2 norms are dt-weighted so that they
// approximate continuum integrals: ||x||^2 = dt * sum x_n^2.
struct Trace {
  std::vector<double> samples;
  double dt = 0.0;
  double t0 = 0.0;

  Trace() = default;
  Trace(std::vector<double> s, double dt_, double t0_)
      : samples(std::move(s)), dt(dt_), t0(t0_) {
    if (dt <= 0.0) throw std::invalid_argument("Trace: dt must be positive");
  }
  explicit Trace(const TimeAxis& ax)
      : samples(ax.n, 0.0), dt(ax.dt), t0(ax.t0) {
    if (dt <= 0.0) throw std::invalid_argument("Trace: dt must be positive");
  }

  std::size_t size() const { return samples.size(); }
  double time(std::size_t i) const { return t0 + static_cast<double>(i) * dt; }
  double t_end() const { return samples.empty() ? t0 : time(samples.size() - 1); }
  TimeAxis axis() const { return {samples.size(), dt, t0}; }
};

inline double norm2_sq(const Trace& x) {
  double s = 0.0;
  for (double v : x.samples) s += v * v;
  return s * x.dt;
}

inline double norm2(const Trace& x) { return std::sqrt(norm2_sq(x)); }

inline double norm1(const Trace& x) {
  double s = 0.0;
  for (double v : x.samples) s += std::fabs(v);
  return s * x.dt;
}

inline double inner(const Trace& a, const Trace& b) {
  if (a.size() != b.size()) throw std::invalid_argument("inner: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.samples[i] * b.samples[i];
  return s * a.dt;
}

// dt-weighted integral of the trace (its "mean" in the zero-mean invariants).
inline double integral(const Trace& x) {
  double s = 0.0;
  for (double v : x.samples) s += v;
  return s * x.dt;
}

inline bool all_finite(const Trace& x) {
  for (double v : x.samples)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace awi

#endif  // AWI_TRACE_HPP
