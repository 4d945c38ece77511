#ifndef AWI_OBJECTIVES_HPP
#define AWI_OBJECTIVES_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "awi/filter.hpp"
#include "awi/forward.hpp"
#include "awi/medium.hpp"
#include "awi/spectral.hpp"
#include "awi/trace.hpp"
#include "awi/wavelet.hpp"

namespace awi {

// Aggregate objective value with its per-trace breakdown.
// Constant conventions: J_FWI and the penalty-form MSWI carry the 1/2 factor;
// J_AWI, J_MSWI, J-tilde, and the penalty-form AWI do not.
struct ObjectiveReport {
  struct PerTrace {
    double value = 0.0;
    double ratio = 0.0;           // ||Tu|| / ||u|| in seconds, 0 if n/a
    double residual_ratio = 0.0;  // filtered (or raw) residual over data norm
  };
  double total = 0.0;
  std::map<int, PerTrace> per_trace;
  double sigma = 0.0;
  double lambda = 0.0;
  double r = 0.0;
};

namespace detail {

inline void check_pair_sets(const Gather& pred, const Gather& obs) {
  if (pred.traces.size() != obs.traces.size())
    throw std::invalid_argument("gather pair sets differ in size");
  for (const auto& [id, tr] : pred.traces) {
    auto it = obs.traces.find(id);
    if (it == obs.traces.end())
      throw std::invalid_argument("pair id=" + std::to_string(id) +
                                  " missing from observed gather");
    if (tr.size() != it->second.size() || tr.dt != it->second.dt)
      throw std::invalid_argument("pair id=" + std::to_string(id) +
                                  ": trace axes differ");
  }
}

}  // namespace detail

// Least-squares waveform misfit: 1/2 sum ||pred - obs||^2.
inline ObjectiveReport j_fwi(const Gather& pred, const Gather& obs) {
  detail::check_pair_sets(pred, obs);
  ObjectiveReport rep;
  for (const auto& [id, p] : pred.traces) {
    const Trace& d = obs.traces.at(id);
    double s = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double e = p.samples[i] - d.samples[i];
      s += e * e;
    }
    ObjectiveReport::PerTrace e;
    e.value = 0.5 * s * p.dt;
    const double dn = norm2(d);
    e.residual_ratio = dn > 0.0 ? std::sqrt(s * p.dt) / dn : 0.0;
    rep.per_trace.emplace(id, e);
    rep.total += e.value;
  }
  return rep;
}

// Normalized filter dispersion: sum ||T u_sigma||^2 / ||u_sigma||^2 (time^2).
inline ObjectiveReport j_awi(const Gather& pred, const Gather& obs, double sigma,
                             double lag_half = -1.0) {
  detail::check_pair_sets(pred, obs);
  ObjectiveReport rep;
  rep.sigma = sigma;
  for (const auto& [id, p] : pred.traces) {
    const Trace& d = obs.traces.at(id);
    if (norm2_sq(d) == 0.0)
      throw zero_trace_error("j_awi: observed trace is zero for pair id=" +
                             std::to_string(id));
    const MatchingFilter u = solve_filter(p, d, sigma, lag_half);
    const FilterDiagnostics diag = filter_diagnostics(u, p, d);
    ObjectiveReport::PerTrace e;
    e.ratio = diag.ratio;
    e.residual_ratio = diag.residual_ratio;
    e.value = diag.ratio * diag.ratio;
    rep.per_trace.emplace(id, e);
    rep.total += e.value;
  }
  return rep;
}

// Unnormalized filter dispersion: sum ||T u_sigma||^2.
inline ObjectiveReport j_mswi(const Gather& pred, const Gather& obs, double sigma,
                              double lag_half = -1.0) {
  detail::check_pair_sets(pred, obs);
  ObjectiveReport rep;
  rep.sigma = sigma;
  for (const auto& [id, p] : pred.traces) {
    const Trace& d = obs.traces.at(id);
    if (norm2_sq(d) == 0.0)
      throw zero_trace_error("j_mswi: observed trace is zero for pair id=" +
                             std::to_string(id));
    const MatchingFilter u = solve_filter(p, d, sigma, lag_half);
    const FilterDiagnostics diag = filter_diagnostics(u, p, d);
    ObjectiveReport::PerTrace e;
    e.ratio = diag.ratio;
    e.residual_ratio = diag.residual_ratio;
    e.value = diag.norm_Tu * diag.norm_Tu;
    rep.per_trace.emplace(id, e);
    rep.total += e.value;
  }
  return rep;
}

// Regularized-misfit value: sum ||S u_sigma - d||^2 + sigma ||u_sigma||^2.
inline double j_tilde(const Gather& pred, const Gather& obs, double sigma,
                      double lag_half = -1.0) {
  detail::check_pair_sets(pred, obs);
  double total = 0.0;
  for (const auto& [id, p] : pred.traces) {
    const Trace& d = obs.traces.at(id);
    const MatchingFilter u = solve_filter(p, d, sigma, lag_half);
    const FilterDiagnostics diag = filter_diagnostics(u, p, d);
    total += diag.residual_norm * diag.residual_norm + sigma * diag.norm_u * diag.norm_u;
  }
  return total;
}

namespace detail {

// One penalty-objective trace solve on the circular lag grid of length nfft:
// minimize c * (||Su - d||^2 + sigma ||u||^2 + penalty_scale ||T_eps u||^2)
// by conjugate gradients on the normal operator. Returns the minimum value
// (with c = half ? 1/2 : 1).
struct PenaltySolveResult {
  double value = 0.0;
  double t_eps_term = 0.0;  // ||T_eps u||^2 at the minimizer
  std::size_t iterations = 0;
};

inline PenaltySolveResult penalty_solve(const Trace& predicted, const Trace& observed,
                                        double sigma, double penalty_scale, double eps,
                                        bool half, double cg_tol = 1e-10,
                                        std::size_t max_iter = 20000) {
  const std::size_t nfft = filter_nfft(predicted.size(), observed.size());
  const Spectrum sp = analyze(predicted, nfft);
  const Spectrum sd = analyze(observed, nfft);
  const double dt = predicted.dt;

  std::vector<double> psq(nfft);
  for (std::size_t k = 0; k < nfft; ++k) psq[k] = std::norm(sp.coeff[k]);

  // T_eps multiplier on the circular time grid (negative times in upper half)
  std::vector<double> teps(nfft);
  for (std::size_t j = 0; j < nfft; ++j) {
    const double t = (j < nfft / 2 ? static_cast<double>(j)
                                   : static_cast<double>(j) - static_cast<double>(nfft)) *
                     dt;
    teps[j] = t / std::sqrt(1.0 + eps * eps * t * t);
  }

  // right-hand side S^T d in the time domain
  std::vector<std::complex<double>> work(nfft);
  for (std::size_t k = 0; k < nfft; ++k) work[k] = std::conj(sp.coeff[k]) * sd.coeff[k];
  fft_inplace(work, true);
  std::vector<double> b(nfft);
  for (std::size_t j = 0; j < nfft; ++j) b[j] = work[j].real() / dt;

  auto apply = [&](const std::vector<double>& u, std::vector<double>& out) {
    for (std::size_t j = 0; j < nfft; ++j) work[j] = u[j];
    fft_inplace(work, false);
    for (std::size_t k = 0; k < nfft; ++k) work[k] *= psq[k];
    fft_inplace(work, true);
    for (std::size_t j = 0; j < nfft; ++j)
      out[j] = work[j].real() + sigma * u[j] +
               penalty_scale * teps[j] * teps[j] * u[j];
  };

  auto dot = [&](const std::vector<double>& x, const std::vector<double>& y) {
    double s = 0.0;
    for (std::size_t j = 0; j < nfft; ++j) s += x[j] * y[j];
    return s * dt;
  };

  std::vector<double> u(nfft, 0.0), rvec(b), p(b), Ap(nfft);
  const double b_norm = std::sqrt(dot(b, b));
  if (b_norm == 0.0) return {};
  double rr = dot(rvec, rvec);
  std::size_t it = 0;
  while (std::sqrt(rr) > cg_tol * b_norm) {
    if (it++ >= max_iter)
      throw numerical_error("penalty_solve: CG did not converge, relative residual " +
                            std::to_string(std::sqrt(rr) / b_norm));
    apply(p, Ap);
    const double alpha = rr / dot(p, Ap);
    for (std::size_t j = 0; j < nfft; ++j) {
      u[j] += alpha * p[j];
      rvec[j] -= alpha * Ap[j];
    }
    const double rr_new = dot(rvec, rvec);
    const double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t j = 0; j < nfft; ++j) p[j] = rvec[j] + beta * p[j];
  }

  // objective pieces at the minimizer
  for (std::size_t j = 0; j < nfft; ++j) work[j] = u[j];
  fft_inplace(work, false);
  double misfit = 0.0;
  const double dom_2pi = 1.0 / (static_cast<double>(nfft) * dt);
  for (std::size_t k = 0; k < nfft; ++k) {
    // u_hat with continuum weight is dt * DFT(u)
    const std::complex<double> su = sp.coeff[k] * (work[k] * dt) - sd.coeff[k];
    misfit += std::norm(su);
  }
  misfit *= dom_2pi;
  double u_sq = 0.0, teps_sq = 0.0;
  for (std::size_t j = 0; j < nfft; ++j) {
    u_sq += u[j] * u[j];
    teps_sq += teps[j] * teps[j] * u[j] * u[j];
  }
  u_sq *= dt;
  teps_sq *= dt;

  PenaltySolveResult res;
  res.t_eps_term = teps_sq;
  res.value = misfit + sigma * u_sq + penalty_scale * teps_sq;
  if (half) res.value *= 0.5;
  res.iterations = it;
  return res;
}

inline double filter_energy_full_grid(const Trace& predicted, const Trace& observed,
                                      double sigma) {
  const std::size_t nfft = filter_nfft(predicted.size(), observed.size());
  Spectrum su = analyze(predicted, nfft);
  const Spectrum sd = analyze(observed, nfft);
  for (std::size_t k = 0; k < nfft; ++k)
    su.coeff[k] =
        std::conj(su.coeff[k]) * sd.coeff[k] / (std::norm(su.coeff[k]) + sigma);
  return spectrum_energy(su);
}

}  // namespace detail

// Minimum over u of 1/2 (||Su - d||^2 + sigma ||u||^2 + alpha^2 ||T_eps u||^2),
// summed over pairs.
inline double j_penalty_mswi(const Gather& pred, const Gather& obs, double sigma,
                             double alpha, double eps) {
  detail::check_pair_sets(pred, obs);
  if (sigma <= 0.0) throw std::invalid_argument("j_penalty_mswi: sigma must be > 0");
  if (alpha < 0.0 || eps < 0.0)
    throw std::invalid_argument("j_penalty_mswi: alpha and eps must be >= 0");
  double total = 0.0;
  for (const auto& [id, p] : pred.traces) {
    total += detail::penalty_solve(p, obs.traces.at(id), sigma, alpha * alpha, eps,
                                   /*half=*/true)
                 .value;
  }
  return total;
}

// AWI penalty variant: the T_eps term of each trace is weighted by
// 1 / ||u_sigma||^2 from the alpha = 0 solve of that trace. No 1/2 factor.
inline double j_penalty_awi(const Gather& pred, const Gather& obs, double sigma,
                            double alpha, double eps) {
  detail::check_pair_sets(pred, obs);
  if (sigma <= 0.0) throw std::invalid_argument("j_penalty_awi: sigma must be > 0");
  if (alpha < 0.0 || eps < 0.0)
    throw std::invalid_argument("j_penalty_awi: alpha and eps must be >= 0");
  double total = 0.0;
  for (const auto& [id, p] : pred.traces) {
    const Trace& d = obs.traces.at(id);
    const double weight = detail::filter_energy_full_grid(p, d, sigma);
    if (weight <= 0.0)
      throw zero_trace_error("j_penalty_awi: zero-weight trace for pair id=" +
                             std::to_string(id));
    total += detail::penalty_solve(p, d, sigma, alpha * alpha / weight, eps,
                                   /*half=*/false)
                 .value;
  }
  return total;
}

// Mean-square travel-time misfit: sum over pairs of (tau - tau*)^2.
inline double travel_time_misfit(const MediumModel& medium,
                                 const MediumModel& medium_star,
                                 const Geometry& geometry) {
  double total = 0.0;
  for (const auto& pair : geometry.pairs) {
    const double dtau = travel_time(medium, pair.source, pair.receiver) -
                        travel_time(medium_star, pair.source, pair.receiver);
    total += dtau * dtau;
  }
  return total;
}

// Weighted travel-time misfit: sum W (tau - tau*)^2 with per-pair weight
// W = (a*/a)^2 ||g_{1, r/a^2}||^2 (the amplitude-absorbed kernel norm).
inline double weighted_tt_misfit(const MediumModel& medium,
                                 const MediumModel& medium_star,
                                 const Geometry& geometry, const Wavelet& w1,
                                 double r,
                                 AmplitudeModel amp = AmplitudeModel::unit) {
  if (w1.lambda_scale != 1.0)
    throw std::invalid_argument("weighted_tt_misfit: w1 must be the mother wavelet");
  double total = 0.0;
  for (const auto& pair : geometry.pairs) {
    const double a = amplitude(medium, pair.source, pair.receiver, amp);
    const double a_star = amplitude(medium_star, pair.source, pair.receiver, amp);
    const double g_sq = norm2_sq(g_kernel(w1, r / (a * a)));
    const double W = (a_star / a) * (a_star / a) * g_sq;
    const double dtau = travel_time(medium, pair.source, pair.receiver) -
                        travel_time(medium_star, pair.source, pair.receiver);
    total += W * dtau * dtau;
  }
  return total;
}

}  // namespace awi

#endif  // AWI_OBJECTIVES_HPP
