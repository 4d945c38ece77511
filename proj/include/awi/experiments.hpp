#ifndef AWI_EXPERIMENTS_HPP
#define AWI_EXPERIMENTS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "awi/filter.hpp"
#include "awi/forward.hpp"
#include "awi/medium.hpp"
#include "awi/objectives.hpp"
#include "awi/trace.hpp"
#include "awi/wavelet.hpp"

namespace awi {

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

// Least-squares line through (log x, log y).
inline FitResult slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("slope_fit: size mismatch");
  if (xs.size() < 4) throw std::invalid_argument("slope_fit: need at least 4 points");
  const std::size_t n = xs.size();
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0))
      throw std::invalid_argument("slope_fit: values must be positive");
    lx[i] = std::log(xs[i]);
    ly[i] = std::log(ys[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  FitResult f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

// Tabulated sweep: one row per sweep value, named measurement columns,
// fitted log-log slopes, and scalar annotations.
struct SweepTable {
  std::string sweep_name;
  std::vector<std::string> columns;
  std::vector<double> sweep_values;
  std::vector<std::vector<double>> rows;
  std::map<std::string, FitResult> fitted;
  std::map<std::string, double> annotations;

  void add_row(double x, std::vector<double> vals) {
    if (vals.size() != columns.size())
      throw std::invalid_argument("SweepTable: column count mismatch");
    sweep_values.push_back(x);
    rows.push_back(std::move(vals));
  }

  std::vector<double> column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end())
      throw std::invalid_argument("SweepTable: no column " + name);
    const std::size_t c = static_cast<std::size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[c]);
    return out;
  }

  void fit(const std::string& name) {
    fitted[name] = slope_fit(sweep_values, column(name));
  }
};

// Fixed experimental setup: a medium pair, acquisition geometry, wavelet
// family, and the shared time axis all synthetic data lives on.
struct Scenario {
  MediumModel medium;       // "predicted" model kappa
  MediumModel medium_star;  // "true" model kappa*
  Geometry geometry;
  WaveletKind kind = WaveletKind::ricker;
  double dt = 1e-3;
  double t0 = 0.0;
  double t_max = 20.0;
  double mother_half_support = 6.0;
  AmplitudeModel amp_model = AmplitudeModel::unit;
  std::optional<RemainderSpec> remainder;
  double lag_half = -1.0;  // < 0: derived from travel-time spread + support
  std::uint64_t seed = 1;

  TimeAxis axis() const {
    const std::size_t n =
        static_cast<std::size_t>(std::llround((t_max - t0) / dt)) + 1;
    return {n, dt, t0};
  }

  Wavelet mother() const { return make_mother_wavelet(kind, dt, mother_half_support); }

  std::vector<double> pair_dtau() const {
    std::vector<double> out;
    for (const auto& p : geometry.pairs)
      out.push_back(travel_time(medium, p.source, p.receiver) -
                    travel_time(medium_star, p.source, p.receiver));
    return out;
  }

  double resolved_lag_half(const Wavelet& w1) const {
    if (lag_half > 0.0) return lag_half;
    double max_dtau = 0.0;
    for (double d : pair_dtau()) max_dtau = std::max(max_dtau, std::fabs(d));
    return 2.0 * max_dtau + 8.0 * pulse_width(w1.trace);
  }
};

// Default regularization ratio: sigma = r lambda with the water level r a
// fixed fraction (1e-2) of the peak signal power max_w |a w1_hat|^2.
inline double default_r(const Scenario& sc, const Wavelet& w1) {
  const Spectrum s = analyze(w1.trace, next_pow2(2 * w1.trace.size()));
  double peak = 0.0;
  for (const auto& c : s.coeff) peak = std::max(peak, std::norm(c));
  double a_max = 0.0;
  for (const auto& p : sc.geometry.pairs)
    a_max = std::max(a_max, amplitude(sc.medium, p.source, p.receiver, sc.amp_model));
  return 1e-2 * a_max * a_max * peak;
}

namespace detail {

struct TracePairStats {
  double j_awi = 0.0;
  double j_mswi = 0.0;
  double norm_u_mean = 0.0;
  double width_mean = 0.0;  // filter RMS width about its own centroid
  double ratio_mean = 0.0;
  double residual_ratio_max = 0.0;
  std::vector<double> ratios;
};

inline double centered_width(const Trace& u) {
  const double e = norm2_sq(u);
  if (e == 0.0) return 0.0;
  double m1 = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    m1 += u.time(i) * u.samples[i] * u.samples[i];
  m1 *= u.dt / e;
  const double m2 = norm2_sq(apply_T(u)) / e;
  return std::sqrt(std::max(0.0, m2 - m1 * m1));
}

inline TracePairStats gather_filter_stats(const Gather& pred, const Gather& obs,
                                          double sigma, double lag_half) {
  TracePairStats st;
  const double n = static_cast<double>(pred.traces.size());
  for (const auto& [id, p] : pred.traces) {
    const Trace& d = obs.traces.at(id);
    const MatchingFilter u = solve_filter(p, d, sigma, lag_half);
    const FilterDiagnostics diag = filter_diagnostics(u, p, d);
    st.j_awi += diag.ratio * diag.ratio;
    st.j_mswi += diag.norm_Tu * diag.norm_Tu;
    st.norm_u_mean += diag.norm_u / n;
    st.width_mean += centered_width(u.trace) / n;
    st.ratio_mean += diag.ratio / n;
    st.residual_ratio_max = std::max(st.residual_ratio_max, diag.residual_ratio);
    st.ratios.push_back(diag.ratio);
  }
  return st;
}

}  // namespace detail

// Wavelength sweep with sigma = r lambda: records the AWI/MSWI values, filter
// norms and widths, and their distances from the travel-time references.
inline SweepTable lambda_sweep(const Scenario& sc, const std::vector<double>& lambdas,
                               double r = -1.0) {
  const Wavelet w1 = sc.mother();
  if (r <= 0.0) r = default_r(sc, w1);
  const TimeAxis axis = sc.axis();
  const double lag_half = sc.resolved_lag_half(w1);

  const std::vector<double> dtaus = sc.pair_dtau();
  double sum_dtau2 = 0.0;
  for (double d : dtaus) sum_dtau2 += d * d;

  SweepTable t;
  t.sweep_name = "lambda";
  t.columns = {"j_awi",          "lambda_j_mswi", "norm_u_mean",
               "filter_width",   "ratio_mean",    "residual_ratio_max",
               "err_jawi",       "err_ratio_mean"};
  t.annotations["r"] = r;
  t.annotations["sum_dtau2"] = sum_dtau2;

  GatherOptions opts;
  opts.remainder = sc.remainder;
  opts.amplitude_model = sc.amp_model;

  for (double lambda : lambdas) {
    const double sigma = r * lambda;
    const Wavelet w = scale_wavelet(w1, lambda);
    const Gather pred = model_gather(sc.medium, sc.geometry, w, axis, opts);
    const Gather obs = model_gather(sc.medium_star, sc.geometry, w, axis, opts);
    const auto st = detail::gather_filter_stats(pred, obs, sigma, lag_half);
    double err_ratio = 0.0;
    for (std::size_t i = 0; i < dtaus.size(); ++i)
      err_ratio += std::fabs(st.ratios[i] - std::fabs(dtaus[i])) /
                   static_cast<double>(dtaus.size());
    t.add_row(lambda, {st.j_awi, lambda * st.j_mswi, st.norm_u_mean, st.width_mean,
                       st.ratio_mean, st.residual_ratio_max,
                       std::fabs(st.j_awi - sum_dtau2), err_ratio});
  }

  if (lambdas.size() >= 4) {
    t.fit("err_jawi");
    t.fit("norm_u_mean");
    t.fit("filter_width");
  }
  return t;
}

// Regularization sweep at fixed lambda: residual_ratio as a function of
// sigma / lambda, with the 1/2-crossing located by log interpolation.
inline SweepTable sigma_coupling_sweep(const Scenario& sc, double lambda,
                                       const std::vector<double>& sigmas) {
  const Wavelet w1 = sc.mother();
  const TimeAxis axis = sc.axis();
  const double lag_half = sc.resolved_lag_half(w1);
  const Wavelet w = scale_wavelet(w1, lambda);

  GatherOptions opts;
  opts.remainder = sc.remainder;
  opts.amplitude_model = sc.amp_model;
  const Gather pred = model_gather(sc.medium, sc.geometry, w, axis, opts);
  const Gather obs = model_gather(sc.medium_star, sc.geometry, w, axis, opts);

  SweepTable t;
  t.sweep_name = "sigma_over_lambda";
  t.columns = {"residual_ratio", "norm_u_mean"};
  for (double sigma : sigmas) {
    const auto st = detail::gather_filter_stats(pred, obs, sigma, lag_half);
    double rr_mean = 0.0;
    for (const auto& [id, p] : pred.traces) {
      const MatchingFilter u = solve_filter(p, obs.traces.at(id), sigma, lag_half);
      rr_mean += filter_diagnostics(u, p, obs.traces.at(id)).residual_ratio /
                 static_cast<double>(pred.traces.size());
    }
    t.add_row(sigma / lambda, {rr_mean, st.norm_u_mean});
  }

  // locate the residual_ratio = 1/2 crossing (log interpolation in sigma)
  const auto rr = t.column("residual_ratio");
  for (std::size_t i = 0; i + 1 < rr.size(); ++i) {
    if ((rr[i] - 0.5) * (rr[i + 1] - 0.5) <= 0.0 && rr[i] != rr[i + 1]) {
      const double f = (0.5 - rr[i]) / (rr[i + 1] - rr[i]);
      t.annotations["crossing_sigma_over_lambda"] =
          std::exp(std::log(t.sweep_values[i]) +
                   f * (std::log(t.sweep_values[i + 1]) - std::log(t.sweep_values[i])));
      break;
    }
  }
  return t;
}

// Difference between the filters computed from full and leading-term-only
// data, as a function of lambda.
inline SweepTable remainder_effect(const Scenario& sc, const std::vector<double>& lambdas,
                                   double r = -1.0) {
  if (!sc.remainder)
    throw std::invalid_argument("remainder_effect: scenario has no RemainderSpec");
  const Wavelet w1 = sc.mother();
  if (r <= 0.0) r = default_r(sc, w1);
  const TimeAxis axis = sc.axis();
  const double lag_half = sc.resolved_lag_half(w1);

  const std::vector<double> dtaus = sc.pair_dtau();
  double sum_dtau2 = 0.0;
  for (double d : dtaus) sum_dtau2 += d * d;

  GatherOptions full_opts, lead_opts;
  full_opts.remainder = sc.remainder;
  full_opts.amplitude_model = sc.amp_model;
  lead_opts.amplitude_model = sc.amp_model;

  SweepTable t;
  t.sweep_name = "lambda";
  t.columns = {"du_over_d", "dTu_over_d", "j_awi_full", "err_jawi_full"};
  t.annotations["r"] = r;
  t.annotations["sum_dtau2"] = sum_dtau2;

  for (double lambda : lambdas) {
    const double sigma = r * lambda;
    const Wavelet w = scale_wavelet(w1, lambda);
    const Gather pred_f = model_gather(sc.medium, sc.geometry, w, axis, full_opts);
    const Gather obs_f = model_gather(sc.medium_star, sc.geometry, w, axis, full_opts);
    const Gather pred_l = model_gather(sc.medium, sc.geometry, w, axis, lead_opts);
    const Gather obs_l = model_gather(sc.medium_star, sc.geometry, w, axis, lead_opts);

    double du = 0.0, dTu = 0.0, jawi = 0.0;
    const double np = static_cast<double>(pred_f.traces.size());
    for (const auto& [id, pf] : pred_f.traces) {
      const Trace& df = obs_f.traces.at(id);
      const MatchingFilter uf = solve_filter(pf, df, sigma, lag_half);
      const MatchingFilter ul =
          solve_filter(pred_l.traces.at(id), obs_l.traces.at(id), sigma, lag_half);
      Trace diff = uf.trace;
      for (std::size_t i = 0; i < diff.size(); ++i)
        diff.samples[i] -= ul.trace.samples[i];
      const double dn = norm2(df);
      du += norm2(diff) / dn / np;
      dTu += norm2(apply_T(diff)) / dn / np;
      const FilterDiagnostics diag = filter_diagnostics(uf, pf, df);
      jawi += diag.ratio * diag.ratio;
    }
    t.add_row(lambda, {du, dTu, jawi, std::fabs(jawi - sum_dtau2)});
  }

  if (lambdas.size() >= 4) {
    t.fit("du_over_d");
    t.fit("dTu_over_d");
    t.fit("err_jawi_full");
  }
  return t;
}

// Finite-dimensional model of the abstract penalty limit: a random coercive
// 8x8 operator solved densely, no trace machinery involved.
struct DeskPenaltyResult {
  double measured = 0.0;  // (Jt_alpha - Jt_0) / alpha^2
  double expected = 0.0;  // 1/2 ||T u_0||^2
};

namespace detail {

// dense solve of A x = b by Gaussian elimination with partial pivoting
inline std::vector<double> dense_solve(std::vector<std::vector<double>> A,
                                       std::vector<double> b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::fabs(A[r][col]) > std::fabs(A[piv][col])) piv = r;
    std::swap(A[col], A[piv]);
    std::swap(b[col], b[piv]);
    if (A[col][col] == 0.0) throw numerical_error("dense_solve: singular matrix");
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = A[r][col] / A[col][col];
      for (std::size_t c = col; c < n; ++c) A[r][c] -= f * A[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t ri = n; ri-- > 0;) {
    double s = b[ri];
    for (std::size_t c = ri + 1; c < n; ++c) s -= A[ri][c] * x[c];
    x[ri] = s / A[ri][ri];
  }
  return x;
}

}  // namespace detail

inline DeskPenaltyResult desk_penalty_limit(std::size_t n, double alpha,
                                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<std::vector<double>> S(n, std::vector<double>(n)),
      T(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      S[i][j] = (i == j ? 1.0 : 0.0) + 0.25 * normal(rng) / std::sqrt(double(n));
      T[i][j] = normal(rng);
    }
  std::vector<double> d(n);
  for (auto& v : d) v = normal(rng);

  auto matvec = [&](const std::vector<std::vector<double>>& M,
                    const std::vector<double>& x) {
    std::vector<double> y(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) y[i] += M[i][j] * x[j];
    return y;
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b2) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b2[i];
    return s;
  };

  auto jtilde = [&](double al) {
    // normal matrix S^T S + al^2 T^T T and rhs S^T d
    std::vector<std::vector<double>> A(n, std::vector<double>(n, 0.0));
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t k = 0; k < n; ++k)
          s += S[k][i] * S[k][j] + al * al * T[k][i] * T[k][j];
        A[i][j] = s;
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) rhs[i] += S[k][i] * d[k];
    const std::vector<double> u = detail::dense_solve(A, rhs);
    std::vector<double> su = matvec(S, u);
    for (std::size_t i = 0; i < n; ++i) su[i] -= d[i];
    const std::vector<double> tu = matvec(T, u);
    return std::pair<double, std::vector<double>>(
        0.5 * (dot(su, su) + al * al * dot(tu, tu)), u);
  };

  const auto [j0, u0] = jtilde(0.0);
  const auto [ja, ua] = jtilde(alpha);
  const std::vector<double> tu0 = matvec(T, u0);

  DeskPenaltyResult res;
  res.measured = (ja - j0) / (alpha * alpha);
  res.expected = 0.5 * dot(tu0, tu0);
  return res;
}

// Trace-level penalty limits: alpha sweep of the quadratic quotient for the
// MSWI and AWI penalty objectives against their predicted limits, plus the
// epsilon sweep of ||(T_eps - T) u_sigma||.
struct PenaltyLimitResult {
  SweepTable alpha_table;
  SweepTable eps_table;
  DeskPenaltyResult desk;
};

inline PenaltyLimitResult penalty_limit_check(const Scenario& sc, double lambda,
                                              const std::vector<double>& alphas,
                                              const std::vector<double>& epsilons,
                                              double r = -1.0) {
  const Wavelet w1 = sc.mother();
  if (r <= 0.0) r = default_r(sc, w1);
  const double sigma = r * lambda;
  const TimeAxis axis = sc.axis();
  const double lag_half = sc.resolved_lag_half(w1);
  const Wavelet w = scale_wavelet(w1, lambda);

  GatherOptions opts;
  opts.remainder = sc.remainder;
  opts.amplitude_model = sc.amp_model;
  const Gather pred = model_gather(sc.medium, sc.geometry, w, axis, opts);
  const Gather obs = model_gather(sc.medium_star, sc.geometry, w, axis, opts);

  const double eps = epsilons.empty() ? 0.0 : epsilons.back();

  // reference quantities at alpha = 0
  const double j0_mswi = j_penalty_mswi(pred, obs, sigma, 0.0, eps);
  const double j0_awi = j_penalty_awi(pred, obs, sigma, 0.0, eps);
  double target_mswi = 0.0;  // 1/2 sum ||T_eps u_sigma||^2
  for (const auto& [id, p] : pred.traces)
    target_mswi += 0.5 * detail::penalty_solve(p, obs.traces.at(id), sigma, 0.0, eps,
                                               false)
                             .t_eps_term;
  const double target_awi = j_awi(pred, obs, sigma, lag_half).total;

  PenaltyLimitResult res;
  res.alpha_table.sweep_name = "alpha";
  res.alpha_table.columns = {"quot_mswi", "quot_awi"};
  res.alpha_table.annotations["target_mswi"] = target_mswi;
  res.alpha_table.annotations["target_awi"] = target_awi;
  res.alpha_table.annotations["sigma"] = sigma;
  for (double alpha : alphas) {
    const double ja_m = j_penalty_mswi(pred, obs, sigma, alpha, eps);
    const double ja_a = j_penalty_awi(pred, obs, sigma, alpha, eps);
    res.alpha_table.add_row(alpha, {(ja_m - j0_mswi) / (alpha * alpha),
                                    (ja_a - j0_awi) / (alpha * alpha)});
  }

  res.eps_table.sweep_name = "eps";
  res.eps_table.columns = {"t_eps_minus_t_u"};
  for (double e : epsilons) {
    double v = 0.0;
    for (const auto& [id, p] : pred.traces) {
      const MatchingFilter u = solve_filter(p, obs.traces.at(id), sigma, lag_half);
      Trace diff = apply_T_eps(u.trace, e);
      const Trace tu = apply_T(u.trace);
      for (std::size_t i = 0; i < diff.size(); ++i)
        diff.samples[i] -= tu.samples[i];
      v += norm2_sq(diff);
    }
    res.eps_table.add_row(e, {std::sqrt(v)});
  }

  res.desk = desk_penalty_limit(8, alphas.empty() ? 1e-3 : alphas.back(), sc.seed);
  return res;
}

// One-parameter model family for scans and descent demos.
enum class ScanParameter { constant_velocity, gradient_strength };

inline MediumModel with_parameter(const MediumModel& base, ScanParameter which,
                                  double value) {
  MediumModel m = base;
  switch (which) {
    case ScanParameter::constant_velocity:
      if (m.kind != MediumModel::Kind::constant)
        throw std::invalid_argument("scan parameter requires a constant medium");
      m.c = value;
      break;
    case ScanParameter::gradient_strength:
      if (m.kind != MediumModel::Kind::linear_gradient)
        throw std::invalid_argument("scan parameter requires a gradient medium");
      m.g = value;
      break;
  }
  return m;
}

struct ScanResult {
  std::vector<double> parameters;
  std::vector<double> j_fwi;
  std::vector<double> j_awi;
  std::vector<double> j_mswi;
  std::vector<std::size_t> minima_fwi;
  std::vector<std::size_t> minima_awi;
  std::vector<std::size_t> minima_mswi;
};

namespace detail {

// Strict 3-point local minima with equal-neighbor plateau merging.
inline std::vector<std::size_t> local_minima(const std::vector<double>& v) {
  std::vector<std::size_t> out;
  const std::size_t n = v.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    // plateau [i, j]
    std::size_t j = i;
    while (j + 1 < n && v[j + 1] == v[i]) ++j;
    if (j + 1 < n && v[i - 1] > v[i] && v[j + 1] > v[j]) out.push_back(i);
    i = j + 1;
  }
  return out;
}

}  // namespace detail

// Evaluate the FWI/AWI/MSWI objectives along a one-parameter model family.
inline ScanResult objective_scan(const Scenario& sc, ScanParameter which,
                                 const std::vector<double>& grid, double lambda,
                                 double r = -1.0) {
  const Wavelet w1 = sc.mother();
  if (r <= 0.0) r = default_r(sc, w1);
  const double sigma = r * lambda;
  const TimeAxis axis = sc.axis();
  const double lag_half = sc.resolved_lag_half(w1);
  const Wavelet w = scale_wavelet(w1, lambda);

  GatherOptions opts;
  opts.remainder = sc.remainder;
  opts.amplitude_model = sc.amp_model;
  const Gather obs = model_gather(sc.medium_star, sc.geometry, w, axis, opts);

  ScanResult res;
  res.parameters = grid;
  for (double v : grid) {
    const MediumModel m = with_parameter(sc.medium, which, v);
    const Gather pred = model_gather(m, sc.geometry, w, axis, opts);
    res.j_fwi.push_back(j_fwi(pred, obs).total);
    res.j_awi.push_back(j_awi(pred, obs, sigma, lag_half).total);
    res.j_mswi.push_back(j_mswi(pred, obs, sigma, lag_half).total);
  }
  res.minima_fwi = detail::local_minima(res.j_fwi);
  res.minima_awi = detail::local_minima(res.j_awi);
  res.minima_mswi = detail::local_minima(res.j_mswi);
  return res;
}

enum class ObjectiveKind { fwi, awi, mswi };

inline ObjectiveKind objective_kind_from_string(const std::string& s) {
  if (s == "fwi") return ObjectiveKind::fwi;
  if (s == "awi") return ObjectiveKind::awi;
  if (s == "mswi") return ObjectiveKind::mswi;
  throw std::invalid_argument("unknown objective kind: " + s);
}

struct DescentOptions {
  std::size_t max_iters = 50;
  double grad_step = 0.0;    // finite-difference step; 0: 1e-4 * |start|
  double initial_frac = 5e-3;  // first trial step as a fraction of |start|
  double grad_tol = 1e-7;
  double min_step_frac = 1e-8;
};

struct DescentTrajectory {
  std::vector<double> parameters;
  std::vector<double> values;
  bool converged = false;
  bool aborted = false;  // non-finite objective encountered
};

// Fixed-step gradient descent with backtracking on the one-parameter family.
inline DescentTrajectory local_descent(ObjectiveKind kind, const Scenario& sc,
                                       ScanParameter which, double start,
                                       double lambda, double r = -1.0,
                                       DescentOptions opt = {}) {
  const Wavelet w1 = sc.mother();
  if (r <= 0.0) r = default_r(sc, w1);
  const double sigma = r * lambda;
  const TimeAxis axis = sc.axis();
  const double lag_half = sc.resolved_lag_half(w1);
  const Wavelet w = scale_wavelet(w1, lambda);

  GatherOptions opts;
  opts.remainder = sc.remainder;
  opts.amplitude_model = sc.amp_model;
  const Gather obs = model_gather(sc.medium_star, sc.geometry, w, axis, opts);

  auto objective = [&](double p) -> double {
    const MediumModel m = with_parameter(sc.medium, which, p);
    const Gather pred = model_gather(m, sc.geometry, w, axis, opts);
    switch (kind) {
      case ObjectiveKind::fwi:
        return j_fwi(pred, obs).total;
      case ObjectiveKind::awi:
        return j_awi(pred, obs, sigma, lag_half).total;
      case ObjectiveKind::mswi:
        return j_mswi(pred, obs, sigma, lag_half).total;
    }
    return 0.0;
  };

  const double h = opt.grad_step > 0.0 ? opt.grad_step : 1e-4 * std::fabs(start);
  DescentTrajectory traj;
  double x = start;
  double jx = objective(x);
  traj.parameters.push_back(x);
  traj.values.push_back(jx);

  for (std::size_t it = 0; it < opt.max_iters; ++it) {
    if (!std::isfinite(jx)) {
      traj.aborted = true;
      return traj;
    }
    const double g = (objective(x + h) - objective(x - h)) / (2.0 * h);
    if (std::fabs(g) < opt.grad_tol) {
      traj.converged = true;
      return traj;
    }
    double step = opt.initial_frac * std::fabs(start) / std::fabs(g);
    bool moved = false;
    while (step * std::fabs(g) > opt.min_step_frac * std::fabs(start)) {
      const double xn = x - step * g;
      const double jn = objective(xn);
      if (std::isfinite(jn) && jn < jx) {
        x = xn;
        jx = jn;
        moved = true;
        break;
      }
      step *= 0.5;
    }
    traj.parameters.push_back(x);
    traj.values.push_back(jx);
    if (!moved) {
      traj.converged = true;
      return traj;
    }
  }
  return traj;
}

// Two-arrival counterexample: with matching first arrivals and mismatched
// second arrivals, the AWI value keeps a floor and the filter grows side
// lobes at the cross travel-time differences.
struct MultiArrivalScenario {
  ArrivalSet predicted;
  ArrivalSet observed;
  WaveletKind kind = WaveletKind::ricker;
  double dt = 1e-3;
  double t0 = 0.0;
  double t_max = 8.0;
  double mother_half_support = 6.0;
  double lag_half = 4.0;
};

inline SweepTable multi_arrival_demo(const MultiArrivalScenario& ms,
                                     const std::vector<double>& lambdas,
                                     double r = -1.0) {
  ms.predicted.validate();
  ms.observed.validate();
  const Wavelet w1 = make_mother_wavelet(ms.kind, ms.dt, ms.mother_half_support);
  if (r <= 0.0) {
    const Spectrum s = analyze(w1.trace, next_pow2(2 * w1.trace.size()));
    double peak = 0.0;
    for (const auto& c : s.coeff) peak = std::max(peak, std::norm(c));
    const double a0 = ms.predicted.sorted().arrivals.front().amplitude;
    r = 1e-2 * a0 * a0 * peak;
  }
  const std::size_t n =
      static_cast<std::size_t>(std::llround((ms.t_max - ms.t0) / ms.dt)) + 1;
  const TimeAxis axis{n, ms.dt, ms.t0};

  SweepTable t;
  t.sweep_name = "lambda";
  t.columns = {"j_awi", "lobe1_lag", "lobe2_lag", "lobe3_lag", "main_lag"};
  t.annotations["r"] = r;

  for (double lambda : lambdas) {
    const double sigma = r * lambda;
    const Wavelet w = scale_wavelet(w1, lambda);
    const Trace pred = multi_arrival_trace(ms.predicted, w, axis);
    const Trace obs = multi_arrival_trace(ms.observed, w, axis);
    const MatchingFilter u = solve_filter(pred, obs, sigma, ms.lag_half);
    const FilterDiagnostics diag = filter_diagnostics(u, pred, obs);

    // Peak picking on the analytic-signal envelope: caustic-rotated lobes are
    // odd about their arrival lag, but the envelope is even about it, so
    // envelope maxima sit on the arrival-time differences to sample accuracy.
    const Trace& ut = u.trace;
    const Trace hu = hilbert_power(ut, 1);
    std::vector<double> env(ut.size());
    for (std::size_t i = 0; i < ut.size(); ++i)
      env[i] = std::hypot(ut.samples[i], hu.samples[i]);
    const double excl = 3.0 * lambda * pulse_width(w1.trace);
    std::vector<std::size_t> taken;
    auto next_peak = [&]() -> std::size_t {
      std::size_t best = 0;
      double best_v = -1.0;
      for (std::size_t i = 1; i + 1 < env.size(); ++i) {
        if (!(env[i] >= env[i - 1] && env[i] >= env[i + 1])) continue;
        bool blocked = false;
        for (std::size_t k : taken)
          if (std::fabs(ut.time(i) - ut.time(k)) < excl) blocked = true;
        if (!blocked && env[i] > best_v) {
          best_v = env[i];
          best = i;
        }
      }
      taken.push_back(best);
      return best;
    };
    const std::size_t main_idx = next_peak();
    const std::size_t lobe1 = next_peak();
    const std::size_t lobe2 = next_peak();
    const std::size_t lobe3 = next_peak();
    t.add_row(lambda, {diag.ratio * diag.ratio, ut.time(lobe1), ut.time(lobe2),
                       ut.time(lobe3), ut.time(main_idx)});
  }
  return t;
}

}  // namespace awi

#endif  // AWI_EXPERIMENTS_HPP
