#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "awi/objectives.hpp"

using namespace awi;

namespace {

const double kDt = 1.0 / 256.0;

Wavelet mother() { return make_mother_wavelet(WaveletKind::ricker, kDt, 5.0); }

// Narrow enough that the deconvolution kernel's zero-mean spectral tails die
// well inside every lag window used here (see the filter tests).
Wavelet narrow_wavelet() { return scale_wavelet(mother(), 1.0 / 16.0); }

TimeAxis data_axis() { return TimeAxis{2048, kDt, -2.0}; }  // [-2, 6)

Gather single(const Trace& t) {
  Gather g;
  g.axis = TimeAxis{t.size(), t.dt, t.t0};
  g.traces.emplace(0, t);
  return g;
}

double peak_power(const Wavelet& w) {
  const Spectrum s = analyze(w.trace, next_pow2(2 * w.trace.size()));
  double p = 0.0;
  for (const auto& c : s.coeff) p = std::max(p, std::norm(c));
  return p;
}

// Closed-form regularized-misfit value sum_k (dw/2pi) sigma |d_hat|^2 /
// (|p_hat|^2 + sigma), the minimum of ||Su - d||^2 + sigma ||u||^2.
double jtilde_closed_form(const Trace& p, const Trace& d, double sigma) {
  const std::size_t nfft = detail::filter_nfft(p.size(), d.size());
  const Spectrum sp = analyze(p, nfft);
  const Spectrum sd = analyze(d, nfft);
  double v = 0.0;
  for (std::size_t k = 0; k < nfft; ++k)
    v += sigma * std::norm(sd.coeff[k]) / (std::norm(sp.coeff[k]) + sigma);
  return v * sp.domega / (2.0 * kPi);
}

// The quadratic ||Su - d||^2 + sigma ||u||^2 for an arbitrary lag-domain u.
double quadratic_at(const Trace& p, const Trace& d, double sigma, const Trace& u) {
  const std::size_t nfft = next_pow2(p.size() + d.size() + u.size());
  Spectrum sp = analyze(p, nfft);
  const Spectrum sd = analyze(d, nfft);
  const Spectrum sf = analyze(u, nfft);
  double mis = 0.0;
  for (std::size_t k = 0; k < nfft; ++k)
    mis += std::norm(sp.coeff[k] * sf.coeff[k] - sd.coeff[k]);
  return mis * sp.domega / (2.0 * kPi) + sigma * norm2_sq(u);
}

}  // namespace

TEST_CASE("objective totals equal the per-trace sums") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  Gather pred, obs;
  pred.axis = obs.axis = axis;
  for (int id = 0; id < 3; ++id) {
    pred.traces.emplace(id, leading_term_trace(1.0 + 0.1 * id, 1.0 + 0.2 * id, w, axis));
    obs.traces.emplace(id, leading_term_trace(0.9, 1.1 + 0.2 * id, w, axis));
  }
  const double sigma = 1e-3;
  for (const ObjectiveReport& rep :
       {j_fwi(pred, obs), j_awi(pred, obs, sigma), j_mswi(pred, obs, sigma)}) {
    double s = 0.0;
    for (const auto& [id, e] : rep.per_trace) s += e.value;
    CHECK(std::fabs(rep.total - s) <= 1e-12 * std::fabs(rep.total));
    CHECK(rep.per_trace.size() == 3);
  }
}

TEST_CASE("pair-set mismatches are rejected") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  Gather pred, obs;
  pred.axis = obs.axis = axis;
  pred.traces.emplace(0, leading_term_trace(1.0, 1.0, w, axis));
  obs.traces.emplace(1, leading_term_trace(1.0, 1.0, w, axis));
  CHECK_THROWS_AS(j_fwi(pred, obs), std::invalid_argument);
  obs.traces.clear();
  obs.traces.emplace(0, leading_term_trace(1.0, 1.0, w, axis));
  obs.traces.emplace(1, leading_term_trace(1.0, 1.0, w, axis));
  CHECK_THROWS_AS(j_awi(pred, obs, 1e-3), std::invalid_argument);
}

TEST_CASE("least-squares misfit basics") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(0.8, 1.0, w, axis);
  CHECK(j_fwi(single(p), single(p)).total == 0.0);
  CHECK(j_fwi(single(p), single(Trace(axis))).total ==
        doctest::Approx(0.5 * norm2_sq(p)).epsilon(1e-12));
}

TEST_CASE("half-cycle shifts cost more than full-cycle shifts") {
  const Wavelet w = scale_wavelet(mother(), 0.25);
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(1.0, 2.0, w, axis);

  // brute-force autocorrelation of the wavelet on the lag grid
  auto autocorr = [&](long m) {
    const Trace& x = w.trace;
    double s = 0.0;
    for (long i = 0; i < static_cast<long>(x.size()); ++i) {
      const long j = i + m;
      if (j >= 0 && j < static_cast<long>(x.size()))
        s += x.samples[static_cast<std::size_t>(i)] * x.samples[static_cast<std::size_t>(j)];
    }
    return s * x.dt;
  };

  // first minimum (half-cycle skip) and the following maximum (full cycle)
  long m_half = 1;
  while (autocorr(m_half + 1) < autocorr(m_half)) ++m_half;
  long m_full = m_half + 1;
  while (autocorr(m_full + 1) > autocorr(m_full)) ++m_full;
  REQUIRE(autocorr(m_half) < 0.0);
  REQUIRE(autocorr(m_full) > 0.0);

  const double e = norm2_sq(w.trace);
  for (long m : {m_half, m_full}) {
    const double shift = static_cast<double>(m) * kDt;
    const Trace d = leading_term_trace(1.0, 2.0 + shift, w, axis);
    const double expect = e - autocorr(m);  // 1/2 ||p - d||^2 for unit norms
    CHECK(j_fwi(single(p), single(d)).total == doctest::Approx(expect).epsilon(1e-8));
  }
  const Trace d_half =
      leading_term_trace(1.0, 2.0 + static_cast<double>(m_half) * kDt, w, axis);
  const Trace d_full =
      leading_term_trace(1.0, 2.0 + static_cast<double>(m_full) * kDt, w, axis);
  CHECK(j_fwi(single(p), single(d_half)).total > j_fwi(single(p), single(d_full)).total);
}

TEST_CASE("normalized dispersion reproduces the kernel-width-plus-shift identity") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const double a = 0.7, sigma = 1e-3;
  const Trace p = leading_term_trace(a, 1.0, w, axis);

  const std::size_t nfft = detail::filter_nfft(p.size(), p.size());
  const Trace g = g_kernel(w, sigma / (a * a), 4.0, nfft);
  const double l_sq = pulse_width(g) * pulse_width(g);

  // matched data: value = l(g)^2 exactly, strictly positive floor
  const ObjectiveReport matched = j_awi(single(p), single(p), sigma, 4.0);
  CHECK(std::fabs(matched.total - l_sq) <= 1e-6 * l_sq);
  CHECK(matched.total >= 0.99 * l_sq);

  // shifted data: value = l(g)^2 + dtau^2, exact, not asymptotic
  for (double dtau : {0.05, 0.1, 0.25}) {
    const Trace d = leading_term_trace(0.5, 1.0 + dtau, w, axis);
    const ObjectiveReport rep = j_awi(single(p), single(d), sigma, 4.0);
    const double expect = l_sq + dtau * dtau;
    CHECK(std::fabs(rep.total - expect) <= 1e-6 * expect);
    CHECK(rep.per_trace.at(0).ratio ==
          doctest::Approx(std::sqrt(expect)).epsilon(1e-6));
  }
}

TEST_CASE("normalized dispersion ignores observed-data scaling") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(1.0, 1.0, w, axis);
  Trace d = leading_term_trace(0.6, 1.2, w, axis);
  const double v1 = j_awi(single(p), single(d), 1e-3, 4.0).total;
  for (double& v : d.samples) v *= 10.0;
  const double v2 = j_awi(single(p), single(d), 1e-3, 4.0).total;
  CHECK(std::fabs(v1 - v2) <= 1e-12 * v1);
}

TEST_CASE("zero observed traces are reported by pair id") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  Gather pred, obs;
  pred.axis = obs.axis = axis;
  pred.traces.emplace(7, leading_term_trace(1.0, 1.0, w, axis));
  obs.traces.emplace(7, Trace(axis));
  for (auto fn : {j_awi, j_mswi}) {
    try {
      fn(pred, obs, 1e-3, -1.0);
      FAIL("expected zero_trace_error");
    } catch (const zero_trace_error& e) {
      CHECK(std::string(e.what()).find("id=7") != std::string::npos);
    }
  }
}

TEST_CASE("unnormalized dispersion scales quadratically with the data") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(1.0, 1.0, w, axis);
  Trace d = leading_term_trace(0.6, 1.2, w, axis);
  const double v1 = j_mswi(single(p), single(d), 1e-3, 4.0).total;
  CHECK(v1 > 0.0);
  for (double& v : d.samples) v *= 2.0;  // exact in floating point
  const double v2 = j_mswi(single(p), single(d), 1e-3, 4.0).total;
  CHECK(v2 == doctest::Approx(4.0 * v1).epsilon(1e-12));
}

TEST_CASE("wavelength-scaled dispersion approaches the weighted travel-time misfit") {
  const double dt = 1.0 / 512.0;
  const Wavelet w1 = make_mother_wavelet(WaveletKind::ricker, dt, 5.0);
  const MediumModel m = MediumModel::constant(2000.0);
  const MediumModel m_star = MediumModel::constant(2100.0);
  Geometry geom;
  for (int i = 0; i < 4; ++i)
    geom.add(i, {0.0, 0.0}, {14000.0 + 2000.0 * static_cast<double>(i), 0.0});

  const double r = 1e-2 * peak_power(w1);
  const double lambda = 1.0 / 32.0;
  const double sigma = r * lambda;
  const Wavelet w = scale_wavelet(w1, lambda);
  const TimeAxis axis{10241, dt, 0.0};  // [0, 20]

  const Gather pred = model_gather(m, geom, w, axis);
  const Gather obs = model_gather(m_star, geom, w, axis);
  const double lag_half = 2.0;
  const double lhs = lambda * j_mswi(pred, obs, sigma, lag_half).total;
  const double rhs = weighted_tt_misfit(m, m_star, geom, w1, r);
  CHECK(std::fabs(lhs - rhs) <= 0.05 * rhs);
}

TEST_CASE("regularized misfit: limits, bound, and optimality") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(0.8, 1.0, w, axis);
  const Trace d = leading_term_trace(0.5, 1.3, w, axis);

  // matched data, sigma -> 0: value -> 0, decreasing
  double prev = 1e30;
  for (double sigma : {1e-2, 1e-4, 1e-6}) {
    const double v = j_tilde(single(p), single(p), sigma);
    CHECK(v < prev);
    prev = v;
  }
  CHECK(prev < 1e-3 * norm2_sq(p));

  // projection bound: value <= ||d||^2 for any pair and sigma
  for (double sigma : {1e-1, 1e-3, 1e-6})
    CHECK(j_tilde(single(p), single(d), sigma) <= norm2_sq(d));

  // agreement with the spectral closed form of the minimum
  const double sigma = 1e-3;
  const double jt = j_tilde(single(p), single(d), sigma);
  CHECK(jt == doctest::Approx(jtilde_closed_form(p, d, sigma)).epsilon(1e-8));

  // optimality: perturbing the minimizer increases the quadratic
  const MatchingFilter u = solve_filter(p, d, sigma);
  const double q0 = quadratic_at(p, d, sigma, u.trace);
  CHECK(q0 == doctest::Approx(jt).epsilon(1e-8));
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double scale = 1e-3 * norm2(u.trace) / std::sqrt(static_cast<double>(u.trace.size()));
  for (int trial = 0; trial < 10; ++trial) {
    Trace up = u.trace;
    for (double& v : up.samples) v += scale * normal(rng);
    CHECK(quadratic_at(p, d, sigma, up) > q0);
  }
}

TEST_CASE("penalty objectives reduce to the regularized misfit at zero weight") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(0.8, 1.0, w, axis);
  const Trace d = leading_term_trace(0.5, 1.3, w, axis);
  const double sigma = 1e-3;
  const double jt = jtilde_closed_form(p, d, sigma);
  CHECK(j_penalty_mswi(single(p), single(d), sigma, 0.0, 0.1) ==
        doctest::Approx(0.5 * jt).epsilon(1e-8));
  CHECK(j_penalty_awi(single(p), single(d), sigma, 0.0, 0.1) ==
        doctest::Approx(jt).epsilon(1e-8));
  CHECK_THROWS_AS(j_penalty_mswi(single(p), single(d), 0.0, 0.1, 0.1),
                  std::invalid_argument);
  CHECK_THROWS_AS(j_penalty_mswi(single(p), single(d), sigma, -1.0, 0.1),
                  std::invalid_argument);
}

TEST_CASE("a dominant penalty forces the filter to zero") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  // disjoint supports: the single surviving lag (t = 0) carries no correlation
  const Trace p = leading_term_trace(0.8, 1.0, w, axis);
  const Trace d = leading_term_trace(0.5, 2.5, w, axis);
  const double sigma = 0.1, alpha = 100.0, eps = 1.0;
  const double v = j_penalty_mswi(single(p), single(d), sigma, alpha, eps);
  const double half_dd = 0.5 * norm2_sq(d);
  CHECK(v <= half_dd * (1.0 + 1e-12));
  CHECK(v >= half_dd * (1.0 - 1e-3));
}

TEST_CASE("penalty quadratic quotients reach their predicted limits") {
  const Wavelet w = narrow_wavelet();
  const TimeAxis axis = data_axis();
  const Trace p = leading_term_trace(0.8, 1.0, w, axis);
  const Trace d = leading_term_trace(0.5, 1.3, w, axis);
  const double sigma = 1e-3, eps = 0.01, alpha = 1e-3;

  const double j0_m = j_penalty_mswi(single(p), single(d), sigma, 0.0, eps);
  const double ja_m = j_penalty_mswi(single(p), single(d), sigma, alpha, eps);
  const double target_m =
      0.5 * awi::detail::penalty_solve(p, d, sigma, 0.0, eps, false).t_eps_term;
  CHECK(std::fabs((ja_m - j0_m) / (alpha * alpha) - target_m) <= 0.01 * target_m);

  const double j0_a = j_penalty_awi(single(p), single(d), sigma, 0.0, eps);
  const double ja_a = j_penalty_awi(single(p), single(d), sigma, alpha, eps);
  const double quot_a = (ja_a - j0_a) / (alpha * alpha);
  const double target_a = j_awi(single(p), single(d), sigma, 4.0).total;
  CHECK(std::fabs(quot_a - target_a) <= 0.01 * target_a);

  // weight invariance: scaling the data leaves the normalized limit unchanged
  // up to the O(alpha^2) finite-alpha correction, which differs between the
  // scaled problems
  Trace d2 = d;
  for (double& v : d2.samples) v *= 2.0;
  const double j0_a2 = j_penalty_awi(single(p), single(d2), sigma, 0.0, eps);
  const double ja_a2 = j_penalty_awi(single(p), single(d2), sigma, alpha, eps);
  const double quot_a2 = (ja_a2 - j0_a2) / (alpha * alpha);
  CHECK(std::fabs(quot_a2 - quot_a) <= 1e-4 * quot_a);
}

TEST_CASE("travel-time misfit closed forms") {
  const MediumModel m = MediumModel::constant(2000.0);
  const MediumModel m_star = MediumModel::constant(2100.0);
  Geometry geom;
  geom.add(0, {0.0, 0.0}, {14000.0, 0.0});
  geom.add(1, {0.0, 0.0}, {20000.0, 0.0});

  CHECK(travel_time_misfit(m, m, geom) == 0.0);
  double expect = 0.0;
  for (const auto& pr : geom.pairs) {
    const double e = distance(pr.source, pr.receiver) * (1.0 / 2000.0 - 1.0 / 2100.0);
    expect += e * e;
  }
  CHECK(travel_time_misfit(m, m_star, geom) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("grid travel times track the analytic misfit within the solver tolerance") {
  VelocityGrid g;
  g.nx = g.nz = 101;
  g.spacing = 100.0;
  g.origin = {0.0, 0.0};
  g.velocity.assign(g.nx * g.nz, 2000.0);
  const MediumModel grid_m = MediumModel::gridded(g);
  const MediumModel exact_m = MediumModel::constant(2000.0);
  Geometry geom;
  geom.add(0, {1000.0, 1000.0}, {9000.0, 8000.0});
  geom.add(1, {1000.0, 1000.0}, {8000.0, 9000.0});

  // identical continuum medium: misfit is pure eikonal error, <= (1% tau)^2
  const double mis = travel_time_misfit(grid_m, exact_m, geom);
  double bound = 0.0;
  for (const auto& pr : geom.pairs) {
    const double tau = travel_time(exact_m, pr.source, pr.receiver);
    bound += (0.01 * tau) * (0.01 * tau);
  }
  CHECK(mis <= bound);
}

TEST_CASE("weighted travel-time misfit reductions") {
  const double dt = 1.0 / 512.0;
  const Wavelet w1 = make_mother_wavelet(WaveletKind::ricker, dt, 5.0);
  const MediumModel m = MediumModel::constant(2000.0);
  const MediumModel m_star = MediumModel::constant(2100.0);
  Geometry geom;
  for (int i = 0; i < 4; ++i)
    geom.add(i, {0.0, 0.0}, {14000.0 + 2000.0 * static_cast<double>(i), 0.0});
  const double r = 1e-2 * peak_power(w1);

  // unit amplitudes: every pair shares the same weight ||g||^2
  const double g_sq = norm2_sq(g_kernel(w1, r));
  const double expect = g_sq * travel_time_misfit(m, m_star, geom);
  const double got = weighted_tt_misfit(m, m_star, geom, w1, r);
  CHECK(got == doctest::Approx(expect).epsilon(1e-12));

  CHECK_THROWS_AS(
      weighted_tt_misfit(m, m_star, geom, scale_wavelet(w1, 0.5), r),
      std::invalid_argument);
}
