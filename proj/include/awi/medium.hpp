#ifndef AWI_MEDIUM_HPP
#define AWI_MEDIUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace awi {

inline constexpr double kFourPi = 4.0 * 3.14159265358979323846;

struct Vec2 {
  double x = 0.0;
  double z = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.z - b.z);
}

enum class GradientAxis { x, z };

// 2D gridded velocity field, row-major with x fastest.
struct VelocityGrid {
  std::size_t nx = 0;
  std::size_t nz = 0;
  double spacing = 0.0;  // m, same in both directions
  Vec2 origin;
  std::vector<double> velocity;  // m/s, size nx*nz
  double c_min = 0.0;
  double c_max = 0.0;

  double at(std::size_t i, std::size_t j) const { return velocity[j * nx + i]; }
  double x_max() const { return origin.x + spacing * static_cast<double>(nx - 1); }
  double z_max() const { return origin.z + spacing * static_cast<double>(nz - 1); }

  bool contains(const Vec2& p) const {
    return p.x >= origin.x && p.x <= x_max() && p.z >= origin.z && p.z <= z_max();
  }

  double sample(const Vec2& p) const {
    if (!contains(p)) throw std::domain_error("VelocityGrid: point outside grid");
    const double fx = (p.x - origin.x) / spacing;
    const double fz = (p.z - origin.z) / spacing;
    std::size_t i = std::min(static_cast<std::size_t>(fx), nx - 2);
    std::size_t j = std::min(static_cast<std::size_t>(fz), nz - 2);
    const double ax = fx - static_cast<double>(i);
    const double az = fz - static_cast<double>(j);
    return (1 - ax) * (1 - az) * at(i, j) + ax * (1 - az) * at(i + 1, j) +
           (1 - ax) * az * at(i, j + 1) + ax * az * at(i + 1, j + 1);
  }
};

// Velocity model: constant, linear vertical/horizontal gradient, or gridded.
// Density is spatially homogeneous.
struct MediumModel {
  enum class Kind { constant, linear_gradient, grid };
  Kind kind = Kind::constant;

  double c = 0.0;              // constant: velocity
  double c0 = 0.0;             // gradient: velocity at origin coordinate 0
  double g = 0.0;              // gradient: 1/s
  GradientAxis axis = GradientAxis::z;
  VelocityGrid grid;

  double rho = 1.0;
  double log_amp_bound = 20.0;  // A: clamp |log a| < A

  static MediumModel constant(double c, double rho = 1.0) {
    if (!(c > 0.0) || !std::isfinite(c))
      throw std::invalid_argument("MediumModel: velocity must be positive finite");
    MediumModel m;
    m.kind = Kind::constant;
    m.c = c;
    m.rho = rho;
    return m;
  }

  static MediumModel linear_gradient(double c0, double g,
                                     GradientAxis axis = GradientAxis::z,
                                     double rho = 1.0) {
    if (!(c0 > 0.0) || !std::isfinite(c0) || !std::isfinite(g))
      throw std::invalid_argument("MediumModel: invalid gradient parameters");
    MediumModel m;
    m.kind = Kind::linear_gradient;
    m.c0 = c0;
    m.g = g;
    m.axis = axis;
    m.rho = rho;
    return m;
  }

  static MediumModel gridded(VelocityGrid grid, double rho = 1.0) {
    if (grid.nx < 2 || grid.nz < 2 || grid.spacing <= 0.0)
      throw std::invalid_argument("MediumModel: degenerate grid");
    if (grid.velocity.size() != grid.nx * grid.nz)
      throw std::invalid_argument("MediumModel: grid size mismatch");
    double cmin = grid.velocity[0], cmax = grid.velocity[0];
    for (double v : grid.velocity) {
      if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument("MediumModel: grid velocities must be positive finite");
      cmin = std::min(cmin, v);
      cmax = std::max(cmax, v);
    }
    MediumModel m;
    m.kind = Kind::grid;
    m.grid = std::move(grid);
    m.grid.c_min = cmin;
    m.grid.c_max = cmax;
    m.rho = rho;
    return m;
  }

  double velocity_at(const Vec2& p) const {
    switch (kind) {
      case Kind::constant:
        return c;
      case Kind::linear_gradient:
        return c0 + g * (axis == GradientAxis::z ? p.z : p.x);
      case Kind::grid:
        return grid.sample(p);
    }
    return 0.0;
  }
};

// Finite list of source-receiver pairs, none co-located.
struct Geometry {
  struct Pair {
    int id = 0;
    Vec2 source;
    Vec2 receiver;
  };
  std::vector<Pair> pairs;

  void add(int id, Vec2 source, Vec2 receiver) {
    if (distance(source, receiver) <= 0.0)
      throw std::invalid_argument("Geometry: co-located source-receiver pair id=" +
                                  std::to_string(id));
    pairs.push_back({id, source, receiver});
  }
};

// First-arrival travel times on the medium grid from a single source.
struct TravelTimeField {
  std::size_t nx = 0;
  std::size_t nz = 0;
  double spacing = 0.0;
  Vec2 origin;
  Vec2 source;
  std::vector<double> times;  // seconds, row-major, x fastest

  double at(std::size_t i, std::size_t j) const { return times[j * nx + i]; }

  double interpolate(const Vec2& p) const {
    const double xm = origin.x + spacing * static_cast<double>(nx - 1);
    const double zm = origin.z + spacing * static_cast<double>(nz - 1);
    if (p.x < origin.x || p.x > xm || p.z < origin.z || p.z > zm)
      throw std::domain_error("TravelTimeField: point outside grid");
    const double fx = (p.x - origin.x) / spacing;
    const double fz = (p.z - origin.z) / spacing;
    std::size_t i = std::min(static_cast<std::size_t>(fx), nx - 2);
    std::size_t j = std::min(static_cast<std::size_t>(fz), nz - 2);
    const double ax = fx - static_cast<double>(i);
    const double az = fz - static_cast<double>(j);
    return (1 - ax) * (1 - az) * at(i, j) + ax * (1 - az) * at(i + 1, j) +
           (1 - ax) * az * at(i, j + 1) + ax * az * at(i + 1, j + 1);
  }
};

namespace detail {

// First-order upwind Godunov fast sweeping for |grad tau| = 1/c, tau(xs) = 0,
// in factored form: tau = T0 + u with T0(x) = |x - xs| / c(xs) the analytic
// constant-velocity reference. The sweep updates u with one-sided differences
// while grad T0 enters exactly, which removes the point-source error that a
// plain first-order scheme cannot reduce under refinement. The 5x5 node
// neighborhood of the source is initialized with the two-point time of a
// locally fitted linear velocity (gradient estimated at the source by finite
// differences, exact for constant and linear media) and frozen.
inline TravelTimeField eikonal_sweep(const VelocityGrid& gr, const Vec2& xs) {
  const std::size_t nx = gr.nx, nz = gr.nz;
  const double h = gr.spacing;
  const double big = 1e30;

  TravelTimeField f;
  f.nx = nx;
  f.nz = nz;
  f.spacing = h;
  f.origin = gr.origin;
  f.source = xs;
  f.times.assign(nx * nz, big);
  std::vector<char> frozen(nx * nz, 0);

  const double c_src = gr.sample(xs);
  const long si = std::lround((xs.x - gr.origin.x) / h);
  const long sj = std::lround((xs.z - gr.origin.z) / h);
  // local velocity-gradient magnitude at the source node (one-sided at edges)
  auto dcd = [&](long i0, long i1, long j0, long j1, double span) {
    return (gr.at(static_cast<std::size_t>(i1), static_cast<std::size_t>(j1)) -
            gr.at(static_cast<std::size_t>(i0), static_cast<std::size_t>(j0))) /
           span;
  };
  const double gx = si > 0 && si + 1 < static_cast<long>(nx)
                        ? dcd(si - 1, si + 1, sj, sj, 2.0 * h)
                        : (si > 0 ? dcd(si - 1, si, sj, sj, h) : dcd(si, si + 1, sj, sj, h));
  const double gz = sj > 0 && sj + 1 < static_cast<long>(nz)
                        ? dcd(si, si, sj - 1, sj + 1, 2.0 * h)
                        : (sj > 0 ? dcd(si, si, sj - 1, sj, h) : dcd(si, si, sj, sj + 1, h));
  const double g_loc = std::hypot(gx, gz);

  // reference field and factored unknown u = tau - T0
  std::vector<double> t0(nx * nz);
  std::vector<double> u(nx * nz, big);
  auto node_pos = [&](std::size_t i, std::size_t j) {
    return Vec2{gr.origin.x + h * static_cast<double>(i),
                gr.origin.z + h * static_cast<double>(j)};
  };
  for (std::size_t j = 0; j < nz; ++j)
    for (std::size_t i = 0; i < nx; ++i)
      t0[j * nx + i] = distance(node_pos(i, j), xs) / c_src;

  for (long j = sj - 2; j <= sj + 2; ++j) {
    for (long i = si - 2; i <= si + 2; ++i) {
      if (i < 0 || j < 0 || i >= static_cast<long>(nx) || j >= static_cast<long>(nz))
        continue;
      const std::size_t ii = static_cast<std::size_t>(i);
      const std::size_t jj = static_cast<std::size_t>(j);
      const std::size_t idx = jj * nx + ii;
      const double d = distance(node_pos(ii, jj), xs);
      const double c_node = gr.at(ii, jj);
      const double arg = g_loc * g_loc * d * d / (2.0 * c_src * c_node);
      const double t_init = arg > 1e-12 ? std::acosh(1.0 + arg) / g_loc
                                        : d / std::sqrt(c_src * c_node);
      u[idx] = t_init - t0[idx];
      frozen[idx] = 1;
    }
  }

  // Godunov update for u at one node: per axis pick the neighbor with the
  // smaller total time, difference u one-sidedly, and use the exact reference
  // gradient. The two-sided quadratic root is accepted only when both upwind
  // sign conditions hold; one-sided candidates cover the remaining cases.
  auto update = [&](std::size_t i, std::size_t j) -> double {
    const std::size_t idx = j * nx + i;
    const Vec2 p = node_pos(i, j);
    const double d = distance(p, xs);
    const double t0x = (p.x - xs.x) / (d * c_src);
    const double t0z = (p.z - xs.z) / (d * c_src);
    const double s = 1.0 / gr.at(i, j);

    const double tW = i > 0 ? t0[idx - 1] + u[idx - 1] : big;
    const double tE = i + 1 < nx ? t0[idx + 1] + u[idx + 1] : big;
    const double tS = j > 0 ? t0[idx - nx] + u[idx - nx] : big;
    const double tN = j + 1 < nz ? t0[idx + nx] + u[idx + nx] : big;

    const bool x_active = std::min(tW, tE) < 0.5 * big;
    const bool z_active = std::min(tS, tN) < 0.5 * big;
    const double sx = tW <= tE ? 1.0 : -1.0;
    const double sz = tS <= tN ? 1.0 : -1.0;
    const double ux = sx > 0 ? (i > 0 ? u[idx - 1] : big) : u[idx + 1];
    const double uz = sz > 0 ? (j > 0 ? u[idx - nx] : big) : u[idx + nx];

    double best = big;
    if (x_active) best = std::min(best, ux + h * (s - sx * t0x));
    if (z_active) best = std::min(best, uz + h * (s - sz * t0z));
    if (x_active && z_active) {
      const double alpha = sx / h, beta = sz / h;
      const double P = t0x - alpha * ux, Q = t0z - beta * uz;
      const double A = alpha * alpha + beta * beta;
      const double B = 2.0 * (alpha * P + beta * Q);
      const double C = P * P + Q * Q - s * s;
      const double disc = B * B - 4.0 * A * C;
      if (disc >= 0.0) {
        const double cand = (-B + std::sqrt(disc)) / (2.0 * A);
        const double tx = alpha * cand + P;
        const double tz = beta * cand + Q;
        if (sx * tx >= 0.0 && sz * tz >= 0.0) best = std::min(best, cand);
      }
    }
    return best;
  };

  const double tol = 1e-9;
  for (int cycle = 0; cycle < 1000; ++cycle) {
    double max_change = 0.0;
    for (int sweep = 0; sweep < 4; ++sweep) {
      const bool xf = (sweep & 1) == 0;
      const bool zf = (sweep & 2) == 0;
      for (std::size_t jj = 0; jj < nz; ++jj) {
        const std::size_t j = zf ? jj : nz - 1 - jj;
        for (std::size_t ii = 0; ii < nx; ++ii) {
          const std::size_t i = xf ? ii : nx - 1 - ii;
          const std::size_t idx = j * nx + i;
          if (frozen[idx]) continue;
          const double t = update(i, j);
          if (t < u[idx]) {
            max_change = std::max(max_change, u[idx] - t);
            u[idx] = t;
          }
        }
      }
    }
    if (max_change < tol) break;
  }

  for (std::size_t idx = 0; idx < nx * nz; ++idx)
    f.times[idx] = std::max(0.0, t0[idx] + u[idx]);
  return f;
}

}  // namespace detail

// Travel-time field on the medium grid. The sweep runs on an internally
// refined grid (half spacing, velocities bilinearly interpolated, which is
// the continuum medium the grid defines) and samples back onto the input
// nodes; the extra resolution roughly halves the first-order sweep error.
inline TravelTimeField eikonal_solve(const MediumModel& medium, const Vec2& xs) {
  if (medium.kind != MediumModel::Kind::grid)
    throw std::invalid_argument("eikonal_solve: medium must be gridded");
  const VelocityGrid& gr = medium.grid;
  if (!gr.contains(xs)) throw std::domain_error("eikonal_solve: source outside grid");

  VelocityGrid fine;
  fine.nx = 2 * gr.nx - 1;
  fine.nz = 2 * gr.nz - 1;
  fine.spacing = 0.5 * gr.spacing;
  fine.origin = gr.origin;
  fine.velocity.resize(fine.nx * fine.nz);
  for (std::size_t j = 0; j < fine.nz; ++j)
    for (std::size_t i = 0; i < fine.nx; ++i)
      fine.velocity[j * fine.nx + i] =
          gr.sample({gr.origin.x + fine.spacing * static_cast<double>(i),
                     gr.origin.z + fine.spacing * static_cast<double>(j)});

  const TravelTimeField dense = detail::eikonal_sweep(fine, xs);

  TravelTimeField f;
  f.nx = gr.nx;
  f.nz = gr.nz;
  f.spacing = gr.spacing;
  f.origin = gr.origin;
  f.source = xs;
  f.times.resize(gr.nx * gr.nz);
  for (std::size_t j = 0; j < gr.nz; ++j)
    for (std::size_t i = 0; i < gr.nx; ++i)
      f.times[j * gr.nx + i] = dense.at(2 * i, 2 * j);
  return f;
}

// First-arrival travel time between two points. Analytic media use closed
// forms; grid media interpolate an eikonal solve bilinearly.
inline double travel_time(const MediumModel& medium, const Vec2& xs, const Vec2& xr) {
  const double dist = distance(xs, xr);
  if (dist <= 0.0) throw std::invalid_argument("travel_time: coincident points");
  switch (medium.kind) {
    case MediumModel::Kind::constant:
      return dist / medium.c;
    case MediumModel::Kind::linear_gradient: {
      if (medium.g == 0.0) return dist / medium.c0;
      const double cs = medium.velocity_at(xs);
      const double cr = medium.velocity_at(xr);
      if (cs <= 0.0 || cr <= 0.0)
        throw std::domain_error("travel_time: non-positive velocity on ray endpoints");
      const double arg = 1.0 + medium.g * medium.g * dist * dist / (2.0 * cs * cr);
      return std::acosh(arg) / std::fabs(medium.g);
    }
    case MediumModel::Kind::grid: {
      const TravelTimeField f = eikonal_solve(medium, xs);
      return f.interpolate(xr);
    }
  }
  return 0.0;
}

enum class AmplitudeModel { spherical, unit };

inline AmplitudeModel amplitude_model_from_string(const std::string& s) {
  if (s == "spherical") return AmplitudeModel::spherical;
  if (s == "unit") return AmplitudeModel::unit;
  throw std::invalid_argument("unknown amplitude model: " + s);
}

// Prescribed geometric amplitude, clamped so |log a| < log_amp_bound.
inline double amplitude(const MediumModel& medium, const Vec2& xs, const Vec2& xr,
                        AmplitudeModel model) {
  const double dist = distance(xs, xr);
  if (dist <= 0.0) throw std::invalid_argument("amplitude: coincident points");
  double a = 1.0;
  if (model == AmplitudeModel::spherical) a = 1.0 / (kFourPi * dist);
  const double A = medium.log_amp_bound;
  const double lo = std::exp(-A) * (1.0 + 1e-12);
  const double hi = std::exp(A) * (1.0 - 1e-12);
  return std::clamp(a, lo, hi);
}

}  // namespace awi

#endif  // AWI_MEDIUM_HPP
