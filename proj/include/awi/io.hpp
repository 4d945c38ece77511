#ifndef AWI_IO_HPP
#define AWI_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awi/experiments.hpp"
#include "awi/filter.hpp"
#include "awi/forward.hpp"
#include "awi/medium.hpp"
#include "awi/objectives.hpp"
#include "awi/trace.hpp"

namespace awi {

// Fixed-format numeric printing (12 significant digits) so reruns with the
// same inputs produce byte-identical files.
inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  return f;
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open for reading: " + path);
  return f;
}

inline std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  return out;
}

inline double to_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error("bad numeric field in " + what + ": '" + s + "'");
  }
}

}  // namespace detail

// --- trace: header `t,value` -------------------------------------------------

inline void write_trace_csv(const std::string& path, const Trace& tr) {
  auto f = detail::open_out(path);
  f << "t,value\n";
  for (std::size_t i = 0; i < tr.size(); ++i)
    f << fmt(tr.time(i)) << ',' << fmt(tr.samples[i]) << '\n';
}

inline Trace read_trace_csv(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("t,value", 0) != 0)
    throw std::runtime_error("trace file missing `t,value` header: " + path);
  std::vector<double> t, v;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto parts = detail::split_csv(line);
    if (parts.size() != 2) throw std::runtime_error("bad trace row in " + path);
    t.push_back(detail::to_double(parts[0], path));
    v.push_back(detail::to_double(parts[1], path));
  }
  if (t.size() < 2) throw std::runtime_error("trace file too short: " + path);
  Trace tr;
  tr.t0 = t.front();
  tr.dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
  tr.samples = std::move(v);
  return tr;
}

// --- medium grid: header `nx,nz,dx,origin_x,origin_z`, then row-major values -

inline void write_medium_csv(const std::string& path, const VelocityGrid& g) {
  auto f = detail::open_out(path);
  f << "nx,nz,dx,origin_x,origin_z\n";
  f << g.nx << ',' << g.nz << ',' << fmt(g.spacing) << ',' << fmt(g.origin.x)
    << ',' << fmt(g.origin.z) << '\n';
  for (std::size_t j = 0; j < g.nz; ++j) {
    for (std::size_t i = 0; i < g.nx; ++i) {
      f << fmt(g.at(i, j));
      f << (i + 1 < g.nx ? ',' : '\n');
    }
  }
}

inline VelocityGrid read_medium_csv(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("nx,nz,dx", 0) != 0)
    throw std::runtime_error("medium file missing header: " + path);
  if (!std::getline(f, line)) throw std::runtime_error("medium file truncated: " + path);
  const auto hdr = detail::split_csv(line);
  if (hdr.size() != 5) throw std::runtime_error("bad medium header row: " + path);
  VelocityGrid g;
  g.nx = static_cast<std::size_t>(detail::to_double(hdr[0], path));
  g.nz = static_cast<std::size_t>(detail::to_double(hdr[1], path));
  g.spacing = detail::to_double(hdr[2], path);
  g.origin = {detail::to_double(hdr[3], path), detail::to_double(hdr[4], path)};
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    for (const auto& s : detail::split_csv(line))
      g.velocity.push_back(detail::to_double(s, path));
  }
  if (g.velocity.size() != g.nx * g.nz)
    throw std::runtime_error("medium file value count mismatch: " + path);
  return g;
}

// --- geometry: header `src_x,src_z,rcv_x,rcv_z`, pair ids by row order -------

inline void write_geometry_csv(const std::string& path, const Geometry& geom) {
  auto f = detail::open_out(path);
  f << "src_x,src_z,rcv_x,rcv_z\n";
  for (const auto& p : geom.pairs)
    f << fmt(p.source.x) << ',' << fmt(p.source.z) << ',' << fmt(p.receiver.x)
      << ',' << fmt(p.receiver.z) << '\n';
}

inline Geometry read_geometry_csv(const std::string& path) {
  auto f = detail::open_in(path);
  std::string line;
  if (!std::getline(f, line) || line.rfind("src_x,src_z", 0) != 0)
    throw std::runtime_error("geometry file missing header: " + path);
  Geometry geom;
  int id = 0;
  while (std::getline(f, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto parts = detail::split_csv(line);
    if (parts.size() != 4) throw std::runtime_error("bad geometry row in " + path);
    geom.add(id++, {detail::to_double(parts[0], path), detail::to_double(parts[1], path)},
             {detail::to_double(parts[2], path), detail::to_double(parts[3], path)});
  }
  if (geom.pairs.empty()) throw std::runtime_error("geometry file has no pairs: " + path);
  return geom;
}

// --- gather: `pair_id,t,value` plus a `.meta` sidecar ------------------------

struct GatherMeta {
  double dt = 0.0;
  double t0 = 0.0;
  std::size_t n = 0;
  std::string wavelet_kind;
  double lambda = 0.0;
};

inline void write_gather_csv(const std::string& path, const Gather& g,
                             const GatherMeta& meta) {
  auto f = detail::open_out(path);
  f << "pair_id,t,value\n";
  for (const auto& [id, tr] : g.traces)
    for (std::size_t i = 0; i < tr.size(); ++i)
      f << id << ',' << fmt(tr.time(i)) << ',' << fmt(tr.samples[i]) << '\n';

  const std::string meta_path =
      std::filesystem::path(path).replace_extension(".meta").string();
  auto m = detail::open_out(meta_path);
  m << "dt = " << fmt(meta.dt) << '\n';
  m << "t0 = " << fmt(meta.t0) << '\n';
  m << "n = " << meta.n << '\n';
  m << "wavelet_kind = " << meta.wavelet_kind << '\n';
  m << "lambda = " << fmt(meta.lambda) << '\n';
}

// --- filter dump: `lag,value` plus diagnostics footer ------------------------

inline void write_filter_csv(const std::string& path, const MatchingFilter& u,
                             const FilterDiagnostics& d) {
  auto f = detail::open_out(path);
  f << "lag,value\n";
  for (std::size_t i = 0; i < u.trace.size(); ++i)
    f << fmt(u.trace.time(i)) << ',' << fmt(u.trace.samples[i]) << '\n';
  f << "# norm_u=" << fmt(d.norm_u) << ", norm_Tu=" << fmt(d.norm_Tu)
    << ", ratio=" << fmt(d.ratio) << ", residual_ratio=" << fmt(d.residual_ratio)
    << '\n';
}

// --- objective report: `pair_id,value,ratio,residual_ratio` + total footer ---

inline void write_objective_csv(const std::string& path, const ObjectiveReport& r) {
  auto f = detail::open_out(path);
  f << "pair_id,value,ratio,residual_ratio\n";
  for (const auto& [id, pt] : r.per_trace)
    f << id << ',' << fmt(pt.value) << ',' << fmt(pt.ratio) << ','
      << fmt(pt.residual_ratio) << '\n';
  f << "# total=" << fmt(r.total) << '\n';
}

// --- sweep table: sweep variable first, then measured columns, slope footers -

inline void write_sweep_csv(const std::string& path, const SweepTable& t) {
  auto f = detail::open_out(path);
  f << t.sweep_name;
  for (const auto& c : t.columns) f << ',' << c;
  f << '\n';
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    f << fmt(t.sweep_values[i]);
    for (double v : t.rows[i]) f << ',' << fmt(v);
    f << '\n';
  }
  for (const auto& [name, fit] : t.fitted)
    f << "# slope(" << name << ")=" << fmt(fit.slope) << ", r2=" << fmt(fit.r_squared)
      << '\n';
  for (const auto& [name, v] : t.annotations)
    f << "# " << name << "=" << fmt(v) << '\n';
}

// --- scan result -------------------------------------------------------------

inline void write_scan_csv(const std::string& path, const ScanResult& s) {
  auto f = detail::open_out(path);
  f << "parameter,j_fwi,j_awi,j_mswi\n";
  for (std::size_t i = 0; i < s.parameters.size(); ++i)
    f << fmt(s.parameters[i]) << ',' << fmt(s.j_fwi[i]) << ',' << fmt(s.j_awi[i])
      << ',' << fmt(s.j_mswi[i]) << '\n';
  auto foot = [&](const char* name, const std::vector<std::size_t>& idx) {
    f << "# minima(" << name << ")=";
    for (std::size_t k = 0; k < idx.size(); ++k)
      f << (k ? ";" : "") << fmt(s.parameters[idx[k]]);
    f << '\n';
  };
  foot("j_fwi", s.minima_fwi);
  foot("j_awi", s.minima_awi);
  foot("j_mswi", s.minima_mswi);
}

// --- descent trajectory ------------------------------------------------------

inline void write_descent_csv(const std::string& path, const DescentTrajectory& t) {
  auto f = detail::open_out(path);
  f << "iteration,parameter,value\n";
  for (std::size_t i = 0; i < t.parameters.size(); ++i)
    f << i << ',' << fmt(t.parameters[i]) << ',' << fmt(t.values[i]) << '\n';
  f << "# converged=" << (t.converged ? 1 : 0) << '\n';
  f << "# aborted=" << (t.aborted ? 1 : 0) << '\n';
}

}  // namespace awi

#endif  // AWI_IO_HPP
