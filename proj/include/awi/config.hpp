#ifndef AWI_CONFIG_HPP
#define AWI_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "awi/experiments.hpp"
#include "awi/io.hpp"

namespace awi {

// Flat key-value config with [section] headers flattened to dotted keys.
// `key = value` per line, `#` comments, later keys win; command-line
// overrides are applied with set().
struct Config {
  std::map<std::string, std::string> kv;
  std::string base_dir = ".";

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
  }

  void load(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file: " + path);
    base_dir = std::filesystem::path(path).parent_path().string();
    if (base_dir.empty()) base_dir = ".";
    std::string line, section;
    while (std::getline(f, line)) {
      const auto hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      if (line.front() == '[' && line.back() == ']') {
        section = trim(line.substr(1, line.size() - 2));
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos)
        throw std::runtime_error("bad config line (expected key = value): " + line);
      std::string key = trim(line.substr(0, eq));
      std::string val = trim(line.substr(eq + 1));
      if (val.size() >= 2 && val.front() == '"' && val.back() == '"')
        val = val.substr(1, val.size() - 2);
      if (!section.empty()) key = section + "." + key;
      kv[key] = val;
    }
  }

  void set(const std::string& key, const std::string& value) { kv[key] = value; }
  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string get_str(const std::string& key, const std::string& def = "") const {
    const auto it = kv.find(key);
    return it == kv.end() ? def : it->second;
  }

  double get_double(const std::string& key, double def) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return def;
    return detail::to_double(it->second, "config key " + key);
  }

  std::uint64_t get_u64(const std::string& key, std::uint64_t def) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return def;
    try {
      return std::stoull(it->second);
    } catch (const std::exception&) {
      throw std::runtime_error("bad integer for config key " + key);
    }
  }

  std::vector<double> get_list(const std::string& key,
                               std::vector<double> def = {}) const {
    const auto it = kv.find(key);
    if (it == kv.end()) return def;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string field;
    while (std::getline(ss, field, ',')) {
      field = trim(field);
      if (!field.empty()) out.push_back(detail::to_double(field, "config key " + key));
    }
    return out;
  }

  std::string resolve_path(const std::string& p) const {
    const std::filesystem::path path(p);
    if (path.is_absolute()) return p;
    return (std::filesystem::path(base_dir) / path).string();
  }
};

inline MediumModel build_medium(const Config& cfg, const std::string& prefix) {
  const std::string kind = cfg.get_str(prefix + ".kind", "constant");
  const double rho = cfg.get_double(prefix + ".rho", 1.0);
  if (kind == "constant") {
    return MediumModel::constant(cfg.get_double(prefix + ".c", 2000.0), rho);
  }
  if (kind == "gradient") {
    const std::string ax = cfg.get_str(prefix + ".axis", "z");
    if (ax != "x" && ax != "z")
      throw std::runtime_error("config " + prefix + ".axis must be x or z");
    return MediumModel::linear_gradient(
        cfg.get_double(prefix + ".c0", 2000.0), cfg.get_double(prefix + ".g", 0.0),
        ax == "z" ? GradientAxis::z : GradientAxis::x, rho);
  }
  if (kind == "grid") {
    const std::string file = cfg.get_str(prefix + ".file");
    if (file.empty())
      throw std::runtime_error("config " + prefix + ".file required for grid medium");
    const std::string path = cfg.resolve_path(file);
    if (!std::filesystem::exists(path))
      throw std::runtime_error("medium file not found: " + path);
    return MediumModel::gridded(read_medium_csv(path), rho);
  }
  throw std::runtime_error("config " + prefix +
                           ".kind must be constant, gradient, or grid");
}

// Geometry from a file or inline `sx,sz,rx,rz; sx,...` pair list. The default
// is the bundled 4-pair constant-media line at 14-20 km offset.
inline Geometry build_geometry(const Config& cfg) {
  const std::string file = cfg.get_str("geometry.file");
  if (!file.empty()) {
    const std::string path = cfg.resolve_path(file);
    if (!std::filesystem::exists(path))
      throw std::runtime_error("geometry file not found: " + path);
    return read_geometry_csv(path);
  }
  const std::string pairs = cfg.get_str(
      "geometry.pairs",
      "0,0,14000,0; 0,0,16000,0; 0,0,18000,0; 0,0,20000,0");
  Geometry geom;
  std::stringstream ss(pairs);
  std::string chunk;
  int id = 0;
  while (std::getline(ss, chunk, ';')) {
    chunk = Config::trim(chunk);
    if (chunk.empty()) continue;
    std::vector<double> vals;
    std::stringstream cs(chunk);
    std::string field;
    while (std::getline(cs, field, ','))
      vals.push_back(detail::to_double(Config::trim(field), "geometry.pairs"));
    if (vals.size() != 4)
      throw std::runtime_error("geometry.pairs entries need 4 numbers: " + chunk);
    geom.add(id++, {vals[0], vals[1]}, {vals[2], vals[3]});
  }
  if (geom.pairs.empty()) throw std::runtime_error("geometry.pairs is empty");
  return geom;
}

inline Scenario build_scenario(const Config& cfg) {
  Scenario sc;
  sc.medium = build_medium(cfg, "medium");
  sc.medium_star = cfg.has("medium_star.kind") || cfg.has("medium_star.c") ||
                           cfg.has("medium_star.c0") || cfg.has("medium_star.file")
                       ? build_medium(cfg, "medium_star")
                       : MediumModel::constant(2100.0);
  sc.geometry = build_geometry(cfg);
  sc.kind = wavelet_kind_from_string(cfg.get_str("wavelet.kind", "ricker"));
  sc.mother_half_support = cfg.get_double("wavelet.half_support", 6.0);
  sc.dt = cfg.get_double("time.dt", 1e-3);
  sc.t0 = cfg.get_double("time.t0", 0.0);
  sc.t_max = cfg.get_double("time.t_max", 20.0);
  sc.amp_model = amplitude_model_from_string(cfg.get_str("amplitude", "unit"));
  sc.lag_half = cfg.get_double("lag_half", -1.0);
  sc.seed = cfg.get_u64("seed", 1);
  if (cfg.has("remainder.scale_B") || cfg.has("remainder.b0")) {
    RemainderSpec rs;
    rs.b0 = cfg.get_double("remainder.b0", 0.0);
    rs.decay_delta = cfg.get_double("remainder.decay_delta", 1.0);
    rs.scale_B = cfg.get_double("remainder.scale_B", 0.0);
    rs.onset_window = cfg.get_double("remainder.onset_window", 0.1);
    sc.remainder = rs;
  }
  if (!(sc.dt > 0.0) || !(sc.t_max > sc.t0))
    throw std::runtime_error("config time axis is degenerate");
  return sc;
}

inline ArrivalSet build_arrival_set(const Config& cfg, const std::string& key,
                                    const std::string& def) {
  ArrivalSet set;
  std::stringstream ss(cfg.get_str(key, def));
  std::string chunk;
  while (std::getline(ss, chunk, ';')) {
    chunk = Config::trim(chunk);
    if (chunk.empty()) continue;
    std::vector<double> vals;
    std::stringstream cs(chunk);
    std::string field;
    while (std::getline(cs, field, ','))
      vals.push_back(detail::to_double(Config::trim(field), key));
    if (vals.size() != 3)
      throw std::runtime_error(key + " entries need amplitude,tau,caustic_index");
    set.arrivals.push_back({vals[0], vals[1], static_cast<unsigned>(vals[2])});
  }
  set.validate();
  return set;
}

inline MultiArrivalScenario build_multi_arrival(const Config& cfg) {
  MultiArrivalScenario ms;
  ms.predicted = build_arrival_set(cfg, "arrivals.predicted", "1,2,0; 0.5,3,1");
  ms.observed = build_arrival_set(cfg, "arrivals.observed", "1,2,0; 0.5,3.2,1");
  ms.kind = wavelet_kind_from_string(cfg.get_str("wavelet.kind", "ricker"));
  ms.mother_half_support = cfg.get_double("wavelet.half_support", 6.0);
  ms.dt = cfg.get_double("time.dt", 1e-3);
  ms.t0 = cfg.get_double("time.t0", 0.0);
  ms.t_max = cfg.get_double("time.t_max", 8.0);
  ms.lag_half = cfg.get_double("lag_half", 4.0);
  return ms;
}

inline std::vector<double> default_lambda_grid() {
  return {1.0, 0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
}

}  // namespace awi

#endif  // AWI_CONFIG_HPP
