// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dtb/data_set.hpp"
#include "dtb/errors.hpp"
#include "dtb/forward.hpp"
#include "dtb/medium.hpp"
#include "dtb/pulse.hpp"

namespace dtb {

using nlohmann::json;

inline constexpr int kConfigVersion = 1;

struct SolverChoice {
  bool fdtd = false;
  int substeps = 16;
};

// Optional imaging-report block: true inclusion supports for the off-mask
// energy metric.
struct ReportSpec {
  std::vector<Inclusion> inclusions;
  double dilation_cells = 3.0;
  std::size_t mute_rows = 0;
};

// Parsed run configuration. Exactly one of the medium members is populated,
// indicated by dim.
struct RunConfig {
  double tau = 0.0;
  std::size_t n = 0;
  Pulse pulse{};
  SolverChoice solver;
  std::uint64_t seed = 0;
  int dim = 0;
  Medium1D medium_1d;
  Medium2D medium_2d;
  std::map<std::string, std::string> outputs;
  std::optional<ReportSpec> report;

  std::size_t channels() const { return dim == 1 ? 1 : medium_2d.sensors.size(); }
};

namespace detail {

inline void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

inline void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                                const std::string& path) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ConfigError(path + "/" + item.key() + ": unknown key");
  }
}

inline const json& member(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ConfigError(path + "/" + key + ": missing");
  return *it;
}

inline double number_at(const json& j, const std::string& path) {
  if (!j.is_number()) throw ConfigError(path + ": expected a number");
  return j.get<double>();
}

inline double positive_at(const json& j, const std::string& path) {
  const double v = number_at(j, path);
  if (!(v > 0.0)) throw ConfigError(path + ": must be positive");
  return v;
}

// json stores integers signed or unsigned depending on how the document was
// built, so both flavors are accepted here.
inline std::uint64_t unsigned_at(const json& j, const std::string& path) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
    return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ConfigError(path + ": expected a nonnegative integer");
}

inline std::size_t count_at(const json& j, const std::string& path) {
  const std::uint64_t v = unsigned_at(j, path);
  if (v == 0) throw ConfigError(path + ": expected a positive integer");
  return static_cast<std::size_t>(v);
}

inline std::vector<double> number_list(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i)
    out.push_back(number_at(j[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::function<double(double)> parse_profile_1d(const json& j, const std::string& path) {
  expect_object(j, path);
  const std::string kind = member(j, "kind", path).get<std::string>();
  if (kind == "homogeneous") {
    reject_unknown_keys(j, {"kind", "sigma"}, path);
    const double sigma = positive_at(member(j, "sigma", path), path + "/sigma");
    return [sigma](double) { return sigma; };
  }
  if (kind == "layered") {
    reject_unknown_keys(j, {"kind", "interfaces", "values"}, path);
    std::vector<double> interfaces =
        number_list(member(j, "interfaces", path), path + "/interfaces");
    std::vector<double> values = number_list(member(j, "values", path), path + "/values");
    for (std::size_t i = 0; i < values.size(); ++i)
      if (!(values[i] > 0.0))
        throw ConfigError(path + "/values/" + std::to_string(i) + ": must be positive");
    try {
      return layered_profile(std::move(interfaces), std::move(values));
    } catch (const InvalidMedium& e) {
      throw ConfigError(path + ": " + e.what());
    }
  }
  if (kind == "bumps") {
    reject_unknown_keys(j, {"kind", "base", "bumps"}, path);
    const double base = positive_at(member(j, "base", path), path + "/base");
    const json& list = member(j, "bumps", path);
    if (!list.is_array()) throw ConfigError(path + "/bumps: expected an array");
    std::vector<Bump> bumps;
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string bp = path + "/bumps/" + std::to_string(i);
      expect_object(list[i], bp);
      reject_unknown_keys(list[i], {"center", "width", "amplitude"}, bp);
      Bump b;
      b.center = number_at(member(list[i], "center", bp), bp + "/center");
      b.width = positive_at(member(list[i], "width", bp), bp + "/width");
      b.amplitude = number_at(member(list[i], "amplitude", bp), bp + "/amplitude");
      bumps.push_back(b);
    }
    return bump_profile(base, std::move(bumps));
  }
  throw ConfigError(path + "/kind: unknown profile '" + kind + "'");
}

inline std::vector<Inclusion> parse_inclusions(const json& list, const std::string& path) {
  if (!list.is_array()) throw ConfigError(path + ": expected an array");
  std::vector<Inclusion> out;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const std::string ip = path + "/" + std::to_string(i);
    expect_object(list[i], ip);
    reject_unknown_keys(list[i], {"cx", "cy", "radius", "amplitude", "sharp"}, ip);
    Inclusion inc;
    inc.cx = number_at(member(list[i], "cx", ip), ip + "/cx");
    inc.cy = number_at(member(list[i], "cy", ip), ip + "/cy");
    inc.radius = positive_at(member(list[i], "radius", ip), ip + "/radius");
    inc.amplitude = number_at(member(list[i], "amplitude", ip), ip + "/amplitude");
    if (list[i].contains("sharp")) {
      if (!list[i]["sharp"].is_boolean()) throw ConfigError(ip + "/sharp: expected a boolean");
      inc.sharp = list[i]["sharp"].get<bool>();
    }
    out.push_back(inc);
  }
  return out;
}

inline std::function<double(double, double)> parse_field_2d(const json& j,
                                                            const std::string& path) {
  expect_object(j, path);
  const std::string kind = member(j, "kind", path).get<std::string>();
  if (kind == "homogeneous") {
    reject_unknown_keys(j, {"kind", "value"}, path);
    const double v = positive_at(member(j, "value", path), path + "/value");
    return [v](double, double) { return v; };
  }
  if (kind == "linear") {
    reject_unknown_keys(j, {"kind", "base", "gradient_x", "gradient_y"}, path);
    const double base = positive_at(member(j, "base", path), path + "/base");
    const double gx =
        j.contains("gradient_x") ? number_at(j["gradient_x"], path + "/gradient_x") : 0.0;
    const double gy =
        j.contains("gradient_y") ? number_at(j["gradient_y"], path + "/gradient_y") : 0.0;
    return [base, gx, gy](double x, double y) { return base + gx * x + gy * y; };
  }
  if (kind == "inclusions") {
    reject_unknown_keys(j, {"kind", "background", "inclusions"}, path);
    const double background =
        positive_at(member(j, "background", path), path + "/background");
    return inclusion_field(background,
                           parse_inclusions(member(j, "inclusions", path), path + "/inclusions"));
  }
  throw ConfigError(path + "/kind: unknown field '" + kind + "'");
}

}  // namespace detail

// Parses and validates a configuration document. Errors mention the JSON
// path of the offending entry.
inline RunConfig parse_config(const json& root) {
  using detail::member;
  detail::expect_object(root, "");
  detail::reject_unknown_keys(
      root, {"version", "tau", "n", "pulse", "solver", "seed", "medium", "output", "report"},
      "");

  RunConfig cfg;
  const json& version = member(root, "version", "");
  if (!version.is_number_integer() || version.get<int>() != kConfigVersion)
    throw ConfigError("/version: expected " + std::to_string(kConfigVersion));
  cfg.tau = detail::positive_at(member(root, "tau", ""), "/tau");
  cfg.n = detail::count_at(member(root, "n", ""), "/n");

  const json& pulse = member(root, "pulse", "");
  detail::expect_object(pulse, "/pulse");
  if (pulse.contains("coefficient_normalized")) {
    detail::reject_unknown_keys(pulse, {"coefficient_normalized"}, "/pulse");
    if (!pulse["coefficient_normalized"].is_boolean() ||
        !pulse["coefficient_normalized"].get<bool>())
      throw ConfigError("/pulse/coefficient_normalized: expected true");
    cfg.pulse = coefficient_normalized_pulse(cfg.tau);
  } else {
    detail::reject_unknown_keys(pulse, {"omega_o", "bandwidth"}, "/pulse");
    cfg.pulse.center_frequency =
        detail::positive_at(member(pulse, "omega_o", "/pulse"), "/pulse/omega_o");
    cfg.pulse.bandwidth =
        detail::positive_at(member(pulse, "bandwidth", "/pulse"), "/pulse/bandwidth");
  }

  if (root.contains("solver")) {
    const json& solver = root["solver"];
    detail::expect_object(solver, "/solver");
    detail::reject_unknown_keys(solver, {"kind", "substeps"}, "/solver");
    const std::string kind = member(solver, "kind", "/solver").get<std::string>();
    if (kind == "fdtd")
      cfg.solver.fdtd = true;
    else if (kind != "spectral")
      throw ConfigError("/solver/kind: expected 'spectral' or 'fdtd'");
    if (solver.contains("substeps"))
      cfg.solver.substeps =
          static_cast<int>(detail::count_at(solver["substeps"], "/solver/substeps"));
  }
  if (root.contains("seed")) cfg.seed = detail::unsigned_at(root["seed"], "/seed");

  const json& medium = member(root, "medium", "");
  detail::expect_object(medium, "/medium");
  const json& dim = member(medium, "dim", "/medium");
  if (!dim.is_number_integer() || (dim.get<int>() != 1 && dim.get<int>() != 2))
    throw ConfigError("/medium/dim: expected 1 or 2");
  cfg.dim = dim.get<int>();
  try {
    if (cfg.dim == 1) {
      detail::reject_unknown_keys(medium, {"dim", "cells", "total_time", "profile"}, "/medium");
      const std::size_t cells =
          detail::count_at(member(medium, "cells", "/medium"), "/medium/cells");
      const double total_time =
          detail::positive_at(member(medium, "total_time", "/medium"), "/medium/total_time");
      cfg.medium_1d = medium_from_profile_1d(
          cells, total_time,
          detail::parse_profile_1d(member(medium, "profile", "/medium"), "/medium/profile"));
    } else {
      detail::reject_unknown_keys(medium, {"dim", "nx", "ny", "h", "sigma", "speed", "sensors"},
                                  "/medium");
      const std::size_t nx = detail::count_at(member(medium, "nx", "/medium"), "/medium/nx");
      const std::size_t ny = detail::count_at(member(medium, "ny", "/medium"), "/medium/ny");
      const double h = detail::positive_at(member(medium, "h", "/medium"), "/medium/h");
      const json& sensors = member(medium, "sensors", "/medium");
      if (!sensors.is_array() || sensors.empty())
        throw ConfigError("/medium/sensors: expected a nonempty array");
      std::vector<std::size_t> sensor_ix;
      for (std::size_t i = 0; i < sensors.size(); ++i)
        sensor_ix.push_back(static_cast<std::size_t>(
            detail::unsigned_at(sensors[i], "/medium/sensors/" + std::to_string(i))));
      cfg.medium_2d = medium_from_fields_2d(
          nx, ny, h, detail::parse_field_2d(member(medium, "sigma", "/medium"), "/medium/sigma"),
          detail::parse_field_2d(member(medium, "speed", "/medium"), "/medium/speed"),
          sensor_ix);
    }
  } catch (const ValidationError& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError(std::string("/medium: ") + e.what());
  }

  if (root.contains("output")) {
    const json& output = root["output"];
    detail::expect_object(output, "/output");
    for (const auto& item : output.items()) {
      if (!item.value().is_string())
        throw ConfigError("/output/" + item.key() + ": expected a path string");
      cfg.outputs[item.key()] = item.value().get<std::string>();
    }
  }
  if (root.contains("report")) {
    const json& report = root["report"];
    detail::expect_object(report, "/report");
    detail::reject_unknown_keys(report, {"inclusions", "dilation_cells", "mute_rows"}, "/report");
    ReportSpec spec;
    spec.inclusions =
        detail::parse_inclusions(member(report, "inclusions", "/report"), "/report/inclusions");
    if (report.contains("dilation_cells"))
      spec.dilation_cells = detail::positive_at(report["dilation_cells"], "/report/dilation_cells");
    if (report.contains("mute_rows"))
      spec.mute_rows =
          static_cast<std::size_t>(detail::unsigned_at(report["mute_rows"], "/report/mute_rows"));
    cfg.report = std::move(spec);
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return parse_config(root);
}

// Runs the forward model the configuration asks for.
inline DataSet simulate_config(const RunConfig& cfg) {
  const std::size_t two_n = 2 * cfg.n;
  if (cfg.dim == 1) {
    return cfg.solver.fdtd
               ? synthesize_fdtd(cfg.medium_1d, cfg.pulse, cfg.tau, two_n, cfg.solver.substeps)
               : simulate_spectral(cfg.medium_1d, cfg.pulse, cfg.tau, two_n);
  }
  return cfg.solver.fdtd
             ? synthesize_fdtd(cfg.medium_2d, cfg.pulse, cfg.tau, two_n, cfg.solver.substeps)
             : simulate_spectral(cfg.medium_2d, cfg.pulse, cfg.tau, two_n);
}

}  // namespace dtb
