// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dtb/errors.hpp"

namespace dtb {

// One-dimensional medium in travel-time coordinates. Impedance is sampled on
// a staggered pair of grids: primary node j (1-based) sits at (j - 1/2) * step,
// dual node j at j * step. The single sensor is the first primary node.
struct Medium1D {
  std::size_t n_cells = 0;
  double step = 0.0;  // travel-time increment per cell
  std::vector<double> sigma_primary;
  std::vector<double> sigma_dual;

  double total_time() const { return static_cast<double>(n_cells) * step; }
  double primary_coord(std::size_t j0) const { return (static_cast<double>(j0) + 0.5) * step; }
  double dual_coord(std::size_t j0) const { return (static_cast<double>(j0) + 1.0) * step; }
};

inline void validate(const Medium1D& m) {
  if (m.n_cells == 0 || !(m.step > 0.0)) throw InvalidMedium("1d medium: empty grid");
  if (m.sigma_primary.size() != m.n_cells || m.sigma_dual.size() != m.n_cells)
    throw InvalidMedium("1d medium: impedance arrays must have n_cells entries");
  for (double v : m.sigma_primary)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidMedium("1d medium: nonpositive impedance");
  for (double v : m.sigma_dual)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidMedium("1d medium: nonpositive impedance");
}

inline Medium1D medium_from_profile_1d(std::size_t n_cells, double total_time,
                                       const std::function<double(double)>& sigma_of_t) {
  if (n_cells == 0 || !(total_time > 0.0))
    throw InvalidMedium("medium_from_profile_1d: bad grid request");
  Medium1D m;
  m.n_cells = n_cells;
  m.step = total_time / static_cast<double>(n_cells);
  m.sigma_primary.resize(n_cells);
  m.sigma_dual.resize(n_cells);
  for (std::size_t j = 0; j < n_cells; ++j) {
    m.sigma_primary[j] = sigma_of_t(m.primary_coord(j));
    m.sigma_dual[j] = sigma_of_t(m.dual_coord(j));
  }
  validate(m);
  return m;
}

inline Medium1D homogeneous_medium_1d(std::size_t n_cells, double total_time,
                                      double sigma = 1.0) {
  return medium_from_profile_1d(n_cells, total_time, [sigma](double) { return sigma; });
}

// Piecewise-constant profile; interfaces are travel times, values has one more
// entry than interfaces.
inline std::function<double(double)> layered_profile(std::vector<double> interfaces,
                                                     std::vector<double> values) {
  if (values.size() != interfaces.size() + 1)
    throw InvalidMedium("layered_profile: need one more value than interfaces");
  for (std::size_t i = 1; i < interfaces.size(); ++i)
    if (!(interfaces[i] > interfaces[i - 1]))
      throw InvalidMedium("layered_profile: interfaces must increase");
  return [interfaces = std::move(interfaces), values = std::move(values)](double t) {
    std::size_t k = 0;
    while (k < interfaces.size() && t >= interfaces[k]) ++k;
    return values[k];
  };
}

struct Bump {
  double center = 0.0;
  double width = 0.0;
  double amplitude = 0.0;
};

// Smooth positive profile: base * exp(sum of Gaussian bumps in log-impedance).
inline std::function<double(double)> bump_profile(double base, std::vector<Bump> bumps) {
  if (!(base > 0.0)) throw InvalidMedium("bump_profile: base must be positive");
  for (const Bump& b : bumps)
    if (!(b.width > 0.0)) throw InvalidMedium("bump_profile: bump width must be positive");
  return [base, bumps = std::move(bumps)](double t) {
    double logsum = 0.0;
    for (const Bump& b : bumps) {
      const double z = (t - b.center) / b.width;
      logsum += b.amplitude * std::exp(-0.5 * z * z);
    }
    return base * std::exp(logsum);
  };
}

struct GridIndex {
  std::size_t ix = 0;
  std::size_t iy = 0;
};

// Two-dimensional medium on a regular grid. Node (ix, iy) sits at
// (ix * h, iy * h); the row iy == 0 is the accessible boundary carrying the
// sensors, with a zero-flux condition. The other three edges are zero-field.
struct Medium2D {
  std::size_t nx = 0, ny = 0;
  double h = 0.0;
  std::vector<double> sigma;  // impedance, row-major iy * nx + ix
  std::vector<double> speed;  // wave speed c
  std::vector<GridIndex> sensors;

  std::size_t idx(std::size_t ix, std::size_t iy) const { return iy * nx + ix; }
  std::size_t n_nodes() const { return nx * ny; }
  std::vector<std::size_t> sensor_nodes() const {
    std::vector<std::size_t> out;
    out.reserve(sensors.size());
    for (const GridIndex& g : sensors) out.push_back(idx(g.ix, g.iy));
    return out;
  }
};

inline void validate(const Medium2D& m) {
  if (m.nx < 2 || m.ny < 2 || !(m.h > 0.0)) throw InvalidMedium("2d medium: grid too small");
  if (m.sigma.size() != m.n_nodes() || m.speed.size() != m.n_nodes())
    throw InvalidMedium("2d medium: field arrays must cover the grid");
  for (double v : m.sigma)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidMedium("2d medium: nonpositive impedance");
  for (double v : m.speed)
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidMedium("2d medium: nonpositive speed");
  if (m.sensors.empty()) throw InvalidMedium("2d medium: no sensors");
  for (const GridIndex& g : m.sensors) {
    if (g.iy != 0) throw InvalidMedium("2d medium: sensors must sit on the accessible row");
    if (g.ix >= m.nx) throw InvalidMedium("2d medium: sensor outside the grid");
  }
  for (std::size_t a = 0; a < m.sensors.size(); ++a)
    for (std::size_t b = a + 1; b < m.sensors.size(); ++b)
      if (m.sensors[a].ix == m.sensors[b].ix && m.sensors[a].iy == m.sensors[b].iy)
        throw DegenerateSensors("2d medium: coincident sensors");
}

inline Medium2D medium_from_fields_2d(std::size_t nx, std::size_t ny, double h,
                                      const std::function<double(double, double)>& sigma_xy,
                                      const std::function<double(double, double)>& speed_xy,
                                      const std::vector<std::size_t>& sensor_ix) {
  Medium2D m;
  m.nx = nx;
  m.ny = ny;
  m.h = h;
  m.sigma.resize(nx * ny);
  m.speed.resize(nx * ny);
  for (std::size_t iy = 0; iy < ny; ++iy)
    for (std::size_t ix = 0; ix < nx; ++ix) {
      const double x = static_cast<double>(ix) * h, y = static_cast<double>(iy) * h;
      m.sigma[m.idx(ix, iy)] = sigma_xy(x, y);
      m.speed[m.idx(ix, iy)] = speed_xy(x, y);
    }
  m.sensors.reserve(sensor_ix.size());
  for (std::size_t ix : sensor_ix) m.sensors.push_back(GridIndex{ix, 0});
  validate(m);
  return m;
}

struct Inclusion {
  double cx = 0.0, cy = 0.0;
  double radius = 0.0;
  double amplitude = 0.0;  // log-scale for smooth inclusions
  bool sharp = false;      // true: constant factor (1 + amplitude) inside radius
};

inline std::function<double(double, double)> inclusion_field(double background,
                                                             std::vector<Inclusion> incs) {
  if (!(background > 0.0)) throw InvalidMedium("inclusion_field: background must be positive");
  for (const Inclusion& inc : incs)
    if (!(inc.radius > 0.0)) throw InvalidMedium("inclusion_field: radius must be positive");
  return [background, incs = std::move(incs)](double x, double y) {
    double v = background;
    for (const Inclusion& inc : incs) {
      const double dx = x - inc.cx, dy = y - inc.cy;
      const double r2 = dx * dx + dy * dy;
      if (inc.sharp) {
        if (r2 <= inc.radius * inc.radius) v *= (1.0 + inc.amplitude);
      } else {
        v *= std::exp(inc.amplitude * std::exp(-0.5 * r2 / (inc.radius * inc.radius)));
      }
    }
    return v;
  };
}

}  // namespace dtb
