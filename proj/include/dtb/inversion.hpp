// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "dtb/data_set.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/forward.hpp"
#include "dtb/linalg.hpp"
#include "dtb/medium.hpp"
#include "dtb/mimo_rom.hpp"
#include "dtb/siso_rom.hpp"
#include "dtb/threading.hpp"

namespace dtb {

// Impedance read off the ROM coefficient ratios against a reference factor
// computed in the unit-impedance medium. Values sit on a staggered
// travel-time grid built from the reference coefficients: the primary ladder
// starts at the surface (first node 0), the dual ladder is offset by roughly
// half a step.
struct ImpedanceEstimate {
  std::size_t n = 0;
  std::vector<double> primary_values;
  std::vector<double> dual_values;
  std::vector<double> primary_nodes;
  std::vector<double> dual_nodes;
};

inline ImpedanceEstimate impedance_estimates(const SisoFactor& factor,
                                             const SisoFactor& reference) {
  const std::size_t n = factor.gammas.size();
  if (factor.gamma_hats.size() != n || reference.gammas.size() != n ||
      reference.gamma_hats.size() != n)
    throw ShapeMismatch("impedance_estimates: factors have different orders");
  auto require_positive = [](const std::vector<double>& v, const char* what) {
    for (double x : v)
      if (!(x > 0.0)) throw NonPositive(std::string("impedance_estimates: ") + what);
  };
  require_positive(factor.gammas, "nonpositive primary coefficient");
  require_positive(factor.gamma_hats, "nonpositive dual coefficient");
  require_positive(reference.gammas, "nonpositive reference primary coefficient");
  require_positive(reference.gamma_hats, "nonpositive reference dual coefficient");

  ImpedanceEstimate out;
  out.n = n;
  out.primary_values.resize(n);
  out.dual_values.resize(n);
  out.primary_nodes.resize(n);
  out.dual_nodes.resize(n);
  double t_primary = 0.0, t_dual = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    out.primary_values[j] = reference.gamma_hats[j] / factor.gamma_hats[j];
    out.dual_values[j] = factor.gammas[j] / reference.gammas[j];
    out.primary_nodes[j] = t_primary;
    t_primary += reference.gammas[j];
    t_dual += reference.gamma_hats[j];
    out.dual_nodes[j] = t_dual;
  }
  return out;
}

// Matrix analogue of the coefficient ratios for multi-sensor factors,
// reported for inspection only: primary_j = gh0_j^{1/2} gh_j^{-1} gh0_j^{1/2}
// and dual_j = g0_j^{-1/2} g_j g0_j^{-1/2}, both symmetric positive definite
// and reducing to the scalar estimates when m = 1.
struct BlockImpedanceRatios {
  std::vector<DenseMatrix> primary;
  std::vector<DenseMatrix> dual;
};

inline BlockImpedanceRatios block_impedance_ratios(const MimoFactor& factor,
                                                   const MimoFactor& reference) {
  const std::size_t n = factor.gammas.size();
  if (factor.gamma_hats.size() != n || reference.gammas.size() != n ||
      reference.gamma_hats.size() != n)
    throw ShapeMismatch("block_impedance_ratios: factors have different orders");
  BlockImpedanceRatios out;
  out.primary.reserve(n);
  out.dual.reserve(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (factor.gammas[j].rows() != reference.gammas[j].rows())
      throw ShapeMismatch("block_impedance_ratios: factors have different block sizes");
    DenseMatrix s0 = spd_sqrt(reference.gamma_hats[j]);
    DenseMatrix p = matmul(s0, matmul(spd_inverse(factor.gamma_hats[j]), s0));
    symmetrize(p);
    out.primary.push_back(std::move(p));
    DenseMatrix is0 = spd_inv_sqrt(reference.gammas[j]);
    DenseMatrix d = matmul(is0, matmul(factor.gammas[j], is0));
    symmetrize(d);
    out.dual.push_back(std::move(d));
  }
  return out;
}

// One-way travel time from a grid node to every node of the medium. Constant
// speed uses the exact distance; otherwise |grad T| = 1/c is solved with
// first-order fast marching on the five-point neighborhood.
inline std::vector<double> travel_time_field(const Medium2D& med, std::size_t source_node) {
  validate(med);
  const std::size_t nn = med.n_nodes();
  if (source_node >= nn) throw ShapeMismatch("travel_time_field: source node outside the grid");
  const std::size_t sx = source_node % med.nx;
  const std::size_t sy = source_node / med.nx;

  double c_min = med.speed[0], c_max = med.speed[0];
  for (double c : med.speed) {
    c_min = std::min(c_min, c);
    c_max = std::max(c_max, c);
  }
  std::vector<double> t(nn);
  if (c_max - c_min <= 1e-14 * c_max) {
    for (std::size_t iy = 0; iy < med.ny; ++iy)
      for (std::size_t ix = 0; ix < med.nx; ++ix) {
        const double dx = static_cast<double>(ix) - static_cast<double>(sx);
        const double dy = static_cast<double>(iy) - static_cast<double>(sy);
        t[med.idx(ix, iy)] = std::hypot(dx, dy) * med.h / c_max;
      }
    return t;
  }

  const double inf = std::numeric_limits<double>::infinity();
  t.assign(nn, inf);
  std::vector<char> accepted(nn, 0);
  using Entry = std::pair<double, std::size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> heap;

  // Seed a small disk around the source with straight-ray times (mean
  // slowness along the ray); marching from a point alone leaves a persistent
  // first-order error along diagonals.
  const double seed_radius = 3.0;
  const double s_src = 1.0 / med.speed[source_node];
  for (std::size_t iy = 0; iy < med.ny; ++iy)
    for (std::size_t ix = 0; ix < med.nx; ++ix) {
      const double dx = static_cast<double>(ix) - static_cast<double>(sx);
      const double dy = static_cast<double>(iy) - static_cast<double>(sy);
      const double r = std::hypot(dx, dy);
      if (r > seed_radius) continue;
      const std::size_t i = med.idx(ix, iy);
      t[i] = 0.5 * (s_src + 1.0 / med.speed[i]) * r * med.h;
      accepted[i] = 1;
    }

  auto relax = [&](std::size_t ix, std::size_t iy) {
    const std::size_t i = med.idx(ix, iy);
    if (accepted[i]) return;
    double a = inf;
    if (ix > 0 && accepted[i - 1]) a = t[i - 1];
    if (ix + 1 < med.nx && accepted[i + 1]) a = std::min(a, t[i + 1]);
    double b = inf;
    if (iy > 0 && accepted[i - med.nx]) b = t[i - med.nx];
    if (iy + 1 < med.ny && accepted[i + med.nx]) b = std::min(b, t[i + med.nx]);
    if (a > b) std::swap(a, b);
    const double f = med.h / med.speed[i];
    const double cand = (b - a >= f) ? a + f
                                     : 0.5 * (a + b + std::sqrt(2.0 * f * f - (b - a) * (b - a)));
    if (cand < t[i]) {
      t[i] = cand;
      heap.emplace(cand, i);
    }
  };

  for (std::size_t i = 0; i < nn; ++i) {
    if (!accepted[i]) continue;
    const std::size_t ix = i % med.nx;
    const std::size_t iy = i / med.nx;
    if (ix > 0) relax(ix - 1, iy);
    if (ix + 1 < med.nx) relax(ix + 1, iy);
    if (iy > 0) relax(ix, iy - 1);
    if (iy + 1 < med.ny) relax(ix, iy + 1);
  }

  while (!heap.empty()) {
    const Entry top = heap.top();
    heap.pop();
    const std::size_t i = top.second;
    if (accepted[i]) continue;
    accepted[i] = 1;
    const std::size_t ix = i % med.nx;
    const std::size_t iy = i / med.nx;
    if (ix > 0) relax(ix - 1, iy);
    if (ix + 1 < med.nx) relax(ix + 1, iy);
    if (iy > 0) relax(ix, iy - 1);
    if (iy + 1 < med.ny) relax(ix, iy + 1);
  }
  return t;
}

struct Image {
  std::size_t nx = 0, ny = 0;
  std::vector<double> values;  // row-major iy * nx + ix, matching Medium2D

  Image() = default;
  Image(std::size_t nx_, std::size_t ny_) : nx(nx_), ny(ny_), values(nx_ * ny_, 0.0) {}

  double& at(std::size_t ix, std::size_t iy) { return values[iy * nx + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return values[iy * nx + ix]; }
};

// Migration image: for every source column of the data, time-reverse the
// received traces, reinject them at the receivers into a leapfrog run
// through the reference medium, and read the backpropagated field at each
// node at that node's one-way travel time from the source. Per-source images
// are accumulated in source order regardless of the thread count.
inline Image rtm_image(const DataSet& data, const Medium2D& reference, int substeps = 16) {
  validate(reference);
  const std::vector<std::size_t> nodes = reference.sensor_nodes();
  if (data.m != nodes.size())
    throw ShapeMismatch("rtm_image: data channels do not match the medium sensors");
  if (substeps < 8) throw ValidationError("rtm_image: need at least 8 substeps");
  const detail::Stencil2D st = detail::Stencil2D::build(reference);
  const double tau = data.tau;
  const double dt = tau / substeps;
  double c_max = 0.0;
  for (double c : reference.speed) c_max = std::max(c_max, c);
  detail::check_cfl(dt, reference.h / (c_max * std::sqrt(2.0)), st.gershgorin_bound(), tau);

  const std::size_t nn = reference.n_nodes();
  const std::size_t m = data.m;
  const std::size_t last = data.two_n - 1;
  const double ih2 = 1.0 / (reference.h * reference.h);

  std::vector<Image> partial(m, Image(reference.nx, reference.ny));
  parallel_for_index(m, [&](std::size_t s) {
    // Node i is read off snapshot eval[i] = last - travel/tau (fractional,
    // linear between the two bracketing frames; negative means the node is
    // beyond the recording window).
    const std::vector<double> travel = travel_time_field(reference, nodes[s]);
    std::vector<long> snap(nn);
    std::vector<double> frac(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      const double pos = static_cast<double>(last) - travel[i] / tau;
      snap[i] = pos >= 0.0 ? static_cast<long>(std::floor(pos)) : -2;
      frac[i] = pos >= 0.0 ? pos - std::floor(pos) : 0.0;
    }

    // Reversed-clock trace value for receiver r at time q * dt.
    auto injected = [&](std::size_t r, std::size_t q) {
      const double x = static_cast<double>(last) - static_cast<double>(q) / substeps;
      const std::size_t k0 = static_cast<std::size_t>(x);
      const double w = x - static_cast<double>(k0);
      double v = data.frames[k0](r, s);
      if (w > 0.0) v = (1.0 - w) * v + w * data.frames[k0 + 1](r, s);
      return v;
    };

    std::vector<double> u(nn, 0.0), uprev(nn, 0.0), unext(nn, 0.0), tmp, su;
    Image& img = partial[s];
    auto record = [&](std::size_t q) {
      if (q % static_cast<std::size_t>(substeps) != 0) return;
      const long j = static_cast<long>(q / static_cast<std::size_t>(substeps));
      for (std::size_t i = 0; i < nn; ++i) {
        if (snap[i] == j)
          img.values[i] += (1.0 - frac[i]) * st.sqrt_w[i] * u[i];
        else if (snap[i] == j - 1 && frac[i] > 0.0)
          img.values[i] += frac[i] * st.sqrt_w[i] * u[i];
      }
    };
    record(0);
    const std::size_t total_steps = last * static_cast<std::size_t>(substeps);
    for (std::size_t q = 0; q < total_steps; ++q) {
      st.apply(u, tmp, su);
      for (std::size_t i = 0; i < nn; ++i) unext[i] = 2.0 * u[i] - uprev[i] - dt * dt * su[i];
      for (std::size_t r = 0; r < m; ++r)
        unext[nodes[r]] += dt * dt * injected(r, q) * ih2 / st.sqrt_w[nodes[r]];
      std::swap(uprev, u);
      std::swap(u, unext);
      record(q + 1);
    }
  });

  Image out(reference.nx, reference.ny);
  for (std::size_t s = 0; s < m; ++s)
    for (std::size_t i = 0; i < nn; ++i) out.values[i] += partial[s].values[i];
  return out;
}

}  // namespace dtb
