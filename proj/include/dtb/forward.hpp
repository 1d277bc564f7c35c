// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dtb/data_set.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/linalg.hpp"
#include "dtb/medium.hpp"
#include "dtb/pulse.hpp"
#include "dtb/threading.hpp"

namespace dtb {

namespace detail {

// Tridiagonal entries of M = L_q L_q^T for the 1D operator; cheap enough to
// build even when the dense factor would not fit comfortably.
inline void wave_tridiag_1d(const Medium1D& med, std::vector<double>& diag,
                            std::vector<double>& sub) {
  const std::size_t n = med.n_cells;
  const double is2 = 1.0 / (med.step * med.step);
  diag.assign(n, 0.0);
  sub.assign(n > 0 ? n - 1 : 0, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double v = med.sigma_primary[j] / med.sigma_dual[j];
    if (j > 0) v += med.sigma_primary[j] / med.sigma_dual[j - 1];
    diag[j] = v * is2;
    if (j > 0)
      sub[j - 1] = -std::sqrt(med.sigma_primary[j] * med.sigma_primary[j - 1]) /
                   med.sigma_dual[j - 1] * is2;
  }
}

// Matrix-free form of the symmetrized 2D operator
// S = (sigma c)^{1/2} G (sigma c)^{1/2}, with G the five-point finite-volume
// discretization of -div((c/sigma) grad): zero-flux on the sensor row iy == 0,
// zero-field ghosts on the other three edges.
struct Stencil2D {
  std::size_t nx = 0, ny = 0;
  std::vector<double> diag_g;  // G diagonal (includes boundary ghost terms)
  std::vector<double> wx;      // face (ix,iy)-(ix+1,iy), size (nx-1)*ny, already / h^2
  std::vector<double> wy;      // face (ix,iy)-(ix,iy+1), size nx*(ny-1), already / h^2
  std::vector<double> sqrt_w;  // sqrt(sigma * c)

  static Stencil2D build(const Medium2D& med) {
    Stencil2D st;
    st.nx = med.nx;
    st.ny = med.ny;
    const std::size_t nn = med.n_nodes();
    const double ih2 = 1.0 / (med.h * med.h);
    std::vector<double> w(nn);
    st.sqrt_w.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) {
      w[i] = med.speed[i] / med.sigma[i];
      st.sqrt_w[i] = std::sqrt(med.sigma[i] * med.speed[i]);
    }
    st.diag_g.assign(nn, 0.0);
    st.wx.assign((med.nx - 1) * med.ny, 0.0);
    st.wy.assign(med.nx * (med.ny - 1), 0.0);
    for (std::size_t iy = 0; iy < med.ny; ++iy)
      for (std::size_t ix = 0; ix < med.nx; ++ix) {
        const std::size_t i = med.idx(ix, iy);
        if (ix + 1 < med.nx) {
          const double f = 0.5 * (w[i] + w[med.idx(ix + 1, iy)]) * ih2;
          st.wx[iy * (med.nx - 1) + ix] = f;
          st.diag_g[i] += f;
          st.diag_g[med.idx(ix + 1, iy)] += f;
        } else {
          st.diag_g[i] += w[i] * ih2;  // right ghost, zero field
        }
        if (ix == 0) st.diag_g[i] += w[i] * ih2;  // left ghost
        if (iy + 1 < med.ny) {
          const double f = 0.5 * (w[i] + w[med.idx(ix, iy + 1)]) * ih2;
          st.wy[iy * med.nx + ix] = f;
          st.diag_g[i] += f;
          st.diag_g[med.idx(ix, iy + 1)] += f;
        } else {
          st.diag_g[i] += w[i] * ih2;  // bottom ghost
        }
        // iy == 0 face omitted: zero flux through the accessible row
      }
    return st;
  }

  // out = S u
  void apply(const std::vector<double>& u, std::vector<double>& tmp,
             std::vector<double>& out) const {
    const std::size_t nn = nx * ny;
    tmp.resize(nn);
    out.resize(nn);
    for (std::size_t i = 0; i < nn; ++i) tmp[i] = sqrt_w[i] * u[i];
    for (std::size_t i = 0; i < nn; ++i) out[i] = diag_g[i] * tmp[i];
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix + 1 < nx; ++ix) {
        const double f = wx[iy * (nx - 1) + ix];
        const std::size_t i = iy * nx + ix;
        out[i] -= f * tmp[i + 1];
        out[i + 1] -= f * tmp[i];
      }
    for (std::size_t iy = 0; iy + 1 < ny; ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const double f = wy[iy * nx + ix];
        const std::size_t i = iy * nx + ix;
        out[i] -= f * tmp[i + nx];
        out[i + nx] -= f * tmp[i];
      }
    for (std::size_t i = 0; i < nn; ++i) out[i] *= sqrt_w[i];
  }

  double gershgorin_bound() const {
    const std::size_t nn = nx * ny;
    double best = 0.0;
    for (std::size_t iy = 0; iy < ny; ++iy)
      for (std::size_t ix = 0; ix < nx; ++ix) {
        const std::size_t i = iy * nx + ix;
        double row = diag_g[i] * sqrt_w[i];
        if (ix > 0) row += wx[iy * (nx - 1) + ix - 1] * sqrt_w[i - 1];
        if (ix + 1 < nx) row += wx[iy * (nx - 1) + ix] * sqrt_w[i + 1];
        if (iy > 0) row += wy[(iy - 1) * nx + ix] * sqrt_w[i - nx];
        if (iy + 1 < ny) row += wy[iy * nx + ix] * sqrt_w[i + nx];
        best = std::max(best, row * sqrt_w[i]);
      }
    return best;
  }
};

inline double gershgorin_bound_tridiag(const std::vector<double>& diag,
                                       const std::vector<double>& sub) {
  double best = 0.0;
  for (std::size_t j = 0; j < diag.size(); ++j) {
    double row = diag[j];
    if (j > 0) row += std::abs(sub[j - 1]);
    if (j + 1 < diag.size()) row += std::abs(sub[j]);
    best = std::max(best, row);
  }
  return best;
}

inline void check_cfl(double dt, double formula_bound, double gersh_lambda_max, double tau) {
  const double bound = std::min(formula_bound, 2.0 / std::sqrt(gersh_lambda_max));
  if (dt > bound * (1.0 + 1e-12)) {
    const int need = static_cast<int>(std::ceil(tau / bound));
    throw CflViolation("time step " + std::to_string(dt) + " exceeds stability bound " +
                       std::to_string(bound) + "; use at least " + std::to_string(need) +
                       " substeps");
  }
}

}  // namespace detail

// Dense lower-bidiagonal transport factor for the 1D medium:
// diagonal -(1/step) sqrt(sp_j / sd_j), subdiagonal +(1/step) sqrt(sp_j / sd_{j-1}).
inline DenseMatrix build_lq_1d(const Medium1D& med) {
  validate(med);
  const std::size_t n = med.n_cells;
  DenseMatrix l(n, n);
  const double is = 1.0 / med.step;
  for (std::size_t j = 0; j < n; ++j) {
    l(j, j) = -is * std::sqrt(med.sigma_primary[j] / med.sigma_dual[j]);
    if (j > 0) l(j, j - 1) = is * std::sqrt(med.sigma_primary[j] / med.sigma_dual[j - 1]);
  }
  return l;
}

// Dense symmetrized second-order operator for the 2D medium.
inline DenseMatrix wave_operator_2d(const Medium2D& med) {
  validate(med);
  const detail::Stencil2D st = detail::Stencil2D::build(med);
  const std::size_t nn = med.n_nodes();
  DenseMatrix s(nn, nn);
  for (std::size_t i = 0; i < nn; ++i) s(i, i) = st.diag_g[i] * st.sqrt_w[i] * st.sqrt_w[i];
  for (std::size_t iy = 0; iy < med.ny; ++iy)
    for (std::size_t ix = 0; ix + 1 < med.nx; ++ix) {
      const std::size_t i = med.idx(ix, iy);
      const double v = -st.wx[iy * (med.nx - 1) + ix] * st.sqrt_w[i] * st.sqrt_w[i + 1];
      s(i, i + 1) = v;
      s(i + 1, i) = v;
    }
  for (std::size_t iy = 0; iy + 1 < med.ny; ++iy)
    for (std::size_t ix = 0; ix < med.nx; ++ix) {
      const std::size_t i = med.idx(ix, iy);
      const double v = -st.wy[iy * med.nx + ix] * st.sqrt_w[i] * st.sqrt_w[i + med.nx];
      s(i, i + med.nx) = v;
      s(i + med.nx, i) = v;
    }
  return s;
}

// Lower-triangular Cholesky factor of the 2D operator.
inline DenseMatrix build_lq_2d(const Medium2D& med) {
  return transpose(cholesky_upper(wave_operator_2d(med)));
}

// Eigendecomposition of M = L_q L_q^T for each dimension; the 1D path uses
// the tridiagonal solver.
inline EigDecomp wave_eig(const Medium1D& med) {
  validate(med);
  std::vector<double> d, e;
  detail::wave_tridiag_1d(med, d, e);
  return sym_eig_tridiag(std::move(d), std::move(e));
}

inline EigDecomp wave_eig(const Medium2D& med) { return sym_eig(wave_operator_2d(med)); }

// Band-limited sensor functions: column s equals
// f_hat^{1/2}(sqrt(M)) applied to the grid delta at sensor s, normalized by
// the square root of the cell measure (step in 1D, h^2 in 2D).
inline DenseMatrix sensor_vectors(const EigDecomp& m_eig, const Pulse& pulse,
                                  const std::vector<std::size_t>& sensor_nodes,
                                  double cell_measure) {
  validate(pulse);
  if (!(cell_measure > 0.0)) throw ValidationError("sensor_vectors: cell measure must be positive");
  const std::size_t n = m_eig.values.size();
  const std::size_t m = sensor_nodes.size();
  if (m == 0) throw DegenerateSensors("sensor_vectors: no sensors");
  for (std::size_t a = 0; a < m; ++a) {
    if (sensor_nodes[a] >= n) throw ShapeMismatch("sensor_vectors: sensor node out of range");
    for (std::size_t b = a + 1; b < m; ++b)
      if (sensor_nodes[a] == sensor_nodes[b])
        throw DegenerateSensors("sensor_vectors: coincident sensors");
  }
  const double scale = 1.0 / std::sqrt(cell_measure);
  DenseMatrix coeff(n, m);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = std::sqrt(std::max(0.0, m_eig.values[i]));
    const double w = std::sqrt(std::max(0.0, pulse.f_hat(theta))) * scale;
    for (std::size_t s = 0; s < m; ++s) coeff(i, s) = w * m_eig.vectors(sensor_nodes[s], i);
  }
  return matmul(m_eig.vectors, coeff);
}

inline DenseMatrix sensor_vectors(const DenseMatrix& l_q, const Pulse& pulse,
                                  const std::vector<std::size_t>& sensor_nodes,
                                  double cell_measure) {
  DenseMatrix m = matmul_nt(l_q, l_q);
  symmetrize(m);
  return sensor_vectors(sym_eig(m), pulse, sensor_nodes, cell_measure);
}

namespace detail {

// frames[k](r,s) = sum_i cos(k tau theta_i) coeff(i,r) coeff(i,s)
inline std::vector<DenseMatrix> frames_from_modes(const std::vector<double>& theta,
                                                  const DenseMatrix& coeff, double tau,
                                                  std::size_t two_n) {
  const std::size_t n = theta.size();
  const std::size_t m = coeff.cols();
  std::vector<double> cur(n, 1.0), prev(n), step_cos(n);
  for (std::size_t i = 0; i < n; ++i) step_cos[i] = std::cos(tau * theta[i]);
  std::vector<DenseMatrix> frames(two_n, DenseMatrix(m, m));
  for (std::size_t k = 0; k < two_n; ++k) {
    if (k == 1) {
      prev = cur;
      cur = step_cos;
    } else if (k >= 2) {
      for (std::size_t i = 0; i < n; ++i) {
        const double next = 2.0 * step_cos[i] * cur[i] - prev[i];
        prev[i] = cur[i];
        cur[i] = next;
      }
    }
    DenseMatrix& f = frames[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t r = 0; r < m; ++r) {
        const double wr = cur[i] * coeff(i, r);
        if (wr == 0.0) continue;
        for (std::size_t s = 0; s < m; ++s) f(r, s) += wr * coeff(i, s);
      }
    }
    symmetrize(f);
  }
  return frames;
}

}  // namespace detail

// frames[k] = b^T cos(k tau sqrt(M)) b, sampled on the Chebyshev time grid.
inline DataSet synthesize_spectral(const EigDecomp& m_eig, const DenseMatrix& b, double tau,
                                   std::size_t two_n) {
  if (!(tau > 0.0)) throw ValidationError("synthesize_spectral: tau must be positive");
  if (b.rows() != m_eig.values.size())
    throw ShapeMismatch("synthesize_spectral: sensor matrix does not match the operator");
  std::vector<double> theta(m_eig.values.size());
  for (std::size_t i = 0; i < theta.size(); ++i)
    theta[i] = std::sqrt(std::max(0.0, m_eig.values[i]));
  DenseMatrix g = matmul_tn(m_eig.vectors, b);
  return DataSet(tau, detail::frames_from_modes(theta, g, tau, two_n));
}

inline DataSet synthesize_spectral(const DenseMatrix& l_q, const DenseMatrix& b, double tau,
                                   std::size_t two_n) {
  DenseMatrix m = matmul_nt(l_q, l_q);
  symmetrize(m);
  return synthesize_spectral(sym_eig(m), b, tau, two_n);
}

// One-call spectral synthesis per medium; shares a single eigendecomposition
// across the sensor construction and all frames.
inline DataSet simulate_spectral(const Medium1D& med, const Pulse& pulse, double tau,
                                 std::size_t two_n) {
  validate(med);
  validate(pulse);
  if (!(tau > 0.0)) throw ValidationError("simulate_spectral: tau must be positive");
  std::vector<double> d, e;
  detail::wave_tridiag_1d(med, d, e);
  EigDecomp eig = sym_eig_tridiag(std::move(d), std::move(e));
  const std::size_t n = eig.values.size();
  std::vector<double> theta(n);
  DenseMatrix coeff(n, 1);
  const double scale = 1.0 / std::sqrt(med.step);
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = std::sqrt(std::max(0.0, eig.values[i]));
    coeff(i, 0) =
        std::sqrt(std::max(0.0, pulse.f_hat(theta[i]))) * eig.vectors(0, i) * scale;
  }
  return DataSet(tau, detail::frames_from_modes(theta, coeff, tau, two_n));
}

inline DataSet simulate_spectral(const Medium2D& med, const Pulse& pulse, double tau,
                                 std::size_t two_n) {
  validate(pulse);
  if (!(tau > 0.0)) throw ValidationError("simulate_spectral: tau must be positive");
  EigDecomp eig = wave_eig(med);
  const std::size_t n = eig.values.size();
  const std::vector<std::size_t> nodes = med.sensor_nodes();
  const std::size_t m = nodes.size();
  std::vector<double> theta(n);
  DenseMatrix coeff(n, m);
  const double scale = 1.0 / med.h;  // 1 / sqrt(h^2)
  for (std::size_t i = 0; i < n; ++i) {
    theta[i] = std::sqrt(std::max(0.0, eig.values[i]));
    const double w = std::sqrt(std::max(0.0, pulse.f_hat(theta[i]))) * scale;
    for (std::size_t s = 0; s < m; ++s) coeff(i, s) = w * eig.vectors(nodes[s], i);
  }
  return DataSet(tau, detail::frames_from_modes(theta, coeff, tau, two_n));
}

// Leapfrog time stepping of the driven wave system; returns the same frames
// as spectral synthesis up to O(dt^2) dispersion. Frames at times inside the
// pulse support are completed by the even time extension
// D_k = p(k tau) + p(-k tau), so the simulation starts before time zero.
inline DataSet synthesize_fdtd(const Medium1D& med, const Pulse& pulse, double tau,
                               std::size_t two_n, int substeps = 16) {
  validate(med);
  validate(pulse);
  if (!(tau > 0.0)) throw ValidationError("synthesize_fdtd: tau must be positive");
  if (substeps < 8) throw ValidationError("synthesize_fdtd: need at least 8 substeps");
  std::vector<double> d, e;
  detail::wave_tridiag_1d(med, d, e);
  const double dt = tau / substeps;
  detail::check_cfl(dt, med.step, detail::gershgorin_bound_tridiag(d, e), tau);

  const std::size_t n = med.n_cells;
  const std::size_t k_pre = static_cast<std::size_t>(std::ceil(pulse.support_cutoff() / tau));
  const std::size_t total_steps = (k_pre + two_n - 1) * static_cast<std::size_t>(substeps);
  const double t0 = -static_cast<double>(k_pre) * tau;
  const double src_scale = 1.0 / med.step;

  std::vector<double> u(n, 0.0), uprev(n, 0.0), unext(n, 0.0);
  std::vector<double> samples(two_n, 0.0);
  auto record = [&](std::size_t step_index) {
    if (step_index % static_cast<std::size_t>(substeps) != 0) return;
    const long k_signed =
        static_cast<long>(step_index / static_cast<std::size_t>(substeps)) -
        static_cast<long>(k_pre);
    const std::size_t k = static_cast<std::size_t>(std::labs(k_signed));
    if (k >= two_n) return;
    samples[k] += (k_signed == 0 ? 2.0 : 1.0) * u[0];
  };
  record(0);
  for (std::size_t s = 0; s < total_steps; ++s) {
    const double t = t0 + static_cast<double>(s) * dt;
    const double f = pulse.amplitude_dt(t) * src_scale;
    for (std::size_t j = 0; j < n; ++j) {
      double mu = d[j] * u[j];
      if (j > 0) mu += e[j - 1] * u[j - 1];
      if (j + 1 < n) mu += e[j] * u[j + 1];
      unext[j] = 2.0 * u[j] - uprev[j] + dt * dt * (-mu + (j == 0 ? f : 0.0));
    }
    std::swap(uprev, u);
    std::swap(u, unext);
    record(s + 1);
  }
  return DataSet::from_scalars(tau, samples);
}

inline DataSet synthesize_fdtd(const Medium2D& med, const Pulse& pulse, double tau,
                               std::size_t two_n, int substeps = 16) {
  validate(med);
  validate(pulse);
  if (!(tau > 0.0)) throw ValidationError("synthesize_fdtd: tau must be positive");
  if (substeps < 8) throw ValidationError("synthesize_fdtd: need at least 8 substeps");
  const detail::Stencil2D st = detail::Stencil2D::build(med);
  const double dt = tau / substeps;
  double c_max = 0.0;
  for (double c : med.speed) c_max = std::max(c_max, c);
  detail::check_cfl(dt, med.h / (c_max * std::sqrt(2.0)), st.gershgorin_bound(), tau);

  const std::vector<std::size_t> nodes = med.sensor_nodes();
  const std::size_t m = nodes.size();
  const std::size_t nn = med.n_nodes();
  const std::size_t k_pre = static_cast<std::size_t>(std::ceil(pulse.support_cutoff() / tau));
  const std::size_t total_steps = (k_pre + two_n - 1) * static_cast<std::size_t>(substeps);
  const double t0 = -static_cast<double>(k_pre) * tau;
  const double ih2 = 1.0 / (med.h * med.h);

  // traces[r] holds the receiver rows for source r.
  std::vector<DenseMatrix> traces(m, DenseMatrix(two_n, m));
  parallel_for_index(m, [&](std::size_t r) {
    std::vector<double> u(nn, 0.0), uprev(nn, 0.0), unext(nn, 0.0), tmp, su;
    const std::size_t src_node = nodes[r];
    const double src_scale = ih2 / st.sqrt_w[src_node];
    auto record = [&](std::size_t step_index) {
      if (step_index % static_cast<std::size_t>(substeps) != 0) return;
      const long k_signed =
          static_cast<long>(step_index / static_cast<std::size_t>(substeps)) -
          static_cast<long>(k_pre);
      const std::size_t k = static_cast<std::size_t>(std::labs(k_signed));
      if (k >= two_n) return;
      const double wgt = (k_signed == 0) ? 2.0 : 1.0;
      for (std::size_t j = 0; j < m; ++j)
        traces[r](k, j) += wgt * st.sqrt_w[nodes[j]] * u[nodes[j]];
    };
    record(0);
    for (std::size_t s = 0; s < total_steps; ++s) {
      const double t = t0 + static_cast<double>(s) * dt;
      const double f = pulse.amplitude_dt(t) * src_scale;
      st.apply(u, tmp, su);
      for (std::size_t j = 0; j < nn; ++j)
        unext[j] = 2.0 * u[j] - uprev[j] + dt * dt * (-su[j] + (j == src_node ? f : 0.0));
      std::swap(uprev, u);
      std::swap(u, unext);
      record(s + 1);
    }
  });

  std::vector<DenseMatrix> frames(two_n, DenseMatrix(m, m));
  for (std::size_t k = 0; k < two_n; ++k) {
    for (std::size_t r = 0; r < m; ++r)
      for (std::size_t j = 0; j < m; ++j) frames[k](r, j) = traces[r](k, j);
    symmetrize(frames[k]);
  }
  return DataSet(tau, std::move(frames));
}

// sigma^eps = sigma_ref * (sigma_pert / sigma_ref)^eps, elementwise.
inline Medium1D geometric_interp(const Medium1D& ref, const Medium1D& pert, double eps) {
  validate(ref);
  validate(pert);
  if (ref.n_cells != pert.n_cells || ref.step != pert.step)
    throw InvalidMedium("geometric_interp: media live on different grids");
  Medium1D out = ref;
  for (std::size_t j = 0; j < ref.n_cells; ++j) {
    out.sigma_primary[j] =
        ref.sigma_primary[j] * std::pow(pert.sigma_primary[j] / ref.sigma_primary[j], eps);
    out.sigma_dual[j] =
        ref.sigma_dual[j] * std::pow(pert.sigma_dual[j] / ref.sigma_dual[j], eps);
  }
  return out;
}

inline Medium2D geometric_interp(const Medium2D& ref, const Medium2D& pert, double eps) {
  validate(ref);
  validate(pert);
  if (ref.nx != pert.nx || ref.ny != pert.ny || ref.h != pert.h)
    throw InvalidMedium("geometric_interp: media live on different grids");
  if (ref.speed != pert.speed)
    throw InvalidMedium("geometric_interp: speed fields must match");
  Medium2D out = ref;
  for (std::size_t i = 0; i < ref.n_nodes(); ++i)
    out.sigma[i] = ref.sigma[i] * std::pow(pert.sigma[i] / ref.sigma[i], eps);
  return out;
}

namespace detail {

template <typename MediumT>
DataSet born_oracle_impl(const MediumT& reference, const MediumT& perturbed, const Pulse& pulse,
                         double tau, std::size_t two_n, double fd_step, double* richardson) {
  if (!(fd_step > 0.0)) throw ValidationError("born_oracle: fd_step must be positive");
  const DataSet d0 = simulate_spectral(reference, pulse, tau, two_n);
  auto directional = [&](double eps) {
    const DataSet dp = simulate_spectral(geometric_interp(reference, perturbed, eps), pulse,
                                         tau, two_n);
    const DataSet dm = simulate_spectral(geometric_interp(reference, perturbed, -eps), pulse,
                                         tau, two_n);
    std::vector<DenseMatrix> der(two_n);
    for (std::size_t k = 0; k < two_n; ++k)
      der[k] = scaled(add_scaled(dp.frames[k], -1.0, dm.frames[k]), 0.5 / eps);
    return der;
  };
  std::vector<DenseMatrix> der = directional(fd_step);
  if (richardson != nullptr) {
    const std::vector<DenseMatrix> der_half = directional(0.5 * fd_step);
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < two_n; ++k) {
      num = std::max(num, max_abs(add_scaled(der[k], -1.0, der_half[k])));
      den = std::max(den, max_abs(der_half[k]));
    }
    *richardson = den > 0.0 ? num / den : 0.0;
  }
  std::vector<DenseMatrix> frames(two_n);
  for (std::size_t k = 0; k < two_n; ++k) frames[k] = add_scaled(d0.frames[k], 1.0, der[k]);
  return DataSet(tau, std::move(frames));
}

}  // namespace detail

// First-order (in log-impedance) prediction of the perturbed data:
// D_ref + directional derivative toward the perturbed medium, the derivative
// taken by central differences of exact solves. The optional richardson
// output is the relative change when fd_step is halved.
inline DataSet born_oracle(const Medium1D& reference, const Medium1D& perturbed,
                           const Pulse& pulse, double tau, std::size_t two_n,
                           double fd_step = 1e-3, double* richardson = nullptr) {
  return detail::born_oracle_impl(reference, perturbed, pulse, tau, two_n, fd_step, richardson);
}

inline DataSet born_oracle(const Medium2D& reference, const Medium2D& perturbed,
                           const Pulse& pulse, double tau, std::size_t two_n,
                           double fd_step = 1e-3, double* richardson = nullptr) {
  return detail::born_oracle_impl(reference, perturbed, pulse, tau, two_n, fd_step, richardson);
}

}  // namespace dtb
