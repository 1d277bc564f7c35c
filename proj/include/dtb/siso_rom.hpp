// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "dtb/data_set.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/gram.hpp"
#include "dtb/linalg.hpp"

namespace dtb {

// Single-channel reduced model: the measured frames determine an n-state
// propagator that is tridiagonal in the orthogonalized snapshot basis and
// reproduces the first 2n frames exactly.
struct SisoRom {
  std::size_t n = 0;
  double tau = 0.0;
  DenseMatrix p_tilde;         // n x n, tridiagonal (off-band zeroed)
  double b_norm = 0.0;         // sqrt(D_0)
  DenseMatrix r_chol;          // upper Cholesky factor of the mass Gram
  double offband_ratio = 0.0;  // largest off-tridiagonal entry before zeroing,
                               // relative to the largest entry
};

inline SisoRom build_rom(const DataSet& data, std::size_t n) {
  if (data.m != 1) throw ShapeMismatch("build_rom: expected single-channel data");
  GramPair gram = assemble_gram(data, n);

  DenseMatrix r = cholesky_upper(gram.mass.dense());
  DenseMatrix y = solve_lower_triangular(transpose(r), gram.stiff.dense());
  DenseMatrix p = solve_right_upper_triangular(y, r);
  symmetrize(p);

  double off = 0.0;
  const double scale = max_abs(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j > i + 1 || i > j + 1) {
        off = std::max(off, std::abs(p(i, j)));
        p(i, j) = 0.0;
      }

  if (spectral_norm_sym(p) >= 1.0)
    throw NonContractive("build_rom: projected propagator is not a contraction");

  SisoRom rom;
  rom.n = n;
  rom.tau = data.tau;
  rom.p_tilde = std::move(p);
  rom.b_norm = std::sqrt(data.scalar(0));
  rom.r_chol = std::move(r);
  rom.offband_ratio = scale > 0.0 ? off / scale : 0.0;
  return rom;
}

inline SisoRom build_rom(const DataSet& data) { return build_rom(data, data.two_n / 2); }

// Chebyshev resynthesis from the reduced model; exact on the first 2n frames.
inline DataSet rom_data(const SisoRom& rom, std::size_t two_n) {
  const std::size_t n = rom.n;
  std::vector<double> cur(n, 0.0), prev(n, 0.0), next(n, 0.0);
  cur[0] = rom.b_norm;
  std::vector<double> out(two_n, 0.0);
  for (std::size_t k = 0; k < two_n; ++k) {
    if (k == 1) {
      prev = cur;
      cur = matvec(rom.p_tilde, cur);
    } else if (k >= 2) {
      const std::vector<double> pu = matvec(rom.p_tilde, cur);
      for (std::size_t i = 0; i < n; ++i) next[i] = 2.0 * pu[i] - prev[i];
      prev = cur;
      cur = next;
    }
    out[k] = rom.b_norm * cur[0];
  }
  return DataSet::from_scalars(rom.tau, out);
}

// Bidiagonal factorization of xi = (2 / tau^2)(I - p_tilde) together with the
// positive coefficient pair it encodes. Sign convention: negative diagonal,
// positive subdiagonal.
struct SisoFactor {
  DenseMatrix l_tilde;
  std::vector<double> gammas;
  std::vector<double> gamma_hats;
};

inline SisoFactor factorize(const SisoRom& rom) {
  const std::size_t n = rom.n;
  const double it2 = 2.0 / (rom.tau * rom.tau);
  DenseMatrix xi = add_scaled(DenseMatrix::identity(n), -1.0, rom.p_tilde);
  xi = scaled(xi, it2);
  DenseMatrix l = transpose(cholesky_upper(xi));
  for (std::size_t j = 0; j < n; ++j)
    if (l(j, j) > 0.0)
      for (std::size_t i = 0; i < n; ++i) l(i, j) = -l(i, j);

  SisoFactor f;
  f.gammas.resize(n);
  f.gamma_hats.resize(n);
  const double d0 = rom.b_norm * rom.b_norm;
  if (!(d0 > 0.0)) throw NonPositive("factorize: first frame must be positive");
  f.gamma_hats[0] = 1.0 / d0;
  for (std::size_t j = 0; j < n; ++j) {
    f.gammas[j] = 1.0 / (f.gamma_hats[j] * l(j, j) * l(j, j));
    if (j + 1 < n) {
      const double sub = l(j + 1, j);
      if (sub == 0.0) throw Singular("factorize: decoupled state at index " + std::to_string(j + 1));
      f.gamma_hats[j + 1] = 1.0 / (f.gammas[j] * sub * sub);
    }
  }
  f.l_tilde = std::move(l);
  return f;
}

struct VwDiagnostics {
  DenseMatrix v;            // orthonormalized primary snapshots, fine grid by n
  DenseMatrix w;            // dual basis
  double v_orth = 0.0;      // max |V^T V - I|
  double w_orth = 0.0;      // max |W^T W - I|
  double exact_residual = 0.0;     // factor mismatch using the exact generator
  double discrete_residual = 0.0;  // same using the plain grid factor
};

// Reconstructs the snapshot bases on the fine grid and measures how well the
// data-driven factor matches the projected fine-grid operator. The exact
// generator (2/tau) L (L^T L)^{-1/2} sin((tau/2) sqrt(L^T L)) makes W
// orthonormal to rounding; the residual against the plain factor L_q shows
// the time-discretization gap instead.
inline VwDiagnostics diagnostics_vw(const DenseMatrix& l_q, const DenseMatrix& b,
                                    const SisoRom& rom, const SisoFactor& factor) {
  const std::size_t big_n = l_q.rows();
  if (b.rows() != big_n || b.cols() != 1)
    throw ShapeMismatch("diagnostics_vw: sensor vector does not match the operator");
  DenseMatrix m = matmul_nt(l_q, l_q);
  symmetrize(m);
  EigDecomp eig = sym_eig(m);
  const double tau = rom.tau;

  auto propagate = [&](const DenseMatrix& v) {
    return apply_spectral_fn(
        eig, [tau](double lam) { return std::cos(tau * std::sqrt(std::max(0.0, lam))); }, v);
  };

  // Snapshot block [P_0 ... P_{n-1}], then V = P R^{-1}.
  DenseMatrix snaps(big_n, rom.n);
  DenseMatrix cur = b, prev = b;
  for (std::size_t k = 0; k < rom.n; ++k) {
    if (k == 1) {
      DenseMatrix next = propagate(cur);
      prev = cur;
      cur = next;
    } else if (k >= 2) {
      DenseMatrix next = add_scaled(scaled(propagate(cur), 2.0), -1.0, prev);
      prev = cur;
      cur = next;
    }
    for (std::size_t i = 0; i < big_n; ++i) snaps(i, k) = cur(i, 0);
  }
  VwDiagnostics d;
  d.v = solve_right_upper_triangular(snaps, rom.r_chol);
  d.v_orth = max_diff_identity(matmul_tn(d.v, d.v));

  // W = script_L^T V L_tilde^{-T}, using sin(x)/x on the spectrum of M.
  auto half_sinc = [tau](double lam) {
    const double s = std::sqrt(std::max(0.0, lam));
    const double arg = 0.5 * tau * s;
    if (arg < 1e-8) return 0.5 * tau * (1.0 - arg * arg / 6.0);
    return std::sin(arg) / s;
  };
  DenseMatrix gv = apply_spectral_fn(eig, half_sinc, d.v);
  DenseMatrix lt_v = scaled(matmul_tn(l_q, gv), 2.0 / tau);
  d.w = transpose(solve_lower_triangular(factor.l_tilde, transpose(lt_v)));
  d.w_orth = max_diff_identity(matmul_tn(d.w, d.w));

  DenseMatrix lw_exact = scaled(apply_spectral_fn(eig, half_sinc, matmul(l_q, d.w)), 2.0 / tau);
  d.exact_residual = max_abs(add_scaled(factor.l_tilde, -1.0, matmul_tn(d.v, lw_exact)));
  d.discrete_residual =
      max_abs(add_scaled(factor.l_tilde, -1.0, matmul_tn(d.v, matmul(l_q, d.w))));
  return d;
}

}  // namespace dtb
