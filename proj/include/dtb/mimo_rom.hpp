// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dtb/block_matrix.hpp"
#include "dtb/data_set.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/gram.hpp"
#include "dtb/linalg.hpp"

namespace dtb {

// Choice of diagonal-block square root in the block Cholesky factorization.
// Identity keeps the diagonal blocks symmetric (principal root); Triangular
// makes them upper triangular, so block size 1 reduces to the scalar factor.
enum class QPolicy { Identity, Triangular };

// Block upper-triangular R with x = R^T R. The k-th diagonal block is a square
// root of the k-th Schur complement; failure there reports block index k.
inline BlockMatrix block_cholesky(const BlockMatrix& x, QPolicy policy) {
  const std::size_t nb = x.n_blocks();
  const std::size_t m = x.block_size();
  const double asym = max_asymmetry(x.dense());
  if (asym > kSymmetryTol * std::max(1.0, max_abs(x.dense())))
    throw NonSymmetric("block_cholesky: input asymmetry " + std::to_string(asym));

  BlockMatrix r(nb, m);
  for (std::size_t k = 1; k <= nb; ++k) {
    DenseMatrix schur = x.block(k, k);
    for (std::size_t i = 1; i < k; ++i) {
      const DenseMatrix rik = r.block(i, k);
      schur = add_scaled(schur, -1.0, matmul_tn(rik, rik));
    }
    symmetrize(schur);
    DenseMatrix rkk;
    try {
      rkk = policy == QPolicy::Identity ? spd_sqrt(schur) : cholesky_upper(schur);
    } catch (const NotPositiveDefinite&) {
      throw NotPositiveDefinite("block_cholesky: Schur complement at block " + std::to_string(k) +
                                    " is not positive definite",
                                static_cast<int>(k));
    }
    r.set_block(k, k, rkk);
    for (std::size_t j = k + 1; j <= nb; ++j) {
      DenseMatrix acc = x.block(k, j);
      for (std::size_t i = 1; i < k; ++i)
        acc = add_scaled(acc, -1.0, matmul_tn(r.block(i, k), r.block(i, j)));
      DenseMatrix rkj = policy == QPolicy::Triangular
                            ? solve_lower_triangular(transpose(rkk), acc)
                            : solve_linear(rkk, acc);
      r.set_block(k, j, rkj);
    }
  }
  return r;
}

namespace detail {

// Solves R^T z = s block-row by block-row for a block upper-triangular R whose
// diagonal blocks need not be triangular themselves.
inline DenseMatrix block_solve_transposed(const BlockMatrix& r, const DenseMatrix& s) {
  const std::size_t nb = r.n_blocks();
  const std::size_t m = r.block_size();
  if (s.rows() != r.dim())
    throw ShapeMismatch("block_solve_transposed: right-hand side has wrong row count");
  const std::size_t p = s.cols();

  DenseMatrix z(s.rows(), p);
  DenseMatrix rhs(m, p);
  for (std::size_t i = 1; i <= nb; ++i) {
    const std::size_t r0 = (i - 1) * m;
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < p; ++c) rhs(a, c) = s(r0 + a, c);
    for (std::size_t k = 1; k < i; ++k) {
      const DenseMatrix rki = r.block(k, i);
      const std::size_t z0 = (k - 1) * m;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t c = 0; c < p; ++c) {
          double sum = 0.0;
          for (std::size_t b = 0; b < m; ++b) sum += rki(b, a) * z(z0 + b, c);
          rhs(a, c) -= sum;
        }
    }
    const DenseMatrix zi = solve_linear(transpose(r.block(i, i)), rhs);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t c = 0; c < p; ++c) z(r0 + a, c) = zi(a, c);
  }
  return z;
}

}  // namespace detail

// Multi-channel reduced model; the propagator is block tridiagonal in the
// block-orthogonalized snapshot basis and reproduces the first 2n frames.
struct MimoRom {
  std::size_t n = 0;
  std::size_t m = 0;
  double tau = 0.0;
  BlockMatrix p_tilde;         // nm x nm, block tridiagonal
  DenseMatrix d0_sqrt;         // principal root of the first frame
  BlockMatrix r_chol;          // block Cholesky factor of the mass Gram
  double offband_ratio = 0.0;  // largest entry outside the block band before
                               // zeroing, relative to the largest entry
};

inline MimoRom build_block_rom(const DataSet& data, std::size_t n) {
  GramPair gram = assemble_gram(data, n);
  const std::size_t m = data.m;
  BlockMatrix r = block_cholesky(gram.mass, QPolicy::Identity);

  DenseMatrix left = detail::block_solve_transposed(r, gram.stiff.dense());
  DenseMatrix p = transpose(detail::block_solve_transposed(r, transpose(left)));
  symmetrize(p);

  double off = 0.0;
  const double scale = max_abs(p);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i <= j + 1 && j <= i + 1) continue;
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) {
          double& e = p(i * m + a, j * m + b);
          off = std::max(off, std::abs(e));
          e = 0.0;
        }
    }

  if (spectral_norm_sym(p) >= 1.0)
    throw NonContractive("build_block_rom: projected propagator is not a contraction");

  MimoRom rom;
  rom.n = n;
  rom.m = m;
  rom.tau = data.tau;
  rom.p_tilde = BlockMatrix(n, m);
  rom.p_tilde.dense() = std::move(p);
  rom.d0_sqrt = spd_sqrt(data.frame(0));
  rom.r_chol = std::move(r);
  rom.offband_ratio = scale > 0.0 ? off / scale : 0.0;
  return rom;
}

inline MimoRom build_block_rom(const DataSet& data) {
  return build_block_rom(data, data.two_n / 2);
}

// Block Chebyshev resynthesis from the reduced model.
inline DataSet rom_data(const MimoRom& rom, std::size_t two_n) {
  const std::size_t m = rom.m;
  const std::size_t dim = rom.n * m;
  DenseMatrix bt(dim, m);
  for (std::size_t a = 0; a < m; ++a)
    for (std::size_t b = 0; b < m; ++b) bt(a, b) = rom.d0_sqrt(a, b);

  const DenseMatrix& p = rom.p_tilde.dense();
  DenseMatrix cur = bt, prev = bt;
  std::vector<DenseMatrix> frames;
  frames.reserve(two_n);
  for (std::size_t k = 0; k < two_n; ++k) {
    if (k == 1) {
      DenseMatrix next = matmul(p, cur);
      prev = cur;
      cur = std::move(next);
    } else if (k >= 2) {
      DenseMatrix next = add_scaled(scaled(matmul(p, cur), 2.0), -1.0, prev);
      prev = cur;
      cur = std::move(next);
    }
    DenseMatrix f = matmul_tn(bt, cur);
    symmetrize(f);
    frames.push_back(std::move(f));
  }
  return DataSet(rom.tau, std::move(frames));
}

// Block-bidiagonal factor of xi = (2 / tau^2)(I - p_tilde) with symmetric
// positive definite coefficient blocks and the orthogonal rotations that make
// the factorization consistent across media sharing the same reference.
struct MimoFactor {
  BlockMatrix l_tilde;
  std::vector<DenseMatrix> gammas;
  std::vector<DenseMatrix> gamma_hats;
  std::vector<DenseMatrix> q_blocks;
  BlockMatrix p_tilde_q;  // rotated propagator Q p_tilde Q^T
};

inline MimoFactor consistent_factor(const MimoRom& rom) {
  const std::size_t n = rom.n;
  const std::size_t m = rom.m;
  BlockMatrix xi(n, m);
  xi.dense() = scaled(add_scaled(DenseMatrix::identity(n * m), -1.0, rom.p_tilde.dense()),
                      2.0 / (rom.tau * rom.tau));

  auto checked_inverse = [](const DenseMatrix& x, std::size_t index, const char* who) {
    try {
      return spd_inverse(x);
    } catch (const NotPositiveDefinite&) {
      throw NotPositiveDefinite(std::string(who) + " lost positive definiteness at index " +
                                    std::to_string(index),
                                static_cast<int>(index));
    }
  };

  MimoFactor f;
  f.gammas.resize(n);
  f.gamma_hats.resize(n);
  f.q_blocks.resize(n);

  const DenseMatrix d0 = matmul(rom.d0_sqrt, rom.d0_sqrt);
  f.gamma_hats[0] = checked_inverse(d0, 1, "consistent_factor: first frame");
  f.q_blocks[0] = DenseMatrix::identity(m);
  {
    const DenseMatrix gh_sqrt = spd_sqrt(f.gamma_hats[0]);
    DenseMatrix inner = matmul(gh_sqrt, matmul(xi.block(1, 1), gh_sqrt));
    symmetrize(inner);
    f.gammas[0] = checked_inverse(inner, 1, "consistent_factor: gamma");
  }

  for (std::size_t j = 1; j < n; ++j) {
    const DenseMatrix beta = scaled(xi.block(j, j + 1), -1.0);
    const DenseMatrix mj =
        matmul(f.gammas[j - 1], matmul(spd_sqrt(f.gamma_hats[j - 1]), matmul(f.q_blocks[j - 1], beta)));
    auto polar = polar_left(mj);
    f.q_blocks[j] = std::move(polar.second);
    DenseMatrix mmt = matmul_nt(mj, mj);
    symmetrize(mmt);
    f.gamma_hats[j] = checked_inverse(mmt, j + 1, "consistent_factor: gamma_hat");

    const DenseMatrix gh_sqrt = spd_sqrt(f.gamma_hats[j]);
    DenseMatrix rotated = matmul(f.q_blocks[j], matmul(xi.block(j + 1, j + 1), transpose(f.q_blocks[j])));
    DenseMatrix inner = matmul(gh_sqrt, matmul(rotated, gh_sqrt));
    inner = add_scaled(inner, -1.0, checked_inverse(f.gammas[j - 1], j, "consistent_factor: gamma"));
    symmetrize(inner);
    f.gammas[j] = checked_inverse(inner, j + 1, "consistent_factor: gamma");
  }

  f.l_tilde = BlockMatrix(n, m);
  for (std::size_t j = 0; j < n; ++j) {
    const DenseMatrix g_inv_sqrt = spd_inv_sqrt(f.gammas[j]);
    f.l_tilde.set_block(j + 1, j + 1,
                        scaled(matmul(spd_inv_sqrt(f.gamma_hats[j]), g_inv_sqrt), -1.0));
    if (j + 1 < n)
      f.l_tilde.set_block(j + 2, j + 1, matmul(spd_inv_sqrt(f.gamma_hats[j + 1]), g_inv_sqrt));
  }

  f.p_tilde_q = BlockMatrix(n, m);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = i > 1 ? i - 1 : 1; j <= n && j <= i + 1; ++j)
      f.p_tilde_q.set_block(
          i, j,
          matmul(f.q_blocks[i - 1], matmul(rom.p_tilde.block(i, j), transpose(f.q_blocks[j - 1]))));
  return f;
}

}  // namespace dtb
