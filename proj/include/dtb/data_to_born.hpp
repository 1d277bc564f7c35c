// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "dtb/data_set.hpp"
#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"
#include "dtb/forward.hpp"
#include "dtb/medium.hpp"
#include "dtb/mimo_rom.hpp"
#include "dtb/pulse.hpp"
#include "dtb/siso_rom.hpp"

namespace dtb {

namespace detail {

inline void check_factor_pair(const DenseMatrix& l, const DenseMatrix& l0,
                              const DenseMatrix& d0_sqrt) {
  if (!l.square() || l.rows() != l0.rows() || l.cols() != l0.cols())
    throw ShapeMismatch("chebyshev_derivative: factors must share shape");
  const std::size_t m = d0_sqrt.rows();
  if (m == 0 || d0_sqrt.cols() != m || l.rows() % m != 0)
    throw ShapeMismatch("chebyshev_derivative: first-frame root does not tile the factor");
}

// Shared body of the derivative recursion. The multiplier of z_{j-1} is the
// caller's choice; the supported form is 2 p0 with p0 = I - (tau^2/2) l0 l0^T.
inline std::vector<DenseMatrix> derivative_recursion(const DenseMatrix& l,
                                                     const DenseMatrix& l0,
                                                     const DenseMatrix& d0_sqrt, double tau,
                                                     std::size_t two_n,
                                                     const DenseMatrix& multiplier) {
  const std::size_t dim = l.rows();
  const std::size_t m = d0_sqrt.rows();
  const double t2 = tau * tau;

  // delta = l l0^T + l0 l^T - 2 l0 l0^T, the directional derivative of
  // l(eps) l(eps)^T along l - l0 at the reference.
  DenseMatrix delta = matmul_nt(l, l0);
  delta = add_scaled(delta, 1.0, matmul_nt(l0, l));
  delta = add_scaled(delta, -2.0, matmul_nt(l0, l0));
  symmetrize(delta);

  DenseMatrix p0 = add_scaled(DenseMatrix::identity(dim), -0.5 * t2, matmul_nt(l0, l0));
  symmetrize(p0);

  DenseMatrix e1(dim, m);
  for (std::size_t a = 0; a < m; ++a) e1(a, a) = 1.0;

  // Chebyshev states of the reference propagator, applied to e1.
  DenseMatrix tcur = e1, tprev = e1;
  DenseMatrix zcur(dim, m), zprev(dim, m);

  std::vector<DenseMatrix> out;
  out.reserve(two_n);
  for (std::size_t k = 0; k < two_n; ++k) {
    if (k == 1) {
      zprev = zcur;
      zcur = scaled(matmul(delta, e1), -0.5 * t2);
      tprev = tcur;
      tcur = matmul(p0, tcur);
    } else if (k >= 2) {
      DenseMatrix znext = add_scaled(scaled(matmul(multiplier, zcur), 2.0), -1.0, zprev);
      znext = add_scaled(znext, -t2, matmul(delta, tcur));
      zprev = std::move(zcur);
      zcur = std::move(znext);
      DenseMatrix tnext = add_scaled(scaled(matmul(p0, tcur), 2.0), -1.0, tprev);
      tprev = std::move(tcur);
      tcur = std::move(tnext);
    }
    DenseMatrix top(m, m);
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b) top(a, b) = zcur(a, b);
    DenseMatrix frame = matmul(d0_sqrt, matmul(top, d0_sqrt));
    symmetrize(frame);
    out.push_back(std::move(frame));
  }
  return out;
}

}  // namespace detail

// Derivative of the resynthesized frames along the factor perturbation
// l - l0, holding the first frame fixed: frame k is
// d0^{1/2} (E1^T dT_k E1) d0^{1/2} from the differentiated Chebyshev
// recursion. Frame 0 is always zero.
inline std::vector<DenseMatrix> chebyshev_derivative(const DenseMatrix& l, const DenseMatrix& l0,
                                                     const DenseMatrix& d0_sqrt, double tau,
                                                     std::size_t two_n) {
  detail::check_factor_pair(l, l0, d0_sqrt);
  DenseMatrix p0 =
      add_scaled(DenseMatrix::identity(l.rows()), -0.5 * tau * tau, matmul_nt(l0, l0));
  symmetrize(p0);
  return detail::derivative_recursion(l, l0, d0_sqrt, tau, two_n, p0);
}

// Variant that multiplies z_{j-1} by 2 xi(p0) = 2 (2/tau^2)(I - p0) instead of
// 2 p0. It does not track the finite-difference derivative; it exists so the
// verification command can report how far it drifts.
inline std::vector<DenseMatrix> chebyshev_derivative_xi_variant(const DenseMatrix& l,
                                                                const DenseMatrix& l0,
                                                                const DenseMatrix& d0_sqrt,
                                                                double tau, std::size_t two_n) {
  detail::check_factor_pair(l, l0, d0_sqrt);
  DenseMatrix xi0 = matmul_nt(l0, l0);
  symmetrize(xi0);
  return detail::derivative_recursion(l, l0, d0_sqrt, tau, two_n, xi0);
}

// Result of the transform: the reference response, the first-order correction
// frames, and their sum.
struct DtbOutput {
  DataSet frames;
  DataSet reference;
  std::vector<DenseMatrix> derivative;
};

namespace detail {

inline void check_transform_pair(const DataSet& measured, const DataSet& reference,
                                 std::size_t n) {
  if (measured.m != reference.m)
    throw ShapeMismatch("dtb_transform: measured and reference channel counts differ");
  if (measured.two_n != reference.two_n)
    throw ShapeMismatch("dtb_transform: measured and reference frame counts differ");
  if (measured.tau != reference.tau)
    throw ShapeMismatch("dtb_transform: measured and reference sample spacings differ");
  if (n == 0 || 2 * n > measured.two_n)
    throw ShapeMismatch("dtb_transform: state count does not fit the frame count");
}

inline DtbOutput assemble_output(DataSet reference, std::vector<DenseMatrix> derivative) {
  std::vector<DenseMatrix> frames;
  frames.reserve(reference.two_n);
  for (std::size_t k = 0; k < reference.two_n; ++k)
    frames.push_back(add_scaled(reference.frame(k), 1.0, derivative[k]));
  DtbOutput out{DataSet(reference.tau, std::move(frames)), std::move(reference),
                std::move(derivative)};
  return out;
}

}  // namespace detail

// Single-channel transform: scalar factors from both data sets, then the
// derivative recursion seeded with the measured first frame.
inline DtbOutput dtb_transform_siso(const DataSet& measured, const DataSet& reference,
                                    std::size_t n) {
  detail::check_transform_pair(measured, reference, n);
  if (measured.m != 1) throw ShapeMismatch("dtb_transform_siso: expected single-channel data");

  SisoFactor f = factorize(build_rom(measured, n));
  SisoFactor f0 = factorize(build_rom(reference, n));
  DenseMatrix d0_sqrt(1, 1);
  d0_sqrt(0, 0) = std::sqrt(measured.scalar(0));
  std::vector<DenseMatrix> der =
      chebyshev_derivative(f.l_tilde, f0.l_tilde, d0_sqrt, measured.tau, measured.two_n);
  return detail::assemble_output(reference, std::move(der));
}

// Multi-channel transform through the consistent block factors.
inline DtbOutput dtb_transform_mimo(const DataSet& measured, const DataSet& reference,
                                    std::size_t n) {
  detail::check_transform_pair(measured, reference, n);

  MimoFactor f = consistent_factor(build_block_rom(measured, n));
  MimoFactor f0 = consistent_factor(build_block_rom(reference, n));
  DenseMatrix d0_sqrt = spd_sqrt(measured.frame(0));
  std::vector<DenseMatrix> der = chebyshev_derivative(f.l_tilde.dense(), f0.l_tilde.dense(),
                                                      d0_sqrt, measured.tau, measured.two_n);
  return detail::assemble_output(reference, std::move(der));
}

inline DtbOutput dtb_transform(const DataSet& measured, const Medium1D& reference,
                               const Pulse& pulse, std::size_t n) {
  DataSet ref = simulate_spectral(reference, pulse, measured.tau, measured.two_n);
  return dtb_transform_siso(measured, ref, n);
}

inline DtbOutput dtb_transform(const DataSet& measured, const Medium2D& reference,
                               const Pulse& pulse, std::size_t n) {
  DataSet ref = simulate_spectral(reference, pulse, measured.tau, measured.two_n);
  return dtb_transform_mimo(measured, ref, n);
}

inline DtbOutput dtb_transform(const DataSet& measured, const Medium1D& reference,
                               const Pulse& pulse) {
  return dtb_transform(measured, reference, pulse, measured.two_n / 2);
}

inline DtbOutput dtb_transform(const DataSet& measured, const Medium2D& reference,
                               const Pulse& pulse) {
  return dtb_transform(measured, reference, pulse, measured.two_n / 2);
}

}  // namespace dtb
