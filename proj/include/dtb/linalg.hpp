// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"

extern "C" {
void dsyevd_(const char* jobz, const char* uplo, const int* n, double* a, const int* lda,
             double* w, double* work, const int* lwork, int* iwork, const int* liwork,
             int* info);
void dstedc_(const char* compz, const int* n, double* d, double* e, double* z, const int* ldz,
             double* work, const int* lwork, int* iwork, const int* liwork, int* info);
void openblas_set_num_threads(int);
}

namespace dtb {

// Relative tolerance for treating an input as symmetric. Inputs within this
// bound are symmetrized before factorization; beyond it we refuse.
inline constexpr double kSymmetryTol = 1e-12;

namespace detail {

inline void blas_single_thread_once() {
  // Pin the BLAS pool once so results are bitwise reproducible across runs.
  static const bool done = [] {
    openblas_set_num_threads(1);
    return true;
  }();
  (void)done;
}

inline DenseMatrix checked_symmetric_copy(const DenseMatrix& x, const char* who) {
  if (!x.square()) throw ShapeMismatch(std::string(who) + ": matrix not square");
  const double scale = max_abs(x);
  if (scale > 0.0 && max_asymmetry(x) > kSymmetryTol * scale)
    throw NonSymmetric(std::string(who) + ": input asymmetric beyond tolerance");
  DenseMatrix s = x;
  symmetrize(s);
  return s;
}

}  // namespace detail

struct EigDecomp {
  std::vector<double> values;  // ascending
  DenseMatrix vectors;         // column j holds the eigenvector for values[j]
};

// Full symmetric eigendecomposition (LAPACK dsyevd, divide and conquer).
inline EigDecomp sym_eig(const DenseMatrix& x) {
  detail::blas_single_thread_once();
  DenseMatrix s = detail::checked_symmetric_copy(x, "sym_eig");
  const int n = static_cast<int>(s.rows());
  EigDecomp out;
  out.values.assign(n, 0.0);
  out.vectors = DenseMatrix(n, n);
  if (n == 0) return out;

  // Symmetric input, so the row-major buffer doubles as column-major.
  std::vector<double> a(s.data(), s.data() + static_cast<std::size_t>(n) * n);
  const int lwork = 1 + 6 * n + 2 * n * n;
  const int liwork = 3 + 5 * n;
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  int info = 0;
  const char jobz = 'V', uplo = 'L';
  dsyevd_(&jobz, &uplo, &n, a.data(), &n, out.values.data(), work.data(), &lwork,
          iwork.data(), &liwork, &info);
  if (info != 0) throw NumericalError("sym_eig: dsyevd failed, info=" + std::to_string(info));
  // LAPACK hands back column-major eigenvectors; transpose into our layout.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          a[static_cast<std::size_t>(j) * n + i];
  return out;
}

// Eigendecomposition of a symmetric tridiagonal matrix given its diagonal d
// and subdiagonal e (LAPACK dstedc). Much cheaper than sym_eig for the large
// one-dimensional operators.
inline EigDecomp sym_eig_tridiag(std::vector<double> d, std::vector<double> e) {
  detail::blas_single_thread_once();
  const int n = static_cast<int>(d.size());
  if (e.size() + 1 != d.size() && !(d.empty() && e.empty()))
    throw ShapeMismatch("sym_eig_tridiag: need n-1 subdiagonal entries");
  EigDecomp out;
  if (n == 0) return out;
  std::vector<double> z(static_cast<std::size_t>(n) * n, 0.0);
  const int lwork = 1 + 4 * n + n * n;
  const int liwork = 6 + 6 * n + 5 * n * static_cast<int>(std::ceil(std::log2(std::max(2, n))));
  std::vector<double> work(static_cast<std::size_t>(lwork));
  std::vector<int> iwork(static_cast<std::size_t>(liwork));
  int info = 0;
  const char compz = 'I';
  dstedc_(&compz, &n, d.data(), e.data(), z.data(), &n, work.data(), &lwork, iwork.data(),
          &liwork, &info);
  if (info != 0)
    throw NumericalError("sym_eig_tridiag: dstedc failed, info=" + std::to_string(info));
  out.values = std::move(d);
  out.vectors = DenseMatrix(static_cast<std::size_t>(n), static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      out.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
          z[static_cast<std::size_t>(j) * n + i];
  return out;
}

// Cholesky factorization x = R^T R with R upper triangular. Throws
// NotPositiveDefinite carrying the 1-based index of the failing leading minor.
inline DenseMatrix cholesky_upper(const DenseMatrix& x) {
  DenseMatrix s = detail::checked_symmetric_copy(x, "cholesky_upper");
  const std::size_t n = s.rows();
  DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double sum = s(i, j);
      for (std::size_t k = 0; k < i; ++k) sum -= r(k, i) * r(k, j);
      if (i == j) {
        if (!(sum > 0.0))
          throw NotPositiveDefinite(
              "cholesky_upper: leading minor " + std::to_string(i + 1) + " not positive",
              static_cast<int>(i + 1));
        r(i, i) = std::sqrt(sum);
      } else {
        r(i, j) = sum / r(i, i);
      }
    }
  }
  return r;
}

// Applies f to the spectrum: returns Y f(Lambda) Y^T v for the decomposition
// of a symmetric x. The overload with a precomputed EigDecomp lets callers
// amortize one factorization over many function applications.
inline DenseMatrix apply_spectral_fn(const EigDecomp& eig,
                                     const std::function<double(double)>& f,
                                     const DenseMatrix& v) {
  const std::size_t n = eig.values.size();
  if (v.rows() != n) throw ShapeMismatch("apply_spectral_fn: vector dimension mismatch");
  DenseMatrix w = matmul_tn(eig.vectors, v);
  for (std::size_t i = 0; i < n; ++i) {
    const double fi = f(eig.values[i]);
    if (!std::isfinite(fi))
      throw DomainError("apply_spectral_fn: f not finite at eigenvalue " +
                        std::to_string(eig.values[i]));
    for (std::size_t j = 0; j < w.cols(); ++j) w(i, j) *= fi;
  }
  return matmul(eig.vectors, w);
}

inline DenseMatrix apply_spectral_fn(const DenseMatrix& x,
                                     const std::function<double(double)>& f,
                                     const DenseMatrix& v) {
  return apply_spectral_fn(sym_eig(x), f, v);
}

// Principal square root of a symmetric positive semidefinite matrix.
// Eigenvalues below -1e-12 * spectral radius raise NotPositiveDefinite;
// tiny negative rounding noise is clamped to zero.
inline DenseMatrix spd_sqrt(const DenseMatrix& x) {
  EigDecomp eig = sym_eig(x);
  const std::size_t n = eig.values.size();
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  DenseMatrix w = transpose(eig.vectors);
  for (std::size_t i = 0; i < n; ++i) {
    double v = eig.values[i];
    if (v < -kSymmetryTol * scale)
      throw NotPositiveDefinite("spd_sqrt: negative eigenvalue " + std::to_string(v));
    if (v < 0.0) v = 0.0;
    const double s = std::sqrt(v);
    for (std::size_t j = 0; j < n; ++j) w(i, j) *= s;
  }
  DenseMatrix out = matmul(eig.vectors, w);
  symmetrize(out);
  return out;
}

namespace detail {

// f(x) = Y f(Lambda) Y^T for SPD x, with a positivity check. Shared by the
// inverse and inverse square root helpers.
inline DenseMatrix spd_spectral_map(const DenseMatrix& x,
                                    const std::function<double(double)>& f,
                                    const char* who) {
  EigDecomp eig = sym_eig(x);
  const std::size_t n = eig.values.size();
  double scale = 0.0;
  for (double v : eig.values) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) throw NotPositiveDefinite(std::string(who) + ": zero matrix");
  DenseMatrix w = transpose(eig.vectors);
  for (std::size_t i = 0; i < n; ++i) {
    const double v = eig.values[i];
    if (v <= kSymmetryTol * scale)
      throw NotPositiveDefinite(std::string(who) + ": eigenvalue " + std::to_string(v) +
                                " not positive");
    const double s = f(v);
    for (std::size_t j = 0; j < n; ++j) w(i, j) *= s;
  }
  DenseMatrix out = matmul(eig.vectors, w);
  symmetrize(out);
  return out;
}

}  // namespace detail

inline DenseMatrix spd_inverse(const DenseMatrix& x) {
  return detail::spd_spectral_map(x, [](double v) { return 1.0 / v; }, "spd_inverse");
}

inline DenseMatrix spd_inv_sqrt(const DenseMatrix& x) {
  return detail::spd_spectral_map(x, [](double v) { return 1.0 / std::sqrt(v); },
                                  "spd_inv_sqrt");
}

// Left polar decomposition x = spd * orth with spd = (x x^T)^{1/2}.
// Scalars: (a, 1) for a > 0 and (|a|, -1) for a < 0. Singular values below
// 1e-10 times the largest mean the orthogonal factor is not well defined.
inline std::pair<DenseMatrix, DenseMatrix> polar_left(const DenseMatrix& x) {
  if (!x.square()) throw ShapeMismatch("polar_left: matrix not square");
  DenseMatrix xxt = matmul_nt(x, x);
  symmetrize(xxt);
  EigDecomp eig = sym_eig(xxt);
  const std::size_t n = eig.values.size();
  std::vector<double> sv(n);
  double sv_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sv[i] = std::sqrt(std::max(0.0, eig.values[i]));
    sv_max = std::max(sv_max, sv[i]);
  }
  if (sv_max == 0.0) throw Singular("polar_left: zero matrix");
  for (double s : sv)
    if (s < 1e-10 * sv_max)
      throw Singular("polar_left: singular value ratio below 1e-10");
  DenseMatrix w = transpose(eig.vectors);
  DenseMatrix wi = w;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      w(i, j) *= sv[i];
      wi(i, j) /= sv[i];
    }
  DenseMatrix spd = matmul(eig.vectors, w);
  symmetrize(spd);
  DenseMatrix orth = matmul(matmul(eig.vectors, wi), x);
  return {std::move(spd), std::move(orth)};
}

// Back substitution: returns R^{-1} b for upper triangular R.
inline DenseMatrix solve_upper_triangular(const DenseMatrix& r, const DenseMatrix& b) {
  const std::size_t n = r.rows();
  if (!r.square() || b.rows() != n) throw ShapeMismatch("solve_upper_triangular: shapes");
  DenseMatrix x = b;
  for (std::size_t jj = n; jj-- > 0;) {
    if (r(jj, jj) == 0.0) throw Singular("solve_upper_triangular: zero pivot");
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double s = x(jj, c);
      for (std::size_t k = jj + 1; k < n; ++k) s -= r(jj, k) * x(k, c);
      x(jj, c) = s / r(jj, jj);
    }
  }
  return x;
}

// Forward substitution: returns L^{-1} b for lower triangular L.
inline DenseMatrix solve_lower_triangular(const DenseMatrix& l, const DenseMatrix& b) {
  const std::size_t n = l.rows();
  if (!l.square() || b.rows() != n) throw ShapeMismatch("solve_lower_triangular: shapes");
  DenseMatrix x = b;
  for (std::size_t i = 0; i < n; ++i) {
    if (l(i, i) == 0.0) throw Singular("solve_lower_triangular: zero pivot");
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double s = x(i, c);
      for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x(k, c);
      x(i, c) = s / l(i, i);
    }
  }
  return x;
}

// Returns b R^{-1} (right division by an upper triangular factor).
inline DenseMatrix solve_right_upper_triangular(const DenseMatrix& b, const DenseMatrix& r) {
  const std::size_t n = r.rows();
  if (!r.square() || b.cols() != n) throw ShapeMismatch("solve_right_upper_triangular: shapes");
  DenseMatrix x = b;
  for (std::size_t j = 0; j < n; ++j) {
    if (r(j, j) == 0.0) throw Singular("solve_right_upper_triangular: zero pivot");
    for (std::size_t i = 0; i < b.rows(); ++i) {
      double s = x(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= x(i, k) * r(k, j);
      x(i, j) = s / r(j, j);
    }
  }
  return x;
}

// Gaussian elimination with partial pivoting; fine for the small per-block
// systems this library solves.
inline DenseMatrix solve_linear(DenseMatrix a, DenseMatrix b) {
  const std::size_t n = a.rows();
  if (!a.square() || b.rows() != n) throw ShapeMismatch("solve_linear: shapes");
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    double best = std::abs(a(col, col));
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(a(i, col)) > best) {
        best = std::abs(a(i, col));
        piv = i;
      }
    if (best == 0.0) throw Singular("solve_linear: singular matrix");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(col, j), a(piv, j));
      for (std::size_t j = 0; j < b.cols(); ++j) std::swap(b(col, j), b(piv, j));
    }
    for (std::size_t i = col + 1; i < n; ++i) {
      const double f = a(i, col) / a(col, col);
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a(i, j) -= f * a(col, j);
      for (std::size_t j = 0; j < b.cols(); ++j) b(i, j) -= f * b(col, j);
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t c = 0; c < b.cols(); ++c) {
      double s = b(ii, c);
      for (std::size_t k = ii + 1; k < n; ++k) s -= a(ii, k) * b(k, c);
      b(ii, c) = s / a(ii, ii);
    }
  }
  return b;
}

// Spectral norm of a symmetric matrix (largest |eigenvalue|).
inline double spectral_norm_sym(const DenseMatrix& x) {
  EigDecomp eig = sym_eig(x);
  if (eig.values.empty()) return 0.0;
  return std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
}

}  // namespace dtb
