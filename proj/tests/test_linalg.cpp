// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "dtb/linalg.hpp"
#include "support/test_util.hpp"

using dtb::DenseMatrix;
using dtb_test::max_diff;

TEST_CASE("cholesky_upper matches the 2x2 worked example") {
  DenseMatrix x(2, 2);
  x(0, 0) = 4.0; x(0, 1) = 2.0;
  x(1, 0) = 2.0; x(1, 1) = 5.0;
  DenseMatrix r = dtb::cholesky_upper(x);
  CHECK(r(0, 0) == Catch::Approx(2.0));
  CHECK(r(0, 1) == Catch::Approx(1.0));
  CHECK(r(1, 0) == 0.0);
  CHECK(r(1, 1) == Catch::Approx(2.0));
}

TEST_CASE("cholesky_upper reconstructs random SPD matrices") {
  for (unsigned seed : {1u, 2u, 3u}) {
    DenseMatrix x = dtb_test::random_spd(12, seed);
    DenseMatrix r = dtb::cholesky_upper(x);
    CHECK(max_diff(dtb::matmul_tn(r, r), x) < 1e-12 * dtb::max_abs(x) * 12);
    for (std::size_t i = 1; i < 12; ++i)
      for (std::size_t j = 0; j < i; ++j) CHECK(r(i, j) == 0.0);
  }
}

TEST_CASE("cholesky_upper reports the failing leading minor") {
  DenseMatrix x(3, 3);
  x(0, 0) = 1.0; x(0, 1) = 2.0; x(0, 2) = 0.0;
  x(1, 0) = 2.0; x(1, 1) = 1.0; x(1, 2) = 0.0;
  x(2, 0) = 0.0; x(2, 1) = 0.0; x(2, 2) = 1.0;
  try {
    dtb::cholesky_upper(x);
    FAIL("expected NotPositiveDefinite");
  } catch (const dtb::NotPositiveDefinite& e) {
    CHECK(e.index == 2);
  }
}

TEST_CASE("asymmetric input beyond tolerance is rejected") {
  DenseMatrix x = dtb_test::random_spd(4, 7);
  x(0, 3) += 1e-6;
  CHECK_THROWS_AS(dtb::cholesky_upper(x), dtb::NonSymmetric);
  CHECK_THROWS_AS(dtb::sym_eig(x), dtb::NonSymmetric);

  // Asymmetry within tolerance gets symmetrized silently.
  DenseMatrix y = dtb_test::random_spd(4, 8);
  y(0, 3) += 1e-15;
  CHECK_NOTHROW(dtb::cholesky_upper(y));
}

TEST_CASE("spd_sqrt matches the diagonal example and squares back") {
  DenseMatrix x(2, 2);
  x(0, 0) = 4.0; x(1, 1) = 9.0;
  DenseMatrix s = dtb::spd_sqrt(x);
  CHECK(s(0, 0) == Catch::Approx(2.0));
  CHECK(s(1, 1) == Catch::Approx(3.0));
  CHECK(std::abs(s(0, 1)) < 1e-14);

  DenseMatrix y = dtb_test::random_spd(9, 21);
  DenseMatrix ry = dtb::spd_sqrt(y);
  CHECK(max_diff(dtb::matmul(ry, ry), y) < 1e-11);
  CHECK(dtb::max_asymmetry(ry) == 0.0);
}

TEST_CASE("spd_sqrt rejects indefinite input") {
  DenseMatrix x(2, 2);
  x(0, 0) = 1.0; x(1, 1) = -0.5;
  CHECK_THROWS_AS(dtb::spd_sqrt(x), dtb::NotPositiveDefinite);
}

TEST_CASE("sym_eig reconstructs and returns orthonormal vectors") {
  DenseMatrix x = dtb_test::random_symmetric(15, 5);
  dtb::EigDecomp eig = dtb::sym_eig(x);
  for (std::size_t i = 1; i < eig.values.size(); ++i)
    CHECK(eig.values[i - 1] <= eig.values[i]);
  DenseMatrix vt_v = dtb::matmul_tn(eig.vectors, eig.vectors);
  CHECK(max_diff(vt_v, DenseMatrix::identity(15)) < 1e-13);
  DenseMatrix lam(15, 15);
  for (std::size_t i = 0; i < 15; ++i) lam(i, i) = eig.values[i];
  DenseMatrix rec = dtb::matmul(dtb::matmul(eig.vectors, lam), dtb::transpose(eig.vectors));
  CHECK(max_diff(rec, x) < 1e-13 * 15);
}

TEST_CASE("tridiagonal eigensolver agrees with the dense one") {
  const std::size_t n = 40;
  std::vector<double> d(n), e(n - 1);
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dist(0.5, 2.0);
  for (auto& v : d) v = dist(gen);
  for (auto& v : e) v = -dist(gen);
  DenseMatrix full(n, n);
  for (std::size_t i = 0; i < n; ++i) full(i, i) = d[i];
  for (std::size_t i = 0; i + 1 < n; ++i) {
    full(i, i + 1) = e[i];
    full(i + 1, i) = e[i];
  }
  dtb::EigDecomp a = dtb::sym_eig_tridiag(d, e);
  dtb::EigDecomp b = dtb::sym_eig(full);
  for (std::size_t i = 0; i < n; ++i) CHECK(a.values[i] == Catch::Approx(b.values[i]).margin(1e-12));
  DenseMatrix vt_v = dtb::matmul_tn(a.vectors, a.vectors);
  CHECK(max_diff(vt_v, DenseMatrix::identity(n)) < 1e-12);
}

TEST_CASE("apply_spectral_fn with identity map reproduces the matrix action") {
  DenseMatrix x = dtb_test::random_symmetric(10, 9);
  DenseMatrix v = dtb_test::random_matrix(10, 3, 10);
  DenseMatrix xv = dtb::matmul(x, v);
  DenseMatrix fv = dtb::apply_spectral_fn(x, [](double t) { return t; }, v);
  CHECK(max_diff(xv, fv) < 1e-12);
}

TEST_CASE("apply_spectral_fn refuses functions leaving the real line") {
  DenseMatrix x(2, 2);
  x(0, 0) = 1.0; x(1, 1) = -4.0;
  DenseMatrix v(2, 1);
  v(0, 0) = 1.0; v(1, 0) = 1.0;
  CHECK_THROWS_AS(dtb::apply_spectral_fn(x, [](double t) { return std::sqrt(t); }, v),
                  dtb::DomainError);
}

TEST_CASE("polar_left scalar sign convention") {
  DenseMatrix a(1, 1);
  a(0, 0) = 3.0;
  auto [s1, q1] = dtb::polar_left(a);
  CHECK(s1(0, 0) == Catch::Approx(3.0));
  CHECK(q1(0, 0) == Catch::Approx(1.0));
  a(0, 0) = -3.0;
  auto [s2, q2] = dtb::polar_left(a);
  CHECK(s2(0, 0) == Catch::Approx(3.0));
  CHECK(q2(0, 0) == Catch::Approx(-1.0));
}

TEST_CASE("polar_left recovers an SPD times rotation factorization") {
  const double c = std::cos(0.7), s = std::sin(0.7);
  DenseMatrix q(2, 2);
  q(0, 0) = c; q(0, 1) = -s;
  q(1, 0) = s; q(1, 1) = c;
  DenseMatrix spd = dtb_test::random_spd(2, 31, 1.0);
  DenseMatrix x = dtb::matmul(spd, q);
  auto [ps, pq] = dtb::polar_left(x);
  CHECK(max_diff(ps, spd) < 1e-10);
  CHECK(max_diff(pq, q) < 1e-10);
  CHECK(max_diff(dtb::matmul_nt(pq, pq), DenseMatrix::identity(2)) < 1e-12);
}

TEST_CASE("polar_left flags rank deficiency") {
  DenseMatrix x(2, 2);
  x(0, 0) = 1.0; x(0, 1) = 1.0;
  x(1, 0) = 1.0; x(1, 1) = 1.0;
  CHECK_THROWS_AS(dtb::polar_left(x), dtb::Singular);
}

TEST_CASE("triangular and general solvers invert what they claim") {
  DenseMatrix x = dtb_test::random_spd(8, 41);
  DenseMatrix r = dtb::cholesky_upper(x);
  DenseMatrix b = dtb_test::random_matrix(8, 2, 42);

  DenseMatrix y = dtb::solve_upper_triangular(r, b);
  CHECK(max_diff(dtb::matmul(r, y), b) < 1e-12);

  DenseMatrix l = dtb::transpose(r);
  DenseMatrix z = dtb::solve_lower_triangular(l, b);
  CHECK(max_diff(dtb::matmul(l, z), b) < 1e-12);

  DenseMatrix c = dtb_test::random_matrix(3, 8, 43);
  DenseMatrix w = dtb::solve_right_upper_triangular(c, r);
  CHECK(max_diff(dtb::matmul(w, r), c) < 1e-12);

  DenseMatrix g = dtb_test::random_matrix(8, 8, 44);
  DenseMatrix h = dtb::solve_linear(g, b);
  CHECK(max_diff(dtb::matmul(g, h), b) < 1e-10);
}

TEST_CASE("spd inverse helpers agree with the solvers") {
  DenseMatrix x = dtb_test::random_spd(6, 51);
  DenseMatrix xi = dtb::spd_inverse(x);
  CHECK(max_diff(dtb::matmul(x, xi), DenseMatrix::identity(6)) < 1e-10);
  DenseMatrix xs = dtb::spd_inv_sqrt(x);
  CHECK(max_diff(dtb::matmul(dtb::matmul(xs, x), xs), DenseMatrix::identity(6)) < 1e-10);
}

TEST_CASE("spectral norm of a symmetric matrix") {
  DenseMatrix x(2, 2);
  x(0, 0) = 2.0; x(1, 1) = -5.0;
  CHECK(dtb::spectral_norm_sym(x) == Catch::Approx(5.0));
}
