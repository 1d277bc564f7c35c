// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "dtb/forward.hpp"
#include "support/test_util.hpp"

using dtb::DenseMatrix;
using dtb::Medium1D;
using dtb::Medium2D;
using dtb::Pulse;

namespace {

Medium1D homogeneous_1d() { return dtb::homogeneous_medium_1d(400, 1.0); }

Pulse pulse_for_tau(double tau, double center_frac = 0.5, double band_frac = 0.15) {
  Pulse p;
  p.center_frequency = center_frac * dtb::kPi / tau;
  p.bandwidth = band_frac * dtb::kPi / tau;
  return p;
}

Medium2D small_box_2d() {
  auto one = [](double, double) { return 1.0; };
  return dtb::medium_from_fields_2d(20, 14, 0.05, one, one, {3, 9, 15});
}

DenseMatrix dense_m_from(const Medium1D& med) {
  DenseMatrix l = dtb::build_lq_1d(med);
  DenseMatrix m = dtb::matmul_nt(l, l);
  dtb::symmetrize(m);
  return m;
}

}  // namespace

TEST_CASE("1d transport factor has the documented bidiagonal form") {
  Medium1D med = dtb::medium_from_profile_1d(6, 0.6, [](double t) { return 1.0 + t; });
  DenseMatrix l = dtb::build_lq_1d(med);
  const double is = 1.0 / med.step;
  for (std::size_t j = 0; j < 6; ++j) {
    CHECK(l(j, j) ==
          Catch::Approx(-is * std::sqrt(med.sigma_primary[j] / med.sigma_dual[j])));
    if (j > 0)
      CHECK(l(j, j - 1) ==
            Catch::Approx(is * std::sqrt(med.sigma_primary[j] / med.sigma_dual[j - 1])));
    for (std::size_t k = 0; k + 1 < j; ++k) CHECK(l(j, k) == 0.0);
    for (std::size_t k = j + 1; k < 6; ++k) CHECK(l(j, k) == 0.0);
  }
}

TEST_CASE("homogeneous 1d operator is the half-cell tridiagonal laplacian") {
  Medium1D med = dtb::homogeneous_medium_1d(8, 8.0);  // step 1
  DenseMatrix m = dense_m_from(med);
  CHECK(m(0, 0) == Catch::Approx(1.0));
  for (std::size_t j = 1; j < 8; ++j) CHECK(m(j, j) == Catch::Approx(2.0));
  for (std::size_t j = 1; j < 8; ++j) {
    CHECK(m(j, j - 1) == Catch::Approx(-1.0));
    CHECK(m(j - 1, j) == Catch::Approx(-1.0));
  }
  CHECK(m(0, 2) == 0.0);
}

TEST_CASE("uniform 2x2 grid gives the mixed-boundary five-point stencil") {
  auto one = [](double, double) { return 1.0; };
  Medium2D med = dtb::medium_from_fields_2d(2, 2, 0.5, one, one, {0});
  DenseMatrix s = dtb::wave_operator_2d(med);
  const double ih2 = 4.0;  // 1 / h^2
  // Sensor-row nodes lose the flux through the accessible edge.
  CHECK(s(0, 0) == Catch::Approx(3.0 * ih2));
  CHECK(s(1, 1) == Catch::Approx(3.0 * ih2));
  CHECK(s(2, 2) == Catch::Approx(4.0 * ih2));
  CHECK(s(3, 3) == Catch::Approx(4.0 * ih2));
  CHECK(s(0, 1) == Catch::Approx(-ih2));
  CHECK(s(0, 2) == Catch::Approx(-ih2));
  CHECK(s(1, 3) == Catch::Approx(-ih2));
  CHECK(s(2, 3) == Catch::Approx(-ih2));
  CHECK(s(0, 3) == 0.0);
  CHECK(s(1, 2) == 0.0);
  CHECK(dtb::max_asymmetry(s) == 0.0);
}

TEST_CASE("2d operator is positive definite and matches its cholesky factor") {
  auto sig = dtb::inclusion_field(1.0, {{0.4, 0.3, 0.12, 0.35, false}});
  auto c = [](double, double) { return 1.0; };
  Medium2D med = dtb::medium_from_fields_2d(12, 9, 0.1, sig, c, {2, 6, 10});
  DenseMatrix s = dtb::wave_operator_2d(med);
  dtb::EigDecomp eig = dtb::sym_eig(s);
  CHECK(eig.values.front() > 0.0);
  DenseMatrix l = dtb::build_lq_2d(med);
  CHECK(dtb_test::max_diff(dtb::matmul_nt(l, l), s) < 1e-10 * dtb::max_abs(s));
}

TEST_CASE("tridiagonal eigenpath agrees with the dense operator") {
  Medium1D med = dtb::medium_from_profile_1d(
      60, 1.0, dtb::bump_profile(1.0, {{0.5, 0.08, 0.4}}));
  dtb::EigDecomp fast = dtb::wave_eig(med);
  dtb::EigDecomp dense = dtb::sym_eig(dense_m_from(med));
  for (std::size_t i = 0; i < fast.values.size(); ++i)
    CHECK(fast.values[i] == Catch::Approx(dense.values[i]).margin(1e-8));
}

TEST_CASE("sensor vectors follow the band-limited delta definition") {
  Medium1D med = dtb::homogeneous_medium_1d(80, 1.0);
  Pulse p = pulse_for_tau(0.05);
  DenseMatrix l = dtb::build_lq_1d(med);
  DenseMatrix b = dtb::sensor_vectors(l, p, {0}, med.step);
  REQUIRE(b.rows() == 80);
  REQUIRE(b.cols() == 1);

  DenseMatrix m = dense_m_from(med);
  DenseMatrix delta(80, 1);
  delta(0, 0) = 1.0 / std::sqrt(med.step);
  DenseMatrix expected = dtb::apply_spectral_fn(
      m, [&p](double lam) { return std::sqrt(p.f_hat(std::sqrt(std::max(0.0, lam)))); },
      delta);
  CHECK(dtb_test::max_diff(b, expected) < 1e-12);
}

TEST_CASE("sensor vector construction rejects coincident sensors") {
  Medium1D med = dtb::homogeneous_medium_1d(40, 1.0);
  Pulse p = pulse_for_tau(0.1);
  DenseMatrix l = dtb::build_lq_1d(med);
  CHECK_THROWS_AS(dtb::sensor_vectors(l, p, {3, 3}, med.step), dtb::DegenerateSensors);
}

TEST_CASE("spectral synthesis matches the frame-by-frame definition") {
  Medium1D med = dtb::medium_from_profile_1d(
      70, 1.0, dtb::layered_profile({0.4, 0.7}, {1.0, 1.4, 0.9}));
  const double tau = 0.05;
  Pulse p = pulse_for_tau(tau);
  DenseMatrix l = dtb::build_lq_1d(med);
  DenseMatrix b = dtb::sensor_vectors(l, p, {0}, med.step);
  dtb::DataSet data = dtb::synthesize_spectral(l, b, tau, 24);

  DenseMatrix m = dense_m_from(med);
  double scale = 0.0;
  for (std::size_t k = 0; k < 24; ++k) scale = std::max(scale, std::abs(data.scalar(k)));
  for (std::size_t k = 0; k < 24; ++k) {
    DenseMatrix ck = dtb::apply_spectral_fn(
        m,
        [&](double lam) { return std::cos(static_cast<double>(k) * tau *
                                          std::sqrt(std::max(0.0, lam))); },
        b);
    const double dk = dtb::matmul_tn(b, ck)(0, 0);
    CHECK(std::abs(data.scalar(k) - dk) < 1e-11 * scale);
  }
}

TEST_CASE("driver output equals the granular pipeline, 1d and 2d") {
  Medium1D med1 = dtb::medium_from_profile_1d(
      90, 1.0, dtb::bump_profile(1.0, {{0.45, 0.1, 0.3}}));
  const double tau1 = 0.045;
  Pulse p1 = pulse_for_tau(tau1);
  dtb::DataSet a = dtb::simulate_spectral(med1, p1, tau1, 30);
  DenseMatrix l1 = dtb::build_lq_1d(med1);
  dtb::DataSet bset = dtb::synthesize_spectral(
      l1, dtb::sensor_vectors(l1, p1, {0}, med1.step), tau1, 30);
  double scale1 = 0.0;
  for (std::size_t k = 0; k < 30; ++k) scale1 = std::max(scale1, std::abs(a.scalar(k)));
  for (std::size_t k = 0; k < 30; ++k)
    CHECK(std::abs(a.scalar(k) - bset.scalar(k)) < 1e-10 * scale1);

  Medium2D med2 = small_box_2d();
  const double tau2 = 0.125;
  Pulse p2 = pulse_for_tau(tau2, 0.5, 0.15);
  dtb::DataSet c = dtb::simulate_spectral(med2, p2, tau2, 16);
  DenseMatrix l2 = dtb::build_lq_2d(med2);
  dtb::DataSet d = dtb::synthesize_spectral(
      l2, dtb::sensor_vectors(l2, p2, med2.sensor_nodes(), med2.h * med2.h), tau2, 16);
  double scale2 = 0.0;
  for (std::size_t k = 0; k < 16; ++k) scale2 = std::max(scale2, dtb::max_abs(c.frames[k]));
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(dtb_test::max_diff(c.frames[k], d.frames[k]) < 1e-9 * scale2);
}

TEST_CASE("zero sensor functions produce identically zero data") {
  Medium1D med = dtb::homogeneous_medium_1d(50, 1.0);
  DenseMatrix l = dtb::build_lq_1d(med);
  DenseMatrix b(50, 1);
  dtb::DataSet data = dtb::synthesize_spectral(l, b, 0.05, 10);
  for (std::size_t k = 0; k < 10; ++k) CHECK(data.scalar(k) == 0.0);
}

TEST_CASE("fdtd matches spectral synthesis in 1d") {
  Medium1D med = homogeneous_1d();
  const double tau = 0.02;
  Pulse p = pulse_for_tau(tau);
  dtb::DataSet spec = dtb::simulate_spectral(med, p, tau, 40);
  dtb::DataSet fd = dtb::synthesize_fdtd(med, p, tau, 40, 32);
  double scale = 0.0, err = 0.0;
  for (std::size_t k = 0; k < 40; ++k) {
    scale = std::max(scale, std::abs(spec.scalar(k)));
    err = std::max(err, std::abs(spec.scalar(k) - fd.scalar(k)));
  }
  CHECK(err < 0.01 * scale);
}

TEST_CASE("fdtd matches spectral synthesis in 2d") {
  Medium2D med = small_box_2d();
  const double tau = 0.125;
  Pulse p = pulse_for_tau(tau);
  dtb::DataSet spec = dtb::simulate_spectral(med, p, tau, 24);
  dtb::DataSet fd = dtb::synthesize_fdtd(med, p, tau, 24, 32);
  double scale = 0.0, err = 0.0;
  for (std::size_t k = 0; k < 24; ++k) {
    scale = std::max(scale, dtb::max_abs(spec.frames[k]));
    err = std::max(err, dtb_test::max_diff(spec.frames[k], fd.frames[k]));
  }
  CHECK(err < 0.01 * scale);
}

TEST_CASE("fdtd rejects unstable and undersampled stepping") {
  Medium1D med = dtb::homogeneous_medium_1d(100, 0.1);  // step 1e-3
  Pulse p = pulse_for_tau(0.01);
  CHECK_THROWS_AS(dtb::synthesize_fdtd(med, p, 0.01, 10, 8), dtb::CflViolation);
  CHECK_THROWS_AS(dtb::synthesize_fdtd(med, p, 0.01, 10, 4), dtb::ValidationError);
}

TEST_CASE("medium validation catches bad inputs") {
  Medium1D med = dtb::homogeneous_medium_1d(10, 1.0);
  med.sigma_dual[3] = -1.0;
  CHECK_THROWS_AS(dtb::validate(med), dtb::InvalidMedium);

  auto one = [](double, double) { return 1.0; };
  Medium2D box = dtb::medium_from_fields_2d(6, 5, 0.1, one, one, {1, 4});
  box.sensors[1] = dtb::GridIndex{1, 0};
  CHECK_THROWS_AS(dtb::validate(box), dtb::DegenerateSensors);
  box.sensors[1] = dtb::GridIndex{2, 1};
  CHECK_THROWS_AS(dtb::validate(box), dtb::InvalidMedium);
}

TEST_CASE("born oracle reduces to the reference data at zero contrast") {
  Medium1D med = homogeneous_1d();
  const double tau = 0.02;
  Pulse p = pulse_for_tau(tau);
  dtb::DataSet ref = dtb::simulate_spectral(med, p, tau, 20);
  dtb::DataSet born = dtb::born_oracle(med, med, p, tau, 20);
  for (std::size_t k = 0; k < 20; ++k)
    CHECK(std::abs(born.scalar(k) - ref.scalar(k)) < 1e-14 * std::abs(ref.scalar(0)));
}

TEST_CASE("born oracle linearizes the forward map") {
  const std::size_t n_cells = 400;
  const double tau = 0.02;
  Pulse p = pulse_for_tau(tau);
  Medium1D ref = dtb::homogeneous_medium_1d(n_cells, 1.0);

  auto scattered_mismatch = [&](double contrast) {
    Medium1D pert = dtb::medium_from_profile_1d(
        n_cells, 1.0, dtb::layered_profile({0.3, 0.5}, {1.0, contrast, 1.0}));
    dtb::DataSet d0 = dtb::simulate_spectral(ref, p, tau, 40);
    dtb::DataSet dtrue = dtb::simulate_spectral(pert, p, tau, 40);
    double rich = 0.0;
    dtb::DataSet born = dtb::born_oracle(ref, pert, p, tau, 40, 1e-3, &rich);
    CHECK(rich < 1e-5);
    double err = 0.0, scat = 0.0;
    for (std::size_t k = 0; k < 40; ++k) {
      err = std::max(err, std::abs(dtrue.scalar(k) - born.scalar(k)));
      scat = std::max(scat, std::abs(dtrue.scalar(k) - d0.scalar(k)));
    }
    return err / scat;
  };

  const double coarse = scattered_mismatch(1.10);
  const double fine = scattered_mismatch(1.01);
  CHECK(coarse < 0.10);
  CHECK(fine < 0.015);
  CHECK(fine < coarse);
}
