// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <vector>

#include "dtb/forward.hpp"
#include "dtb/gram.hpp"
#include "support/test_util.hpp"

using dtb::DenseMatrix;

namespace {

// Independent oracle: explicit snapshots P_k = T_k(P) b with the propagator
// applied through its eigendecomposition, never through measured frames.
struct SnapshotModel {
  std::vector<DenseMatrix> snapshots;  // P_0 .. P_{n}
  dtb::EigDecomp eig;
  double tau;

  DenseMatrix apply_propagator(const DenseMatrix& v) const {
    return dtb::apply_spectral_fn(
        eig, [this](double lam) { return std::cos(tau * std::sqrt(std::max(0.0, lam))); }, v);
  }

  static SnapshotModel build(const dtb::EigDecomp& eig, const DenseMatrix& b, double tau,
                             std::size_t count) {
    SnapshotModel sm{{}, eig, tau};
    sm.snapshots.reserve(count);
    sm.snapshots.push_back(b);
    sm.snapshots.push_back(sm.apply_propagator(b));
    for (std::size_t k = 2; k < count; ++k) {
      DenseMatrix next = dtb::scaled(sm.apply_propagator(sm.snapshots[k - 1]), 2.0);
      next = dtb::add_scaled(next, -1.0, sm.snapshots[k - 2]);
      sm.snapshots.push_back(next);
    }
    return sm;
  }
};

void check_grams_against_snapshots(const dtb::EigDecomp& eig, const DenseMatrix& b, double tau,
                                   std::size_t n, std::size_t two_n) {
  dtb::DataSet data = dtb::synthesize_spectral(eig, b, tau, two_n);
  dtb::BlockMatrix mass = dtb::mass_from_data(data, n);
  dtb::BlockMatrix stiff = dtb::stiff_from_data(data, n);

  SnapshotModel sm = SnapshotModel::build(eig, b, tau, n + 1);
  const double scale = dtb::max_abs(mass.dense());
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      DenseMatrix mij = dtb::matmul_tn(sm.snapshots[i - 1], sm.snapshots[j - 1]);
      CHECK(dtb_test::max_diff(mass.block(i, j), mij) < 1e-10 * scale);
      DenseMatrix sij =
          dtb::matmul_tn(sm.snapshots[i - 1], sm.apply_propagator(sm.snapshots[j - 1]));
      CHECK(dtb_test::max_diff(stiff.block(i, j), sij) < 1e-10 * scale);
    }
}

}  // namespace

TEST_CASE("gram blocks equal snapshot inner products, single channel") {
  dtb::Medium1D med = dtb::medium_from_profile_1d(
      120, 1.0, dtb::layered_profile({0.35, 0.6}, {1.0, 1.5, 0.8}));
  const double tau = 0.04;
  dtb::Pulse p;
  p.center_frequency = 0.5 * dtb::kPi / tau;
  p.bandwidth = 0.15 * dtb::kPi / tau;
  dtb::EigDecomp eig = dtb::wave_eig(med);
  DenseMatrix b = dtb::sensor_vectors(eig, p, {0}, med.step);
  check_grams_against_snapshots(eig, b, tau, 10, 24);
}

TEST_CASE("gram blocks equal snapshot inner products, multi channel") {
  auto sig = dtb::inclusion_field(1.0, {{0.45, 0.35, 0.1, 0.3, false}});
  auto one = [](double, double) { return 1.0; };
  dtb::Medium2D med = dtb::medium_from_fields_2d(16, 12, 0.06, sig, one, {3, 8, 13});
  const double tau = 0.15;
  dtb::Pulse p;
  p.center_frequency = 0.5 * dtb::kPi / tau;
  p.bandwidth = 0.14 * dtb::kPi / tau;
  dtb::EigDecomp eig = dtb::wave_eig(med);
  DenseMatrix b = dtb::sensor_vectors(eig, p, med.sensor_nodes(), med.h * med.h);
  check_grams_against_snapshots(eig, b, tau, 6, 14);
}

TEST_CASE("mass gram is positive definite for admissible data") {
  dtb::Medium1D med = dtb::homogeneous_medium_1d(150, 1.0);
  const double tau = 0.03;
  dtb::Pulse p;
  p.center_frequency = 0.4 * dtb::kPi / tau;
  p.bandwidth = 0.18 * dtb::kPi / tau;
  dtb::DataSet data = dtb::simulate_spectral(med, p, tau, 30);
  dtb::GramPair g = dtb::assemble_gram(data, 15);
  CHECK_NOTHROW(dtb::cholesky_upper(g.mass.dense()));
  CHECK(dtb::max_asymmetry(g.mass.dense()) < 1e-12 * dtb::max_abs(g.mass.dense()));
  CHECK(dtb::max_asymmetry(g.stiff.dense()) < 1e-12 * dtb::max_abs(g.stiff.dense()));
}

TEST_CASE("frame shortage is reported") {
  dtb::Medium1D med = dtb::homogeneous_medium_1d(60, 1.0);
  dtb::Pulse p;
  p.center_frequency = 30.0;
  p.bandwidth = 12.0;
  dtb::DataSet data = dtb::simulate_spectral(med, p, 0.05, 12);
  CHECK_THROWS_AS(dtb::mass_from_data(data, 7), dtb::InsufficientFrames);
  CHECK_THROWS_AS(dtb::stiff_from_data(data, 7), dtb::InsufficientFrames);
  CHECK_NOTHROW(dtb::assemble_gram(data));  // defaults to n = two_n / 2
}
