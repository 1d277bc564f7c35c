// SPDX-License-Identifier: Apache-2.0
#include <catch2/catch_amalgamated.hpp>
#include <cstddef>
#include <vector>

#include "dtb/data_to_born.hpp"
#include "dtb/forward.hpp"
#include "support/test_util.hpp"

using dtb::DataSet;
using dtb::DenseMatrix;

namespace {

// Peak transform-vs-oracle gap normalized by the peak scattered signal.
double transform_vs_born(const DataSet& transformed, const DataSet& born,
                         const DataSet& reference) {
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < born.two_n; ++k) {
    num = std::max(num, dtb_test::max_diff(transformed.frame(k), born.frame(k)));
    den = std::max(den,
                   dtb::max_abs(dtb::add_scaled(born.frame(k), -1.0, reference.frame(k))));
  }
  return num / den;
}

// Kept mild on purpose: the transform linearizes along a straight line in
// factor space while the oracle linearizes along the log-impedance path.
// The gap between the two is second order in the layer contrast while the
// scattered signal is first order, so the relative metric above shrinks
// roughly linearly as the contrast comes down.
dtb::Medium1D mild_layered_1d(std::size_t n_cells, double total_time) {
  auto profile = dtb::layered_profile({0.2, 0.35, 0.5}, {1.0, 1.12, 0.92, 1.05});
  return dtb::medium_from_profile_1d(n_cells, total_time, profile);
}

dtb::Medium2D medium_2d(double amplitude) {
  auto sigma = dtb::inclusion_field(
      1.0, {{0.55, 0.35, 0.1, amplitude, false}, {0.95, 0.5, 0.12, -0.8 * amplitude, false}});
  return dtb::medium_from_fields_2d(24, 16, 0.05, sigma, [](double, double) { return 1.0; },
                                    {4, 12, 20});
}

// Finer grid for the Born comparison: the pulse band reaches roughly 9.1/tau
// and the five-point stencil resolves frequencies up to sqrt(8)/h, so h must
// stay below 0.31 tau or the data gets band-limited by the grid instead of
// the pulse.
dtb::Medium2D fine_medium_2d(double amplitude) {
  auto sigma = dtb::inclusion_field(
      1.0, {{0.55, 0.35, 0.1, amplitude, false}, {0.95, 0.5, 0.12, -0.8 * amplitude, false}});
  return dtb::medium_from_fields_2d(44, 28, 0.028, sigma, [](double, double) { return 1.0; },
                                    {7, 22, 36});
}

}  // namespace

TEST_CASE("transform of reference data returns it unchanged", "[dtb]") {
  SECTION("one-dimensional") {
    const double tau = 0.02;
    dtb::Medium1D med = dtb::homogeneous_medium_1d(200, 1.0);
    dtb::Pulse pulse = dtb::coefficient_normalized_pulse(tau);
    DataSet data = dtb::simulate_spectral(med, pulse, tau, 20);
    dtb::DtbOutput out = dtb::dtb_transform(data, med, pulse, 10);
    for (std::size_t k = 0; k < data.two_n; ++k) {
      CHECK(dtb_test::max_diff(out.frames.frame(k), data.frame(k)) == 0.0);
      CHECK(dtb::max_abs(out.derivative[k]) == 0.0);
    }
  }
  SECTION("two-dimensional") {
    const double tau = 0.1;
    dtb::Medium2D med = medium_2d(0.0);
    dtb::Pulse pulse = dtb::coefficient_normalized_pulse(tau);
    DataSet data = dtb::simulate_spectral(med, pulse, tau, 8);
    dtb::DtbOutput out = dtb::dtb_transform(data, med, pulse, 4);
    for (std::size_t k = 0; k < data.two_n; ++k) {
      CHECK(dtb_test::max_diff(out.frames.frame(k), data.frame(k)) == 0.0);
      CHECK(dtb::max_abs(out.derivative[k]) == 0.0);
    }
  }
}

TEST_CASE("transform tracks the Born approximation on a layered model", "[dtb]") {
  const double tau = 0.01;
  const std::size_t n = 40;
  dtb::Pulse pulse = dtb::coefficient_normalized_pulse(tau);
  dtb::Medium1D ref = dtb::homogeneous_medium_1d(800, 1.0);
  dtb::Medium1D pert = mild_layered_1d(800, 1.0);

  DataSet measured = dtb::simulate_spectral(pert, pulse, tau, 2 * n);
  dtb::DtbOutput out = dtb::dtb_transform(measured, ref, pulse, n);
  DataSet born = dtb::born_oracle(ref, pert, pulse, tau, 2 * n);

  CHECK(transform_vs_born(out.frames, born, out.reference) < 0.05);

  SECTION("first frame passes through unchanged") {
    CHECK(out.frames.scalar(0) ==
          Catch::Approx(measured.scalar(0)).epsilon(1e-10));
  }
}

TEST_CASE("transform tracks the Born approximation on a two-inclusion model", "[dtb]") {
  const double tau = 0.1;
  const std::size_t n = 8;
  dtb::Pulse pulse = dtb::coefficient_normalized_pulse(tau);
  dtb::Medium2D ref = fine_medium_2d(0.0);
  dtb::Medium2D pert = fine_medium_2d(0.15);

  DataSet measured = dtb::simulate_spectral(pert, pulse, tau, 2 * n);
  dtb::DtbOutput out = dtb::dtb_transform(measured, ref, pulse, n);
  DataSet born = dtb::born_oracle(ref, pert, pulse, tau, 2 * n);

  CHECK(transform_vs_born(out.frames, born, out.reference) < 0.05);

  for (std::size_t k = 0; k < out.frames.two_n; ++k)
    CHECK(dtb::max_asymmetry(out.frames.frame(k)) == 0.0);
}

TEST_CASE("transform error is first order in the contrast", "[dtb]") {
  const double tau = 0.02;
  const std::size_t n = 16;
  dtb::Pulse pulse = dtb::coefficient_normalized_pulse(tau);
  dtb::Medium1D ref = dtb::homogeneous_medium_1d(400, 1.0);
  dtb::Medium1D pert = mild_layered_1d(400, 1.0);

  std::vector<double> ratios;
  for (double eps : {0.2, 0.1, 0.05}) {
    dtb::Medium1D scaled_med = dtb::geometric_interp(ref, pert, eps);
    DataSet measured = dtb::simulate_spectral(scaled_med, pulse, tau, 2 * n);
    dtb::DtbOutput out = dtb::dtb_transform(measured, ref, pulse, n);
    DataSet born = dtb::born_oracle(ref, scaled_med, pulse, tau, 2 * n);
    ratios.push_back(transform_vs_born(out.frames, born, out.reference));
  }
  CHECK(ratios[0] > ratios[1]);
  CHECK(ratios[1] > ratios[2]);
}

TEST_CASE("transform validates the measured-reference pairing", "[dtb]") {
  const double tau = 0.02;
  dtb::Pulse pulse = dtb::coefficient_normalized_pulse(tau);
  DataSet data = dtb::simulate_spectral(dtb::homogeneous_medium_1d(100, 0.6), pulse, tau, 12);
  DataSet other_tau = dtb::simulate_spectral(dtb::homogeneous_medium_1d(100, 0.6), pulse,
                                             tau * 0.5, 12);
  CHECK_THROWS_AS(dtb::dtb_transform_siso(data, other_tau, 6), dtb::ShapeMismatch);
  CHECK_THROWS_AS(dtb::dtb_transform_siso(data, data, 7), dtb::ShapeMismatch);

  DataSet mimo(tau, std::vector<DenseMatrix>(12, DenseMatrix::identity(2)));
  CHECK_THROWS_AS(dtb::dtb_transform_siso(mimo, mimo, 6), dtb::ShapeMismatch);
}
