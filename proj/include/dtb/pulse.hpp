// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>

#include "dtb/errors.hpp"

namespace dtb {

inline constexpr double kPi = 3.14159265358979323846;

// Band-limited probing pulse. The frequency profile is the primary object;
// the time profile is its exact inverse Fourier transform so that spectral
// and time-stepping synthesis see the same source.
struct Pulse {
  double center_frequency = 0.0;  // omega_o, radians per unit time
  double bandwidth = 0.0;         // B > 0

  // Even in omega: half-sum of Gaussians centered at +-omega_o.
  double f_hat(double omega) const {
    const double dm = (omega - center_frequency) / bandwidth;
    const double dp = (omega + center_frequency) / bandwidth;
    return 0.5 * (std::exp(-0.5 * dm * dm) + std::exp(-0.5 * dp * dp));
  }

  double amplitude(double t) const {
    const double bt = bandwidth * t;
    return bandwidth / std::sqrt(2.0 * kPi) * std::cos(center_frequency * t) *
           std::exp(-0.5 * bt * bt);
  }

  double amplitude_dt(double t) const {
    const double bt = bandwidth * t;
    return bandwidth / std::sqrt(2.0 * kPi) * std::exp(-0.5 * bt * bt) *
           (-center_frequency * std::sin(center_frequency * t) -
            bandwidth * bandwidth * t * std::cos(center_frequency * t));
  }

  // |amplitude| is below 1e-17 of its peak outside [-cutoff, cutoff].
  double support_cutoff() const { return 9.0 / bandwidth; }
};

// Pulse tuned to the sample spacing tau so that the folded spectral weight of
// the data is nearly flat: center at half the sampling rate, bandwidth
// sqrt(2 pi) / tau. With this choice the reduced-model coefficients of a
// homogeneous medium come out within a few percent of tau, which is what the
// impedance inversion assumes for its depth grid.
inline Pulse coefficient_normalized_pulse(double tau) {
  Pulse p;
  p.center_frequency = 0.5 * kPi / tau;
  p.bandwidth = std::sqrt(2.0 * kPi) / tau;
  return p;
}

inline void validate(const Pulse& p) {
  if (!(p.bandwidth > 0.0)) throw ValidationError("pulse bandwidth must be positive");
  if (p.center_frequency < 0.0)
    throw ValidationError("pulse center frequency must be nonnegative");
}

}  // namespace dtb
