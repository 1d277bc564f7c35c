// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"

namespace dtb {

// Relative reciprocity tolerance for measured frames.
inline constexpr double kReciprocityTol = 1e-10;

// Time-sampled transfer data: frames[k] is the m-by-m matrix of
// source-receiver responses at time k * tau, k = 0 .. two_n - 1.
struct DataSet {
  std::size_t m = 0;
  std::size_t two_n = 0;
  double tau = 0.0;
  std::vector<DenseMatrix> frames;

  DataSet() = default;

  DataSet(double tau_, std::vector<DenseMatrix> frames_) : tau(tau_), frames(std::move(frames_)) {
    if (!(tau > 0.0)) throw ValidationError("DataSet: tau must be positive");
    two_n = frames.size();
    if (two_n < 2 || two_n % 2 != 0)
      throw ShapeMismatch("DataSet: need an even number (>= 2) of frames");
    m = frames.front().rows();
    if (m == 0) throw ShapeMismatch("DataSet: empty frames");
    for (std::size_t k = 0; k < two_n; ++k) {
      const DenseMatrix& f = frames[k];
      if (f.rows() != m || f.cols() != m)
        throw ShapeMismatch("DataSet: frame " + std::to_string(k) + " has wrong shape");
      const double scale = max_abs(f);
      if (scale > 0.0 && max_asymmetry(f) > kReciprocityTol * scale)
        throw NonSymmetric("DataSet: frame " + std::to_string(k) + " violates reciprocity");
    }
  }

  static DataSet from_scalars(double tau_, const std::vector<double>& values) {
    std::vector<DenseMatrix> fr(values.size(), DenseMatrix(1, 1));
    for (std::size_t k = 0; k < values.size(); ++k) fr[k](0, 0) = values[k];
    return DataSet(tau_, std::move(fr));
  }

  const DenseMatrix& frame(std::size_t k) const { return frames.at(k); }

  double scalar(std::size_t k) const {
    if (m != 1) throw ShapeMismatch("DataSet::scalar: data is not single-channel");
    return frames.at(k)(0, 0);
  }

  std::vector<double> scalars() const {
    std::vector<double> out(two_n);
    for (std::size_t k = 0; k < two_n; ++k) out[k] = scalar(k);
    return out;
  }
};

}  // namespace dtb
