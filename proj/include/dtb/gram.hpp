// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>

#include "dtb/block_matrix.hpp"
#include "dtb/data_set.hpp"
#include "dtb/errors.hpp"

namespace dtb {

namespace detail {

inline std::size_t abs_index(long v) { return static_cast<std::size_t>(std::labs(v)); }

inline void require_frames(const DataSet& data, std::size_t n, const char* who) {
  if (n == 0) throw ShapeMismatch(std::string(who) + ": n must be at least 1");
  if (data.two_n < 2 * n)
    throw InsufficientFrames(std::string(who) + ": need at least " + std::to_string(2 * n) +
                             " frames, have " + std::to_string(data.two_n));
}

}  // namespace detail

// Snapshot inner products assembled purely from measured frames via the
// Chebyshev product identity T_i T_j = (T_{i+j} + T_{|i-j|}) / 2.
// Block (i,j), 1-based, equals P_{i-1}^T P_{j-1} for snapshots
// P_k = T_k(propagator) b.
inline BlockMatrix mass_from_data(const DataSet& data, std::size_t n) {
  detail::require_frames(data, n, "mass_from_data");
  BlockMatrix out(n, data.m);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      const long li = static_cast<long>(i), lj = static_cast<long>(j);
      DenseMatrix b = add_scaled(data.frame(static_cast<std::size_t>(li + lj - 2)), 1.0,
                                 data.frame(detail::abs_index(li - lj)));
      out.set_block(i, j, scaled(b, 0.5));
    }
  return out;
}

// Same construction with one extra propagator factor between the snapshots:
// block (i,j) equals P_{i-1}^T propagator P_{j-1}.
inline BlockMatrix stiff_from_data(const DataSet& data, std::size_t n) {
  detail::require_frames(data, n, "stiff_from_data");
  BlockMatrix out(n, data.m);
  for (std::size_t i = 1; i <= n; ++i)
    for (std::size_t j = 1; j <= n; ++j) {
      const long li = static_cast<long>(i), lj = static_cast<long>(j);
      DenseMatrix b = data.frame(static_cast<std::size_t>(li + lj - 1));
      b = add_scaled(b, 1.0, data.frame(detail::abs_index(lj - li + 1)));
      b = add_scaled(b, 1.0, data.frame(detail::abs_index(lj - li - 1)));
      b = add_scaled(b, 1.0, data.frame(detail::abs_index(lj + li - 3)));
      out.set_block(i, j, scaled(b, 0.25));
    }
  return out;
}

struct GramPair {
  BlockMatrix mass;
  BlockMatrix stiff;
  std::size_t n = 0;
  std::size_t m = 0;
};

inline GramPair assemble_gram(const DataSet& data, std::size_t n) {
  GramPair g;
  g.mass = mass_from_data(data, n);
  g.stiff = stiff_from_data(data, n);
  g.n = n;
  g.m = data.m;
  return g;
}

// Default model order: half the frame count.
inline GramPair assemble_gram(const DataSet& data) { return assemble_gram(data, data.two_n / 2); }

}  // namespace dtb
