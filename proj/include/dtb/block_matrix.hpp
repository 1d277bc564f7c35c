// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>

#include "dtb/dense_matrix.hpp"
#include "dtb/errors.hpp"

namespace dtb {

// Square matrix of square m-by-m blocks, stored dense row-major.
// Block indices are 1-based to match the graph-Laplacian ordering used
// throughout the reduced-order model code; entry indices stay 0-based.
class BlockMatrix {
 public:
  BlockMatrix() : nb_(0), m_(0) {}
  BlockMatrix(std::size_t n_blocks, std::size_t block_size)
      : nb_(n_blocks), m_(block_size), dense_(n_blocks * block_size, n_blocks * block_size) {}

  std::size_t n_blocks() const { return nb_; }
  std::size_t block_size() const { return m_; }
  std::size_t dim() const { return nb_ * m_; }

  DenseMatrix& dense() { return dense_; }
  const DenseMatrix& dense() const { return dense_; }

  DenseMatrix block(std::size_t i, std::size_t j) const {
    check(i, j);
    DenseMatrix b(m_, m_);
    const std::size_t r0 = (i - 1) * m_, c0 = (j - 1) * m_;
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) b(r, c) = dense_(r0 + r, c0 + c);
    return b;
  }

  void set_block(std::size_t i, std::size_t j, const DenseMatrix& b) {
    check(i, j);
    if (b.rows() != m_ || b.cols() != m_) throw ShapeMismatch("set_block: bad block shape");
    const std::size_t r0 = (i - 1) * m_, c0 = (j - 1) * m_;
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) dense_(r0 + r, c0 + c) = b(r, c);
  }

  void add_to_block(std::size_t i, std::size_t j, const DenseMatrix& b, double alpha = 1.0) {
    check(i, j);
    if (b.rows() != m_ || b.cols() != m_) throw ShapeMismatch("add_to_block: bad block shape");
    const std::size_t r0 = (i - 1) * m_, c0 = (j - 1) * m_;
    for (std::size_t r = 0; r < m_; ++r)
      for (std::size_t c = 0; c < m_; ++c) dense_(r0 + r, c0 + c) += alpha * b(r, c);
  }

 private:
  void check(std::size_t i, std::size_t j) const {
    if (i < 1 || i > nb_ || j < 1 || j > nb_)
      throw ShapeMismatch("block index out of range (1-based)");
  }

  std::size_t nb_, m_;
  DenseMatrix dense_;
};

}  // namespace dtb
