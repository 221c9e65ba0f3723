// SPDX-License-Identifier: Apache-2.0
#include "latrelay/intmath.hpp"

#include <stdexcept>
#include <utility>

namespace latrelay {

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept {
  std::int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

IntMat hermite_rows(IntMat a) {
  const Eigen::Index rows = a.rows();
  const Eigen::Index cols = a.cols();
  Eigen::Index pivot_row = 0;
  for (Eigen::Index c = 0; c < cols && pivot_row < rows; ++c) {
    for (Eigen::Index r = pivot_row + 1; r < rows; ++r) {
      while (a(r, c) != 0) {
        const std::int64_t q = a(pivot_row, c) / a(r, c);
        a.row(pivot_row) -= q * a.row(r);
        a.row(pivot_row).swap(a.row(r));
      }
    }
    if (a(pivot_row, c) == 0) continue;
    if (a(pivot_row, c) < 0) a.row(pivot_row) *= -1;
    for (Eigen::Index r = 0; r < pivot_row; ++r) {
      const std::int64_t q = floor_div(a(r, c), a(pivot_row, c));
      a.row(r) -= q * a.row(pivot_row);
    }
    ++pivot_row;
  }
  return a.topRows(pivot_row);
}

void reduce_mod_rows(const IntMat& h, IntVec& v) {
  if (h.rows() != h.cols() || h.rows() != v.size()) {
    throw std::invalid_argument("reduce_mod_rows: shape mismatch");
  }
  for (Eigen::Index i = 0; i < h.rows(); ++i) {
    const std::int64_t q = floor_div(v(i), h(i, i));
    if (q != 0) v -= q * h.row(i).transpose();
  }
}

}  // namespace latrelay
