// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace latrelay {

using IntVec = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;
using IntMat = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

std::int64_t floor_div(std::int64_t a, std::int64_t b) noexcept;

/// Row Hermite normal form: upper-triangular rows spanning the same Z-module
/// as the rows of `a`, positive pivots, entries above each pivot in [0, pivot).
/// Zero rows are dropped.
IntMat hermite_rows(IntMat a);

/// Reduces `v` in place to the canonical representative of v + rowspan(h),
/// where `h` is square upper triangular with positive diagonal:
/// afterwards 0 <= v[i] < h(i,i).
void reduce_mod_rows(const IntMat& h, IntVec& v);

}  // namespace latrelay
