// SPDX-License-Identifier: Apache-2.0
// Small oracles shared by the unit tests and the acceptance runner.
#pragma once

#include <boost/math/distributions/chi_squared.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "latrelay/lattice.hpp"

namespace testsupport {

using latrelay::Lattice;
using latrelay::Rng;
using latrelay::Vec;

inline Vec uniform_vec(int n, double lo, double hi, Rng& rng) {
  Vec v(n);
  for (int i = 0; i < n; ++i) v(i) = lo + (hi - lo) * rng.uniform();
  return v;
}

/// Closest lattice point by scanning generator coefficients within `reach`
/// of the real solution of G k = x.
inline Vec brute_nearest(const Lattice& lat, const Vec& x, int reach) {
  const int n = lat.dim();
  const Eigen::MatrixXd& g = lat.generator();
  const Vec k0 = g.fullPivLu().solve(x);
  std::vector<int> off(static_cast<std::size_t>(n), -reach);
  Vec best = Vec::Zero(n);
  double best_d = std::numeric_limits<double>::infinity();
  for (;;) {
    Vec k(n);
    for (int i = 0; i < n; ++i) k(i) = std::round(k0(i)) + off[static_cast<std::size_t>(i)];
    const Vec p = g * k;
    const double d = (x - p).squaredNorm();
    if (d < best_d) best_d = d, best = p;
    int i = 0;
    while (i < n && ++off[static_cast<std::size_t>(i)] > reach) off[static_cast<std::size_t>(i++)] = -reach;
    if (i == n) break;
  }
  return best;
}

/// Upper critical value of chi-square with `dof` degrees of freedom.
inline double chi2_critical(int dof, double significance) {
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), significance));
}

inline double chi2_statistic(const std::vector<long>& counts) {
  double total = 0.0;
  for (long c : counts) total += double(c);
  const double expect = total / double(counts.size());
  double s = 0.0;
  for (long c : counts) s += (double(c) - expect) * (double(c) - expect) / expect;
  return s;
}

/// Bin of a point of the fundamental cell by its fractional basis
/// coordinates; reduction mod the lattice preserves uniformity, so a
/// uniform sample over V gives uniform bins.
inline std::size_t cell_bin(const Lattice& lat, const Vec& x, int per_axis) {
  const Vec k = lat.generator().fullPivLu().solve(x);
  std::size_t bin = 0;
  for (int i = 0; i < k.size(); ++i) {
    double f = k(i) - std::floor(k(i));
    int b = std::min(per_axis - 1, static_cast<int>(f * per_axis));
    bin = bin * static_cast<std::size_t>(per_axis) + static_cast<std::size_t>(b);
  }
  return bin;
}

}  // namespace testsupport
