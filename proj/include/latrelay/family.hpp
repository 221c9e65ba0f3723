// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "latrelay/lattice.hpp"

namespace latrelay {

/// Binary Construction-A flag family.
///
/// A basis b_1..b_n of F_2^n is fixed; its prefixes span nested codes
/// C_0 ⊂ C_1 ⊂ ... ⊂ C_n.  Level j = n·e + k (0 <= k < n) is the lattice
///     s · 2^{-e} · (C_k/2 + Z^n),
/// whose volume is s^n 2^{-j}.  Level j is a sublattice of level j+1 with
/// index 2, so any set of levels forms a chain and rates come in steps of
/// 1/n bit per dimension.
///
/// `cubic(n)` uses unit vectors (every level is a box lattice);
/// `e8()` passes through the extended Hamming code at k = 4, so levels with
/// j ≡ 4 (mod 8) are scaled copies of E8.
class FlagFamily {
 public:
  static FlagFamily cubic(int n);
  static FlagFamily e8();
  /// "cubic" or "e8"; e8 requires n = 8.
  static FlagFamily by_name(const std::string& name, int n);

  int dim() const noexcept { return n_; }
  const std::string& name() const noexcept { return name_; }
  /// Code dimension of the levels used for shaping (coarse lattices).
  int shaping_offset() const noexcept { return shaping_; }

  Lattice level(int j, double scale) const;
  /// Second moment of level j at scale 1.  Exact for cubes and E8, a fixed
  /// seed Monte-Carlo estimate (10^5 samples) for the other levels.
  double unit_second_moment(int j) const;
  /// Scale putting the second moment of level j at `power`.
  double scale_for_power(int j, double power) const;

 private:
  FlagFamily(std::string name, int n, std::vector<std::vector<int>> flag, int shaping);

  std::string name_;
  int n_;
  std::vector<std::vector<int>> flag_;
  int shaping_;
  struct Cache {
    std::mutex mu;
    std::vector<double> moment;  // per k, NaN until computed
  };
  std::shared_ptr<Cache> cache_;
};

}  // namespace latrelay
