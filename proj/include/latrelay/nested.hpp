// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "latrelay/lattice.hpp"

namespace latrelay {

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// Canonical enumeration of the cosets of `coarse` inside `fine`.
///
/// A fine point is written in fine-basis coefficients v; two points share a
/// coset exactly when their coefficients differ by an element of the row
/// span of the Hermite form H of the coarse basis.  Reducing v against H
/// gives a unique representative with 0 <= v_i < H_ii, and the mixed-radix
/// value of that representative is the coset index.  All arithmetic after
/// the initial rounding is in integers, so boundary points never flip.
class CosetSystem {
 public:
  CosetSystem(const Lattice& coarse, const Lattice& fine);

  std::uint64_t count() const noexcept { return count_; }
  IntVec representative(std::uint64_t index) const;
  /// Fine point G_f v of the representative (not reduced into any cell).
  Vec point(std::uint64_t index) const;
  /// Coset index of an arbitrary fine-lattice point.
  std::uint64_t index_of(const Vec& fine_point) const;

 private:
  Eigen::MatrixXd fine_gen_;
  Eigen::MatrixXd fine_gen_inv_;
  IntMat hnf_;
  std::vector<std::uint64_t> stride_;
  std::uint64_t count_ = 1;
};

/// Integer index [fine : coarse]; throws if coarse is not a sublattice.
std::uint64_t subgroup_index(const Lattice& coarse, const Lattice& fine);

/// Ordered chain coarse -> fine with every level a sublattice of the next.
class NestedChain {
 public:
  explicit NestedChain(std::vector<Lattice> levels);

  std::size_t size() const noexcept { return levels_.size(); }
  int dim() const noexcept { return levels_.front().dim(); }
  const Lattice& level(std::size_t i) const { return levels_.at(i); }
  const std::vector<Lattice>& levels() const noexcept { return levels_; }
  /// Adjacent indices [level i+1 : level i].
  const std::vector<std::uint64_t>& nesting_factors() const noexcept { return factors_; }
  /// V_coarse / V_fine as an exact integer.
  std::uint64_t index(std::size_t coarse, std::size_t fine) const;
  /// (1/n) log2 index(coarse, fine), computed from volumes.
  double rate(std::size_t coarse, std::size_t fine) const;
  /// Monte-Carlo per-dimension second moments of every level.
  std::vector<double> second_moments(std::size_t samples, Rng& rng) const;

 private:
  std::vector<Lattice> levels_;
  std::vector<std::uint64_t> factors_;
};

/// Self-similar chain: level k+1 is level k scaled by 1/factors[k].
NestedChain build_chain(const Lattice& base, const std::vector<int>& factors);

/// Codebook Λ_c ∩ V(Λ) with a seeded bijection between message indices and
/// points.  Points are produced on demand from the coset system.
class Codebook {
 public:
  Codebook(Lattice coarse, Lattice fine, std::uint64_t seed, std::uint64_t cap = kDefaultEnumerationCap);

  std::uint64_t size() const noexcept { return cosets_.count(); }
  double rate() const;
  int dim() const noexcept { return coarse_.dim(); }
  std::uint64_t seed() const noexcept { return seed_; }
  const Lattice& coarse() const noexcept { return coarse_; }
  const Lattice& fine() const noexcept { return fine_; }
  const CosetSystem& cosets() const noexcept { return cosets_; }

  /// t(w): the unique point of coset perm(w) inside V(coarse).
  Vec point(std::uint32_t message) const;
  /// Message of any fine-lattice point; reduction mod the coarse lattice is implicit.
  std::uint32_t message_of(const Vec& fine_point) const;
  std::uint32_t message_of_coset(std::uint64_t coset) const { return inverse_.at(coset); }
  std::uint64_t coset_of_message(std::uint32_t message) const { return forward_.at(message); }
  /// All points, indexed by message.
  std::vector<Vec> points() const;

  /// X = (t(w) - U) mod Λ.
  Vec encode(std::uint32_t message, const Vec& dither) const;

 private:
  Lattice coarse_;
  Lattice fine_;
  CosetSystem cosets_;
  std::uint64_t seed_;
  std::vector<std::uint32_t> forward_;  // message -> coset
  std::vector<std::uint32_t> inverse_;  // coset -> message
};

Codebook enumerate_codebook(const NestedChain& chain, std::size_t coarse_level, std::size_t fine_level,
                            std::uint64_t seed, std::uint64_t cap = kDefaultEnumerationCap);

inline Vec encode(const Codebook& cb, std::uint32_t message, const Vec& dither) {
  return cb.encode(message, dither);
}

}  // namespace latrelay
