// SPDX-License-Identifier: Apache-2.0
#include "latrelay/nested.hpp"

#include <cmath>
#include <stdexcept>

namespace latrelay {
namespace {

IntMat integer_coefficients(const Lattice& coarse, const Lattice& fine) {
  if (coarse.dim() != fine.dim()) throw std::invalid_argument("nesting: dimension mismatch");
  const Eigen::MatrixXd m = fine.generator().inverse() * coarse.generator();
  IntMat out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double v = std::round(m(r, c));
      if (std::abs(m(r, c) - v) > 1e-6 * std::max(1.0, std::abs(v))) {
        throw std::invalid_argument("nesting violation: coarse lattice is not a sublattice (non-integer subgroup index)");
      }
      out(r, c) = static_cast<std::int64_t>(v);
    }
  }
  return out;
}

}  // namespace

CosetSystem::CosetSystem(const Lattice& coarse, const Lattice& fine)
    : fine_gen_(fine.generator()), fine_gen_inv_(fine.generator().inverse()) {
  const IntMat m = integer_coefficients(coarse, fine);
  hnf_ = hermite_rows(m.transpose());
  if (hnf_.rows() != hnf_.cols()) throw std::invalid_argument("nesting violation: coarse lattice is degenerate");
  const auto n = static_cast<std::size_t>(hnf_.rows());
  stride_.resize(n);
  count_ = 1;
  for (std::size_t i = 0; i < n; ++i) {
    stride_[i] = count_;
    const auto d = static_cast<std::uint64_t>(hnf_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
    if (count_ > (std::uint64_t{1} << 62) / d) throw std::overflow_error("coset count overflow");
    count_ *= d;
  }
}

IntVec CosetSystem::representative(std::uint64_t index) const {
  if (index >= count_) throw std::out_of_range("coset index out of range");
  IntVec v(hnf_.rows());
  for (Eigen::Index i = 0; i < hnf_.rows(); ++i) {
    const auto d = static_cast<std::uint64_t>(hnf_(i, i));
    v(i) = static_cast<std::int64_t>(index % d);
    index /= d;
  }
  return v;
}

Vec CosetSystem::point(std::uint64_t index) const {
  return fine_gen_ * representative(index).cast<double>();
}

std::uint64_t CosetSystem::index_of(const Vec& fine_point) const {
  const Vec c = fine_gen_inv_ * fine_point;
  IntVec v(c.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) v(i) = std::llround(c(i));
  reduce_mod_rows(hnf_, v);
  std::uint64_t idx = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) idx += static_cast<std::uint64_t>(v(i)) * stride_[static_cast<std::size_t>(i)];
  return idx;
}

std::uint64_t subgroup_index(const Lattice& coarse, const Lattice& fine) {
  return CosetSystem(coarse, fine).count();
}

NestedChain::NestedChain(std::vector<Lattice> levels) : levels_(std::move(levels)) {
  if (levels_.empty()) throw std::invalid_argument("chain needs at least one level");
  for (std::size_t i = 0; i + 1 < levels_.size(); ++i) {
    if (levels_[i + 1].dim() != levels_[i].dim()) throw std::invalid_argument("chain: dimension mismatch");
    const std::uint64_t f = subgroup_index(levels_[i], levels_[i + 1]);
    if (f < 2) throw std::invalid_argument("chain volumes must strictly decrease");
    factors_.push_back(f);
  }
}

std::uint64_t NestedChain::index(std::size_t coarse, std::size_t fine) const {
  if (coarse > fine || fine >= levels_.size()) throw std::out_of_range("chain level order");
  std::uint64_t idx = 1;
  for (std::size_t i = coarse; i < fine; ++i) idx *= factors_[i];
  return idx;
}

double NestedChain::rate(std::size_t coarse, std::size_t fine) const {
  return std::log2(level(coarse).volume() / level(fine).volume()) / dim();
}

std::vector<double> NestedChain::second_moments(std::size_t samples, Rng& rng) const {
  std::vector<double> out;
  for (const auto& l : levels_) out.push_back(voronoi_stats(l, samples, rng).second_moment);
  return out;
}

NestedChain build_chain(const Lattice& base, const std::vector<int>& factors) {
  if (factors.empty()) throw std::invalid_argument("build_chain: factors must be nonempty");
  std::vector<Lattice> levels{base};
  for (int f : factors) {
    if (f < 1) throw std::invalid_argument("build_chain: factor < 1");
    if (f == 1) throw std::invalid_argument("build_chain: factor 1 gives equal volumes");
    levels.push_back(levels.back().scaled(1.0 / f));
  }
  return NestedChain(std::move(levels));
}

Codebook::Codebook(Lattice coarse, Lattice fine, std::uint64_t seed, std::uint64_t cap)
    : coarse_(std::move(coarse)), fine_(std::move(fine)), cosets_(coarse_, fine_), seed_(seed) {
  const std::uint64_t m = cosets_.count();
  if (m > cap) throw std::length_error("codebook enumeration cap exceeded");
  forward_.resize(m);
  for (std::uint64_t i = 0; i < m; ++i) forward_[i] = static_cast<std::uint32_t>(i);
  Rng rng(seed);
  for (std::uint64_t i = m; i > 1; --i) {
    const std::uint64_t j = rng.below(i);
    std::swap(forward_[i - 1], forward_[j]);
  }
  inverse_.resize(m);
  for (std::uint64_t w = 0; w < m; ++w) inverse_[forward_[w]] = static_cast<std::uint32_t>(w);
}

double Codebook::rate() const { return std::log2(static_cast<double>(size())) / dim(); }

Vec Codebook::point(std::uint32_t message) const {
  if (message >= size()) throw std::out_of_range("message index out of range");
  return coarse_.mod(cosets_.point(forward_[message]));
}

std::uint32_t Codebook::message_of(const Vec& fine_point) const {
  return inverse_[cosets_.index_of(fine_point)];
}

std::vector<Vec> Codebook::points() const {
  std::vector<Vec> out;
  out.reserve(size());
  for (std::uint64_t w = 0; w < size(); ++w) out.push_back(point(static_cast<std::uint32_t>(w)));
  return out;
}

Vec Codebook::encode(std::uint32_t message, const Vec& dither) const {
  return coarse_.mod(point(message) - dither);
}

Codebook enumerate_codebook(const NestedChain& chain, std::size_t coarse_level, std::size_t fine_level,
                            std::uint64_t seed, std::uint64_t cap) {
  if (coarse_level > fine_level) throw std::invalid_argument("enumerate_codebook: coarse level after fine level");
  return Codebook(chain.level(coarse_level), chain.level(fine_level), seed, cap);
}

}  // namespace latrelay
