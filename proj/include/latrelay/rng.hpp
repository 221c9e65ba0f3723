// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <random>

namespace latrelay {

/// Stateless 64-bit mixer (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Seed of the independent substream `index` under `master`.
/// Trials, codebooks and sweep points all derive their streams this way so a
/// single trial can be replayed without running the others.
std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) noexcept;

/// Named domain tags keep substreams of different consumers apart.
enum class StreamTag : std::uint64_t {
  trial = 1,
  codebook = 2,
  stats = 3,
};
std::uint64_t tagged_seed(std::uint64_t master, StreamTag tag, std::uint64_t index) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double normal() { return normal_(engine_); }
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace latrelay
