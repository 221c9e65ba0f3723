// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "latrelay/nested.hpp"

namespace latrelay {

double mmse_alpha(double P, double N);

/// Gaussian noise plus self-noise terms uniform over Voronoi cells.
struct MixedNoiseSpec {
  double gaussian_variance = 0.0;
  std::vector<double> uniform_powers;  // second moments of the uniform components

  double total() const;
};

/// Upper bound on the equivalent noise variance after MMSE scaling, where
/// `ratios[i]` is r_cov/r_eff of the i-th uniform component:
///   (1-a)^2 (r/r_eff)^2 P + a^2 N_G + a^2 sum (r_i/r_eff,i)^2 P_i.
/// `ratios` holds one entry for the signal followed by one per component.
double equivalent_noise_variance(double alpha, double P, const MixedNoiseSpec& noise,
                                 std::span<const double> ratios);

struct ListResult {
  std::vector<std::uint32_t> messages;  // sorted
  std::uint64_t exact_size = 0;         // V_s / V_c
  double alpha = 0.0;

  bool contains(std::uint32_t m) const;
};

class ListDecoder;

/// Membership oracle for one decoded list; the list itself is only built on
/// request.  A message is in the list when its coset of Λ_c meets Y' + V_s,
/// i.e. when Q_s(t(w) - Y') lies in Λ.
class ListProbe {
 public:
  /// Probe that accepts every message (nothing was observed).
  explicit ListProbe(const ListDecoder& dec) : dec_(&dec), everything_(true) {}
  ListProbe(const ListDecoder& dec, Vec front_end, double alpha)
      : dec_(&dec), front_(std::move(front_end)), alpha_(alpha) {}

  bool contains(std::uint32_t message) const;
  std::uint64_t exact_size() const;
  ListResult materialize() const;

 private:
  const ListDecoder* dec_;
  Vec front_;
  double alpha_ = 0.0;
  bool everything_ = false;
};

/// List decoder over the chain Λ ⊆ Λ_s ⊆ Λ_c, with Λ and Λ_c taken from the
/// codebook.  The V_s/V_c coset representatives of Λ_c mod Λ_s are
/// precomputed; decoding is O(list size) nearest-point calls on Λ_s.
class ListDecoder {
 public:
  ListDecoder(std::shared_ptr<const Codebook> codebook, Lattice list_lattice);

  const Codebook& codebook() const noexcept { return *cb_; }
  const Lattice& list_lattice() const noexcept { return list_; }
  std::uint64_t list_size() const noexcept { return reps_.size(); }

  /// Messages of the fine points in Y' + V_s, Y' = (alpha y + U) mod Λ.
  ListResult decode(const Vec& y, const Vec& dither, double alpha) const;
  /// Same set built from the fine points λ with Y' ∈ λ + V_s.
  ListResult decode_via_q(const Vec& y, const Vec& dither, double alpha) const;
  ListProbe probe(const Vec& y, const Vec& dither, double alpha) const;

 private:
  friend class ListProbe;
  Vec front_end(const Vec& y, const Vec& dither, double alpha) const;
  ListResult list_at(const Vec& front, double alpha) const;

  std::shared_ptr<const Codebook> cb_;
  Lattice list_;
  std::vector<Vec> reps_;
};

ListResult list_decode(const ListDecoder& dec, const Vec& y, const Vec& dither, double alpha);
ListResult list_decode_via_Q(const ListDecoder& dec, const Vec& y, const Vec& dither, double alpha);

/// Message of the fine point nearest to Y' = (alpha y + U) mod Λ.
std::uint32_t unique_decode(const Codebook& cb, const Vec& y, const Vec& dither, double alpha);

/// List-lattice volume from the asymptotic sizing rule
///   V_s = margin · (N/(P+N))^{n/2} · V.
double list_volume_target(double coarse_volume, int n, double P, double N, double margin);

}  // namespace latrelay
