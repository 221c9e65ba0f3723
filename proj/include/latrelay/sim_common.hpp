// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "latrelay/family.hpp"
#include "latrelay/list_decoding.hpp"
#include "latrelay/nested.hpp"

namespace latrelay {

enum class Topology { relay, two_relay, twrc, marc };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// Channel parameters for every topology.  Fields a topology does not use
/// are ignored.  Node numbering follows the topology:
///  - relay:     P (source), P_R, N_R, N_D, alpha (share of P on fresh data)
///  - two_relay: P1, P2, P3, N2, N3, N4, alpha1, beta1, alpha2, permutation
///  - twrc:      P1, P2, P_R, N_R, N1, N2 (terminal noises), h12, h21
///  - marc:      P1, P2, P_R, N_R, N_D, time_share
struct ChannelParams {
  Topology topology = Topology::relay;
  double P = 0.0, P_R = 0.0, N_R = 1.0, N_D = 1.0;
  double P1 = 0.0, P2 = 0.0, P3 = 0.0;
  double N1 = 1.0, N2 = 1.0, N3 = 1.0, N4 = 1.0;
  double h12 = 1.0, h21 = 1.0;
  std::optional<double> alpha;  // relay split; optimizer value when unset
  std::optional<double> alpha1, beta1, alpha2;
  int permutation = 0;  // two_relay: 1 swaps the roles of nodes 2 and 3
  double time_share = 1.0;

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
  /// Multiplies every noise variance by `factor`.
  ChannelParams with_noise_scaled(double factor) const;
};

/// How a rate in bits per dimension becomes an integer bit count per block.
/// `down` never exceeds the requested rate, `up` never falls below it.
enum class RateRounding { nearest, down, up };

std::string to_string(RateRounding r);
RateRounding rate_rounding_from_string(const std::string& s);

/// Monte-Carlo knobs shared by all simulations.
struct SimOptions {
  int n = 8;
  std::string family = "e8";
  int blocks = 5;
  std::uint64_t trials = 300;
  std::uint64_t seed = 0;
  unsigned workers = 1;
  /// Volume margin of the list-lattice sizing rule.
  double list_margin = 4.0;
  /// Snap list lattices to multiples of n bits above the coarse level
  /// (scaled copies of the coarse lattice).
  bool list_self_similar = false;
  /// Rates in bits per dimension: R for single-message schemes, R1/R2 per user.
  double rate = 0.0, rate1 = 0.0, rate2 = 0.0;
  RateRounding rounding = RateRounding::nearest;
  /// MARC decoding order: 1 decodes user 1 first, 2 user 2 first.
  int decoding_order = 1;
  /// TWRC ablation: terminal 1 decodes with a wrong copy of its own message.
  bool wrong_own_message = false;
  /// CF quantizer distortion; the smallest feasible value when unset.
  std::optional<double> distortion;
  /// CF: relay index bits per block; by default half the block capacity of
  /// the relay-destination link, rounded down.
  std::optional<int> cf_index_bits;
  /// CF: required ratio σ²(Λ)/(σ²_{Y|S} + D) of the quantizer pair when D is
  /// derived rather than configured.
  double wz_margin = 1.0;
};

struct StageReport {
  std::string name;
  std::uint64_t decisions = 0;
  std::uint64_t errors = 0;
  std::uint64_t misses = 0;       // true message absent from some list
  std::uint64_t ambiguities = 0;  // intersection size > 1
  std::uint64_t empty = 0;        // intersection size 0
  std::uint64_t configured_list_size = 0;
  double mean_list_size = 0.0;

  double error_rate() const { return decisions ? double(errors) / double(decisions) : 0.0; }
};

struct LatticeReport {
  std::string role;
  std::string description;
  int level = 0;
  double volume = 0.0;
  double second_moment = 0.0;
};

struct RateReport {
  std::string name;
  double requested = 0.0;
  double realized = 0.0;
  std::uint64_t codebook_size = 0;
};

struct PowerReport {
  std::string node;
  double budget = 0.0;
  double mean = 0.0;       // average of (1/n)||X||^2 over all blocks
  double max_block = 0.0;  // largest single-block value
};

struct SimReport {
  std::string scheme;
  Topology topology = Topology::relay;
  int n = 0;
  int blocks = 0;
  std::uint64_t trials = 0;
  std::uint64_t master_seed = 0;
  double rate_factor = 1.0;  // fraction of blocks carrying fresh data
  std::vector<RateReport> rates;
  std::vector<StageReport> stages;  // includes the final per-user decisions
  std::uint64_t messages = 0;
  std::uint64_t message_errors = 0;
  double error_rate = 0.0;
  std::vector<LatticeReport> lattices;
  std::vector<PowerReport> powers;
  std::vector<std::pair<std::string, std::uint64_t>> codebook_seeds;
  std::vector<std::pair<std::string, double>> diagnostics;
  std::optional<double> distortion_configured;
  std::optional<double> distortion_measured;
  double wall_seconds = 0.0;

  const StageReport& stage(const std::string& name) const;
  double diagnostic(const std::string& name) const;
};

/// Per-trial counters; summed in trial order after all trials finish.
struct Tally {
  std::vector<std::uint64_t> count;
  std::vector<double> sum;
  std::vector<double> peak;  // combined by max

  Tally(std::size_t counts, std::size_t sums, std::size_t peaks = 0)
      : count(counts, 0), sum(sums, 0.0), peak(peaks, 0.0) {}
  void add(const Tally& other);
};

/// Runs `trial(index, rng)` for every trial on `workers` threads.  Each trial
/// owns the stream tagged_seed(seed, trial, index); results are combined in
/// index order, so the total does not depend on the worker count.
Tally run_trials(std::uint64_t trials, unsigned workers, std::uint64_t seed, const Tally& zero,
                 const std::function<Tally(std::uint64_t, Rng&)>& trial);

/// A codebook at unit power together with what the report needs.
struct PlannedCode {
  std::string role;
  int coarse_level = 0;
  int fine_level = 0;
  double power = 1.0;  // exact second moment of the coarse lattice
  double scale = 0.0;  // family scale the levels were built at
  std::shared_ptr<const Codebook> book;
};

/// Builds codebooks and list decoders from a flag family.  Coarse lattices
/// sit at the shaping level scaled to unit power; fine levels carry
/// round(n R) bits.
class Planner {
 public:
  Planner(const SimOptions& opt);

  const FlagFamily& family() const noexcept { return family_; }
  int n() const noexcept { return family_.dim(); }
  int coarse_level() const noexcept { return family_.shaping_offset(); }
  double unit_scale() const noexcept { return scale_; }

  /// Bits per block for a rate in bits per dimension.
  int bits_for_rate(double rate) const;
  PlannedCode code(const std::string& role, int bits, std::uint64_t seed) const;
  /// Codebook whose coarse lattice is given explicitly (used for nested
  /// multi-user chains).
  PlannedCode code_between(const std::string& role, int coarse_level, int fine_level, std::uint64_t seed,
                           double scale = 0.0) const;
  /// Level j at the unit-power scale, or at `scale` when given.
  Lattice level(int j, double scale = 0.0) const { return family_.level(j, scale > 0.0 ? scale : scale_); }
  double second_moment(int j, double scale = 0.0) const;

  /// Bits of the list lattice above the coarse level for an effective SNR
  /// (signal power over noise after normalization).  Conservative: the list
  /// is never smaller than the sizing rule asks for.
  int list_bits(double snr, int max_bits) const;
  ListDecoder list_decoder(const PlannedCode& code, double snr) const;

 private:
  SimOptions opt_;
  FlagFamily family_;
  double scale_;
};

/// Observation y = A·X + noise with total noise variance N and X at the
/// codebook power; these helpers divide by A and apply the MMSE factor.
/// A zero amplitude yields the full message set / message 0.
ListResult list_observe(const ListDecoder& dec, double code_power, const Vec& y, double amplitude,
                        double noise, const Vec& dither);
/// Membership probe for the same list as list_observe.
ListProbe list_probe(const ListDecoder& dec, double code_power, const Vec& y, double amplitude, double noise,
                     const Vec& dither);

std::uint32_t unique_observe(const Codebook& cb, double code_power, const Vec& y, double amplitude, double noise,
                             const Vec& dither);

Vec gaussian_vector(int n, double variance, Rng& rng);
double block_power(const Vec& x);

/// Messages surviving every list (each list sorted).
std::vector<std::uint32_t> intersect_lists(const std::vector<const ListResult*>& lists);

/// Decision from several lists of one message: the smallest member of the
/// intersection, or when it is empty the smallest member of the shortest
/// list (the most informative one).
struct ListVote {
  std::uint32_t decision = 0;
  std::size_t survivors = 0;
};
/// Only the shortest list is enumerated, the others are queried per candidate.
ListVote decide_probes(const std::vector<const ListProbe*>& lists);

/// Fills the common report fields from a plan.
void report_code(SimReport& rep, const PlannedCode& code, const Planner& plan, double requested_rate);

}  // namespace latrelay
