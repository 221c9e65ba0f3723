// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "latrelay/rate_regions.hpp"
#include "latrelay/relay_schemes.hpp"

namespace latrelay {
namespace {

enum Count { kIndexDecisions, kIndexErrors, kDecisions, kErrors, kWzOverload, kCounts };
enum Sum { kDistortion, kDistortionClean, kCleanBlocks, kPowerSource, kPowerRelay, kSums };
enum Peak { kPeakSource, kPeakRelay, kPeaks };

}  // namespace

SimReport simulate_cf(const ChannelParams& p, const SimOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (p.topology != Topology::relay) throw std::invalid_argument("simulate_cf: topology must be relay");
  p.validate();
  if (opt.blocks < 2) throw std::invalid_argument("blocks: must be >= 2");
  if (!(p.P > 0.0)) throw std::invalid_argument("P: must be > 0");

  const Planner plan(opt);
  const int n = plan.n();
  const int j0 = plan.coarse_level();
  const double a_src = std::sqrt(p.P), a_relay = std::sqrt(p.P_R);
  // Variance of Y_R = X + Z_R given the side information X + Z_D.
  const double cond_var = p.N_R + p.P * p.N_D / (p.P + p.N_D);
  const double d_min = cf_min_distortion(p);

  const int index_bits =
      opt.cf_index_bits ? *opt.cf_index_bits
                        : (p.P_R > 0.0 ? static_cast<int>(std::floor(0.5 * n * capacity_C(p.P_R / (p.P + p.N_D)) + 1e-9)) : 0);
  if (index_bits < 0) throw std::invalid_argument("cf_index_bits: must be >= 0");
  const bool relay_active = index_bits > 0 && p.P_R > 0.0;

  // Quantizer pair Λ ⊆ Λ_q: Λ at the shaping level, Λ_q `index_bits`
  // levels finer, scaled so that σ²(Λ_q) = D.
  double D = INFINITY;
  if (relay_active) {
    const double ratio = plan.family().unit_second_moment(j0 + index_bits) / plan.family().unit_second_moment(j0);
    if (opt.distortion) {
      D = *opt.distortion;
      if (!(D > 0.0)) throw std::invalid_argument("distortion: must be > 0");
    } else {
      const double rm = ratio * opt.wz_margin;
      if (!(rm < 1.0))
        throw std::domain_error("distortion: no D meets wz_margin with " + std::to_string(index_bits) + " index bits");
      D = std::max(rm * cond_var / (1.0 - rm), d_min * (1.0 + 1e-9));
    }
    if (D < d_min)
      throw std::domain_error("distortion: D = " + std::to_string(D) + " is below the feasibility bound " +
                              std::to_string(d_min));
  }

  const int bits = plan.bits_for_rate(opt.rate);
  const PlannedCode source = plan.code("source", bits, tagged_seed(opt.seed, StreamTag::codebook, 1));
  const PlannedCode relay = plan.code("relay", relay_active ? index_bits : 0, tagged_seed(opt.seed, StreamTag::codebook, 2));
  PlannedCode quant;
  if (relay_active) {
    const double qscale = std::sqrt(D / plan.family().unit_second_moment(j0 + index_bits));
    quant = plan.code_between("quantizer", j0, j0 + index_bits, tagged_seed(opt.seed, StreamTag::codebook, 3), qscale);
  }
  const Codebook& src_book = *source.book;
  const Codebook& relay_book = *relay.book;
  const double pw = source.power;
  const double alpha2 = p.P / (p.P + p.N_D);
  // Combining weights 1/N_D and 1/(N_R + D) (the common √P is dropped).
  const double w_dir = 1.0 / p.N_D;
  const double w_rel = relay_active ? 1.0 / (p.N_R + D) : 0.0;
  const double comb_amp = a_src * (w_dir + w_rel);
  const double comb_noise = w_dir + w_rel;

  const auto M = static_cast<std::uint32_t>(src_book.size());
  const std::uint32_t filler = 1 % M;
  const int B = opt.blocks;

  auto trial = [&](std::uint64_t, Rng& rng) {
    Tally t(kCounts, kSums, kPeaks);
    std::vector<std::uint32_t> w(static_cast<std::size_t>(B) + 1, filler);
    for (int b = 1; b < B; ++b) w[b] = static_cast<std::uint32_t>(rng.below(M));
    std::vector<Vec> u_src(B + 1), u_q(B + 1), y_relay(B + 1), side(B + 1);
    std::vector<std::uint32_t> index(B + 1, 0);  // I(b), sent in block b+1

    for (int b = 1; b <= B; ++b) {
      u_src[b] = src_book.coarse().sample_voronoi(rng);
      const Vec u_relay = relay_book.coarse().sample_voronoi(rng);
      const Vec x_src = a_src * src_book.encode(w[b], u_src[b]);
      const std::uint32_t sent = b >= 2 ? index[b - 1] : 0;
      const Vec x_relay = a_relay * relay_book.encode(sent, u_relay);
      y_relay[b] = x_src + gaussian_vector(n, p.N_R, rng);
      const Vec y_dest = x_src + x_relay + gaussian_vector(n, p.N_D, rng);

      const double ps = block_power(x_src), pr = block_power(x_relay);
      t.sum[kPowerSource] += ps, t.sum[kPowerRelay] += pr;
      t.peak[kPeakSource] = std::max(t.peak[kPeakSource], ps);
      t.peak[kPeakRelay] = std::max(t.peak[kPeakRelay], pr);

      // Relay compresses this block's observation for the next block.
      if (relay_active) {
        u_q[b] = quant.book->fine().sample_voronoi(rng);
        index[b] = wz_encode(*quant.book, y_relay[b], u_q[b]);
      }

      // Destination: relay index of block b-1, then the side information.
      std::uint32_t idx = 0;
      if (relay_active && b >= 2) {
        idx = unique_observe(relay_book, relay.power, y_dest, a_relay, p.P * pw + p.N_D, u_relay);
        ++t.count[kIndexDecisions];
        if (idx != index[b - 1]) ++t.count[kIndexErrors];
      }
      side[b] = y_dest - a_relay * relay_book.encode(relay_active && b >= 2 ? idx : 0, u_relay);

      if (b >= 2) {
        Vec combined = w_dir * side[b - 1];
        if (relay_active) {
          const Vec y_hat = wz_decode(*quant.book, idx, side[b - 1], u_q[b - 1], alpha2);
          const double dist = block_power(y_hat - y_relay[b - 1]);
          t.sum[kDistortion] += dist;
          // Distortion over blocks where the index arrived and the mod-Λ
          // step did not wrap (error equals the quantization error).
          const Vec e_q = y_relay[b - 1] + u_q[b - 1] - quant.book->fine().nearest_point(y_relay[b - 1] + u_q[b - 1]);
          if (idx == index[b - 1]) {
            if ((y_hat - (y_relay[b - 1] - e_q)).norm() < 1e-6 * (1.0 + y_hat.norm())) {
              t.sum[kDistortionClean] += dist;
              t.sum[kCleanBlocks] += 1.0;
            } else {
              ++t.count[kWzOverload];
            }
          }
          combined += w_rel * y_hat;
        }
        const std::uint32_t est = unique_observe(src_book, pw, combined, comb_amp, comb_noise, u_src[b - 1]);
        ++t.count[kDecisions];
        if (est != w[b - 1]) ++t.count[kErrors];
      }
    }
    return t;
  };

  const Tally tot = run_trials(opt.trials, opt.workers, opt.seed, Tally(kCounts, kSums, kPeaks), trial);

  SimReport rep;
  rep.scheme = "cf";
  rep.topology = Topology::relay;
  rep.n = n;
  rep.blocks = B;
  rep.trials = opt.trials;
  rep.master_seed = opt.seed;
  rep.rate_factor = double(B - 1) / B;
  report_code(rep, source, plan, opt.rate);
  report_code(rep, relay, plan, double(relay_active ? index_bits : 0) / n);
  if (relay_active) report_code(rep, quant, plan, double(index_bits) / n);
  rep.stages = {{"index", tot.count[kIndexDecisions], tot.count[kIndexErrors]},
                {"destination", tot.count[kDecisions], tot.count[kErrors]}};
  rep.messages = tot.count[kDecisions];
  rep.message_errors = tot.count[kErrors];
  rep.error_rate = rep.messages ? double(rep.message_errors) / double(rep.messages) : 0.0;
  const double blocks_total = double(opt.trials) * B;
  rep.powers = {{"source", p.P, tot.sum[kPowerSource] / blocks_total, tot.peak[kPeakSource]},
                {"relay", p.P_R, tot.sum[kPowerRelay] / blocks_total, tot.peak[kPeakRelay]}};
  if (relay_active) {
    rep.distortion_configured = D;
    const double recon = double(tot.count[kDecisions]);
    rep.distortion_measured = recon ? tot.sum[kDistortion] / recon : 0.0;
    rep.diagnostics.emplace_back("distortion_clean",
                                 tot.sum[kCleanBlocks] > 0 ? tot.sum[kDistortionClean] / tot.sum[kCleanBlocks] : 0.0);
    rep.diagnostics.emplace_back("wz_overload_rate", recon ? tot.count[kWzOverload] / recon : 0.0);
  }
  rep.diagnostics.emplace_back("index_bits", double(relay_active ? index_bits : 0));
  rep.diagnostics.emplace_back("distortion_min", d_min);
  rep.diagnostics.emplace_back("rate_at_distortion", cf_rate_at(p, D));
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

SimReport simulate(const std::string& scheme, const ChannelParams& p, const SimOptions& opt) {
  switch (p.topology) {
    case Topology::relay:
      if (scheme == "df") return simulate_df_relay(p, opt);
      if (scheme == "cf") return simulate_cf(p, opt);
      throw std::invalid_argument("scheme: relay topology supports 'df' or 'cf', got '" + scheme + "'");
    case Topology::two_relay:
      if (scheme != "df") throw std::invalid_argument("scheme: two_relay supports 'df' only");
      return simulate_df_two_relay(p, opt);
    case Topology::twrc:
      if (scheme != "df") throw std::invalid_argument("scheme: twrc supports 'df' only");
      return simulate_twrc(p, opt);
    case Topology::marc:
      if (scheme != "df") throw std::invalid_argument("scheme: marc supports 'df' only");
      return simulate_marc(p, opt);
  }
  throw std::invalid_argument("unknown topology");
}

}  // namespace latrelay
