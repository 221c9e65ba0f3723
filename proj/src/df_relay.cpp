// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "latrelay/rate_regions.hpp"
#include "latrelay/relay_schemes.hpp"

namespace latrelay {
namespace {

enum Count {
  kRelayDecisions,
  kRelayErrors,
  kDestDecisions,
  kDestErrors,
  kMissRD,
  kMissSD,
  kAmbiguous,
  kEmpty,
  kCorrN,
  kCorrA,
  kCorrB,
  kCorrAB,
  kCounts
};
enum Sum { kListRD, kListSD, kPowerSource, kPowerRelay, kSums };
enum Peak { kPeakSource, kPeakRelay, kPeaks };

}  // namespace

SimReport simulate_df_relay(const ChannelParams& p, const SimOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (p.topology != Topology::relay) throw std::invalid_argument("simulate_df_relay: topology must be relay");
  p.validate();
  if (opt.blocks < 2) throw std::invalid_argument("blocks: must be >= 2");

  const double alpha = p.alpha ? *p.alpha : df_rate(p).arg("alpha");
  const double a_fresh = std::sqrt(alpha * p.P);
  const double a_resolve = std::sqrt((1.0 - alpha) * p.P);
  const double a_relay = std::sqrt(p.P_R);
  const double a_joint = a_resolve + a_relay;  // coherent amplitude of the resolution codeword

  const Planner plan(opt);
  const int bits = plan.bits_for_rate(opt.rate);
  const PlannedCode fresh = plan.code("fresh", bits, tagged_seed(opt.seed, StreamTag::codebook, 1));
  const PlannedCode resolve = plan.code("resolve", bits, tagged_seed(opt.seed, StreamTag::codebook, 2));
  const double pw = fresh.power;
  const Codebook& cb1 = *fresh.book;
  const Codebook& cb2 = *resolve.book;

  // L_{R-D}: resolution codeword with the fresh codeword as extra noise.
  const double noise_rd = a_fresh * a_fresh * pw + p.N_D;
  const ListDecoder dec_rd = plan.list_decoder(resolve, a_joint * a_joint * pw / noise_rd);
  // L_{S-D}: fresh codeword once the resolution codeword is removed.
  const ListDecoder dec_sd = plan.list_decoder(fresh, a_fresh * a_fresh * pw / p.N_D);

  const auto M = static_cast<std::uint32_t>(cb1.size());
  const std::uint32_t filler = 1 % M;
  const int B = opt.blocks;
  const int n = plan.n();

  auto trial = [&](std::uint64_t, Rng& rng) {
    Tally t(kCounts, kSums, kPeaks);
    std::vector<std::uint32_t> w(static_cast<std::size_t>(B) + 1, filler);
    for (int b = 1; b < B; ++b) w[b] = static_cast<std::uint32_t>(rng.below(M));
    std::uint32_t relay_prev = filler;  // relay's estimate of w_{b-1}
    std::uint32_t dest_prev = filler;   // destination's estimate of w_{b-1}
    std::optional<ListProbe> sd_prev;   // L_{S-D} for w_{b-1}

    for (int b = 1; b <= B; ++b) {
      const Vec u1 = cb1.coarse().sample_voronoi(rng);
      const Vec u2 = cb2.coarse().sample_voronoi(rng);
      const Vec x_src = a_fresh * cb1.encode(w[b], u1) + a_resolve * cb2.encode(w[b - 1], u2);
      const Vec x_relay = a_relay * cb2.encode(relay_prev, u2);
      const Vec y_relay = x_src + gaussian_vector(n, p.N_R, rng);
      const Vec y_dest = x_src + x_relay + gaussian_vector(n, p.N_D, rng);

      const double ps = block_power(x_src), pr = block_power(x_relay);
      t.sum[kPowerSource] += ps;
      t.sum[kPowerRelay] += pr;
      t.peak[kPeakSource] = std::max(t.peak[kPeakSource], ps);
      t.peak[kPeakRelay] = std::max(t.peak[kPeakRelay], pr);

      // Relay: strip its own copy of the resolution codeword, decode w_b.
      std::uint32_t relay_now = filler;
      if (b < B) {
        const Vec clean = y_relay - a_resolve * cb2.encode(relay_prev, u2);
        relay_now = unique_observe(cb1, pw, clean, a_fresh, p.N_R, u1);
        ++t.count[kRelayDecisions];
        if (relay_now != w[b]) ++t.count[kRelayErrors];
      }

      // Destination: resolve w_{b-1} from L_{R-D} ∩ L_{S-D}.
      std::uint32_t dest_now = filler;
      if (b >= 2) {
        const ListProbe rd = list_probe(dec_rd, pw, y_dest, a_joint, noise_rd, u2);
        const ListProbe& sd = *sd_prev;
        const ListVote vote = decide_probes({&rd, &sd});
        const std::uint32_t truth = w[b - 1];
        t.sum[kListRD] += double(rd.exact_size());
        t.sum[kListSD] += double(sd.exact_size());
        if (!rd.contains(truth)) ++t.count[kMissRD];
        if (!sd.contains(truth)) ++t.count[kMissSD];
        if (vote.survivors > 1) ++t.count[kAmbiguous];
        if (vote.survivors == 0) ++t.count[kEmpty];
        dest_now = vote.decision;
        ++t.count[kDestDecisions];
        if (dest_now != truth) ++t.count[kDestErrors];

        const std::uint32_t wrong = (truth + 1) % M;
        if (wrong != truth) {
          const bool ia = rd.contains(wrong), ib = sd.contains(wrong);
          ++t.count[kCorrN];
          t.count[kCorrA] += ia;
          t.count[kCorrB] += ib;
          t.count[kCorrAB] += ia && ib;
        }
        dest_prev = dest_now;
      }

      // L_{S-D} for w_b from the same block, resolution codeword removed.
      if (b < B) {
        const Vec clean = y_dest - a_joint * cb2.encode(dest_prev, u2);
        sd_prev = list_probe(dec_sd, pw, clean, a_fresh, p.N_D, u1);
      }
      relay_prev = relay_now;
    }
    return t;
  };

  const Tally tot = run_trials(opt.trials, opt.workers, opt.seed, Tally(kCounts, kSums, kPeaks), trial);

  SimReport rep;
  rep.scheme = "df";
  rep.topology = Topology::relay;
  rep.n = n;
  rep.blocks = B;
  rep.trials = opt.trials;
  rep.master_seed = opt.seed;
  rep.rate_factor = double(B - 1) / B;
  report_code(rep, fresh, plan, opt.rate);
  report_code(rep, resolve, plan, opt.rate);
  rep.lattices.push_back({"list.relay_destination", dec_rd.list_lattice().describe(),
                          resolve.coarse_level + int(std::lround(std::log2(double(cb2.size()) / dec_rd.list_size()))),
                          dec_rd.list_lattice().volume(), 0.0});
  rep.lattices.push_back({"list.source_destination", dec_sd.list_lattice().describe(),
                          fresh.coarse_level + int(std::lround(std::log2(double(cb1.size()) / dec_sd.list_size()))),
                          dec_sd.list_lattice().volume(), 0.0});

  const double blocks_total = double(opt.trials) * B;
  const double decisions = double(tot.count[kDestDecisions]);
  StageReport relay{"relay", tot.count[kRelayDecisions], tot.count[kRelayErrors]};
  StageReport dest{"destination", tot.count[kDestDecisions], tot.count[kDestErrors],
                   tot.count[kMissRD] + tot.count[kMissSD], tot.count[kAmbiguous], tot.count[kEmpty],
                   dec_rd.list_size(), decisions ? tot.sum[kListRD] / decisions : 0.0};
  StageReport list_sd{"list_source_destination", tot.count[kDestDecisions], 0, tot.count[kMissSD], 0, 0,
                      dec_sd.list_size(), decisions ? tot.sum[kListSD] / decisions : 0.0};
  StageReport list_rd{"list_relay_destination", tot.count[kDestDecisions], 0, tot.count[kMissRD], 0, 0,
                      dec_rd.list_size(), decisions ? tot.sum[kListRD] / decisions : 0.0};
  rep.stages = {relay, list_rd, list_sd, dest};
  rep.messages = tot.count[kDestDecisions];
  rep.message_errors = tot.count[kDestErrors];
  rep.error_rate = rep.messages ? double(rep.message_errors) / double(rep.messages) : 0.0;
  rep.powers = {{"source", p.P, tot.sum[kPowerSource] / blocks_total, tot.peak[kPeakSource]},
                {"relay", p.P_R, tot.sum[kPowerRelay] / blocks_total, tot.peak[kPeakRelay]}};

  // Pearson correlation of the membership indicators of a fixed wrong message.
  const double cn = double(tot.count[kCorrN]);
  double rho = 0.0;
  if (cn > 0) {
    const double ma = tot.count[kCorrA] / cn, mb = tot.count[kCorrB] / cn, mab = tot.count[kCorrAB] / cn;
    const double va = ma * (1 - ma), vb = mb * (1 - mb);
    rho = va > 0 && vb > 0 ? (mab - ma * mb) / std::sqrt(va * vb) : 0.0;
  }
  rep.diagnostics = {{"alpha", alpha},
                     {"kappa", a_resolve > 0.0 ? 1.0 + std::sqrt(p.P_R / ((1.0 - alpha) * p.P)) : INFINITY},
                     {"wrong_message_correlation", rho},
                     {"wrong_message_samples", cn},
                     {"rate_effective", cb1.rate() * rep.rate_factor}};
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

}  // namespace latrelay
