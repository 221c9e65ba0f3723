// SPDX-License-Identifier: Apache-2.0
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "two_user.hpp"

namespace latrelay {
namespace {

using detail::TwoUserPlan;

enum Count {
  kRelayDecisions,
  kRelayErrors,
  kFirstDecisions,   // user decoded first, unique decoding
  kFirstErrors,
  kSecondDecisions,  // user resolved from relayed and direct lists
  kSecondErrors,
  kSecondMiss,
  kSecondAmbiguous,
  kSecondEmpty,
  kCounts
};
enum Sum { kDirect, kRelayed, kPower1, kPower2, kPowerRelay, kSums };
enum Peak { kPeak1, kPeak2, kPeakRelay, kPeaks };

struct Block {
  std::array<std::uint32_t, 2> w{};
  std::array<Vec, 2> u;
  Vec u_relay;
  std::uint32_t relay_true = 0;
  Vec y;
};

}  // namespace

SimReport simulate_marc(const ChannelParams& p, const SimOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (p.topology != Topology::marc) throw std::invalid_argument("simulate_marc: topology must be marc");
  p.validate();
  if (opt.blocks < 2) throw std::invalid_argument("blocks: must be >= 2");
  if (opt.decoding_order != 1 && opt.decoding_order != 2) throw std::invalid_argument("decoding_order: must be 1 or 2");

  const Planner plan(opt);
  const TwoUserPlan tu = detail::plan_two_users(plan, p.P1, p.P2, plan.bits_for_rate(opt.rate1),
                                                plan.bits_for_rate(opt.rate2), opt.seed);
  const std::array<double, 2> power{tu.user[0].power, tu.user[1].power};
  const Codebook& relay_book = *tu.relay.book;
  const double a_relay = std::sqrt(p.P_R);
  const double relay_alpha = (power[0] + power[1]) / (power[0] + power[1] + p.N_R);

  // The user decoded first in each block is unique-decoded against the
  // other user and the relay; the second is resolved one block later.
  const int first = tu.role_of(opt.decoding_order);
  const int second = 1 - first;
  const double first_noise = power[second] + p.P_R * tu.relay.power + p.N_D;
  const double relayed_noise = power[second] + p.N_D;
  const ListDecoder direct = plan.list_decoder(tu.user[second], power[second] / p.N_D);
  const ListDecoder relayed = plan.list_decoder(tu.relay, p.P_R * tu.relay.power / relayed_noise);

  const int B = opt.blocks;
  const int n = plan.n();
  const std::array<std::uint32_t, 2> M{static_cast<std::uint32_t>(tu.user[0].book->size()),
                                       static_cast<std::uint32_t>(tu.user[1].book->size())};
  const std::array<std::uint32_t, 2> filler{1 % M[0], 1 % M[1]};

  auto sum_index = [&](const std::array<std::uint32_t, 2>& w, const Vec& u_weak) {
    const Vec T = sum_point(tu.coarse(0), tu.coarse(1), tu.user[0].book->point(w[0]), tu.user[1].book->point(w[1]),
                            -u_weak);
    return tu.index_of_sum(T);
  };

  auto trial = [&](std::uint64_t, Rng& rng) {
    Tally t(kCounts, kSums, kPeaks);
    std::vector<Block> blk(static_cast<std::size_t>(B) + 1);
    for (int r = 0; r < 2; ++r) blk[0].w[r] = filler[r];
    for (int b = 1; b <= B; ++b) {
      Block& k = blk[b];
      for (int r = 0; r < 2; ++r) {
        k.w[r] = b < B ? static_cast<std::uint32_t>(rng.below(M[r])) : filler[r];
        k.u[r] = tu.coarse(r).sample_voronoi(rng);
      }
      k.u_relay = relay_book.coarse().sample_voronoi(rng);
      k.relay_true = sum_index(k.w, k.u[1]);
    }

    std::uint32_t relay_est = 0;
    for (int b = 1; b <= B; ++b) {
      Block& k = blk[b];
      std::array<Vec, 2> x;
      for (int r = 0; r < 2; ++r) x[r] = tu.user[r].book->encode(k.w[r], k.u[r]);
      const Vec x_relay = a_relay * relay_book.encode(relay_est, k.u_relay);
      const Vec y_relay = x[0] + x[1] + gaussian_vector(n, p.N_R, rng);
      k.y = x[0] + x[1] + x_relay + gaussian_vector(n, p.N_D, rng);

      const double p1 = block_power(x[tu.role_of(1)]), p2 = block_power(x[tu.role_of(2)]), pr = block_power(x_relay);
      t.sum[kPower1] += p1, t.sum[kPower2] += p2, t.sum[kPowerRelay] += pr;
      t.peak[kPeak1] = std::max(t.peak[kPeak1], p1);
      t.peak[kPeak2] = std::max(t.peak[kPeak2], p2);
      t.peak[kPeakRelay] = std::max(t.peak[kPeakRelay], pr);

      const Vec T = relay_sum_decode(tu.coarse(0), tu.coarse(1), tu.finer, y_relay, k.u[0], k.u[1], relay_alpha);
      relay_est = tu.index_of_sum(T);
      if (b < B) {
        ++t.count[kRelayDecisions];
        if (relay_est != k.relay_true) ++t.count[kRelayErrors];
      }
    }

    // Destination: in block b decode the first user's w_b, then resolve the
    // second user's w_{b-1}.
    std::vector<std::array<std::uint32_t, 2>> est(static_cast<std::size_t>(B) + 1);
    est[0] = {filler[0], filler[1]};
    const Codebook& first_book = *tu.user[first].book;
    for (int b = 1; b <= B; ++b) {
      const Block& cur = blk[b];
      const std::uint32_t w_first = unique_observe(first_book, power[first], cur.y, 1.0, first_noise, cur.u[first]);
      est[b][first] = w_first;
      if (b < B) {
        ++t.count[kFirstDecisions];
        if (w_first != cur.w[first]) ++t.count[kFirstErrors];
      }
      if (b < 2) continue;

      const Block& prev = blk[b - 1];
      // Relayed list from this block with the first user's codeword removed.
      const Vec y_rel = cur.y - first_book.encode(w_first, cur.u[first]);
      const ListProbe lr = list_probe(relayed, tu.relay.power, y_rel, a_relay, relayed_noise, cur.u_relay);
      const Vec t_first_prev = first_book.point(est[b - 1][first]);
      // Direct list from the previous block with the first user's codeword
      // and the relay codeword (index of T(b-2)) removed.
      const std::uint32_t sent_prev = b - 2 >= 1 ? sum_index(est[b - 2], blk[b - 2].u[1]) : 0;
      const Vec y_dir = prev.y - first_book.encode(est[b - 1][first], prev.u[first]) -
                        a_relay * relay_book.encode(sent_prev, prev.u_relay);
      const ListProbe ld = list_probe(direct, power[second], y_dir, 1.0, p.N_D, prev.u[second]);
      const std::uint32_t truth = prev.w[second];
      const detail::PairDecision d = detail::resolve_pair(tu, ld, lr, first, t_first_prev, prev.u[1], truth);
      t.sum[kDirect] += double(ld.exact_size());
      t.sum[kRelayed] += double(lr.exact_size());
      if (d.miss) ++t.count[kSecondMiss];
      if (d.survivors > 1) ++t.count[kSecondAmbiguous];
      if (d.survivors == 0) ++t.count[kSecondEmpty];
      est[b - 1][second] = d.message;
      ++t.count[kSecondDecisions];
      if (est[b - 1][second] != truth) ++t.count[kSecondErrors];
    }
    return t;
  };

  const Tally tot = run_trials(opt.trials, opt.workers, opt.seed, Tally(kCounts, kSums, kPeaks), trial);

  SimReport rep;
  rep.scheme = "df";
  rep.topology = Topology::marc;
  rep.n = n;
  rep.blocks = B;
  rep.trials = opt.trials;
  rep.master_seed = opt.seed;
  rep.rate_factor = double(B - 1) / B;
  detail::report_two_users(rep, tu, plan, opt.rate1, opt.rate2);

  const double d = double(tot.count[kSecondDecisions]);
  StageReport s_first{"", tot.count[kFirstDecisions], tot.count[kFirstErrors]};
  StageReport s_second{"", tot.count[kSecondDecisions], tot.count[kSecondErrors], tot.count[kSecondMiss],
                       tot.count[kSecondAmbiguous], tot.count[kSecondEmpty], direct.list_size(),
                       d ? tot.sum[kDirect] / d : 0.0};
  const bool user1_first = tu.role_of(1) == first;
  s_first.name = user1_first ? "user1" : "user2";
  s_second.name = user1_first ? "user2" : "user1";
  StageReport relayed_stage{s_second.name + "_relayed_list", tot.count[kSecondDecisions], 0, 0, 0, 0,
                            relayed.list_size(), d ? tot.sum[kRelayed] / d : 0.0};
  rep.stages = {{"relay", tot.count[kRelayDecisions], tot.count[kRelayErrors]}};
  if (user1_first) rep.stages.insert(rep.stages.end(), {s_first, s_second, relayed_stage});
  else rep.stages.insert(rep.stages.end(), {s_second, relayed_stage, s_first});
  rep.messages = s_first.decisions + s_second.decisions;
  rep.message_errors = s_first.errors + s_second.errors;
  rep.error_rate = std::max(s_first.error_rate(), s_second.error_rate());
  const double blocks_total = double(opt.trials) * B;
  rep.powers = {{"user1", p.P1, tot.sum[kPower1] / blocks_total, tot.peak[kPeak1]},
                {"user2", p.P2, tot.sum[kPower2] / blocks_total, tot.peak[kPeak2]},
                {"relay", p.P_R, tot.sum[kPowerRelay] / blocks_total, tot.peak[kPeakRelay]}};
  rep.diagnostics.emplace_back("relay_alpha", relay_alpha);
  rep.diagnostics.emplace_back("decoding_order", double(opt.decoding_order));
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

}  // namespace latrelay
