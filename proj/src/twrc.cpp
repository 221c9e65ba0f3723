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
  kDecisions1,
  kErrors1,
  kMiss1,
  kAmbiguous1,
  kEmpty1,
  kDecisions2,
  kErrors2,
  kMiss2,
  kAmbiguous2,
  kEmpty2,
  kCounts
};
enum Sum { kDirect1, kRelayed1, kDirect2, kRelayed2, kPower1, kPower2, kPowerRelay, kSums };
enum Peak { kPeak1, kPeak2, kPeakRelay, kPeaks };

struct Block {
  std::array<std::uint32_t, 2> w{};  // by role
  std::array<Vec, 2> u;              // by role
  Vec u_relay;
  std::uint32_t relay_true = 0;      // index of T(b)
  std::uint32_t relay_sent = 0;      // message carried by X_R(b)
  std::array<Vec, 2> y;              // y[k]: signal at terminal k+1
};

}  // namespace

SimReport simulate_twrc(const ChannelParams& p, const SimOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (p.topology != Topology::twrc) throw std::invalid_argument("simulate_twrc: topology must be twrc");
  p.validate();
  if (opt.blocks < 2) throw std::invalid_argument("blocks: must be >= 2");

  const Planner plan(opt);
  const TwoUserPlan tu = detail::plan_two_users(plan, p.P1, p.P2, plan.bits_for_rate(opt.rate1),
                                                plan.bits_for_rate(opt.rate2), opt.seed);
  const std::array<double, 2> power{tu.user[0].power, tu.user[1].power};
  const Codebook& relay_book = *tu.relay.book;
  const double a_relay = std::sqrt(p.P_R);
  const double relay_alpha = (power[0] + power[1]) / (power[0] + power[1] + p.N_R);

  // Terminal k+1 hears the other user (role `src[k]`) with gain h[k].
  const std::array<int, 2> src{tu.role_of(2), tu.role_of(1)};
  const std::array<int, 2> own{tu.role_of(1), tu.role_of(2)};
  const std::array<double, 2> gain{p.h21, p.h12};
  const std::array<double, 2> noise{p.N1, p.N2};
  std::array<std::unique_ptr<ListDecoder>, 2> direct, relayed;
  std::array<double, 2> relayed_noise{};
  for (int k = 0; k < 2; ++k) {
    const double g2 = gain[k] * gain[k] * power[src[k]];
    direct[k] = std::make_unique<ListDecoder>(plan.list_decoder(tu.user[src[k]], g2 / noise[k]));
    relayed_noise[k] = g2 + noise[k];
    relayed[k] = std::make_unique<ListDecoder>(plan.list_decoder(tu.relay, p.P_R * tu.relay.power / relayed_noise[k]));
  }

  const int B = opt.blocks;
  const int n = plan.n();
  const std::array<std::uint32_t, 2> M{static_cast<std::uint32_t>(tu.user[0].book->size()),
                                       static_cast<std::uint32_t>(tu.user[1].book->size())};
  const std::array<std::uint32_t, 2> filler{1 % M[0], 1 % M[1]};

  auto true_index = [&](const std::array<std::uint32_t, 2>& w, const Vec& u_weak) {
    const Vec T = sum_point(tu.coarse(0), tu.coarse(1), tu.user[0].book->point(w[0]), tu.user[1].book->point(w[1]),
                            -u_weak);
    return tu.index_of_sum(T);
  };

  auto trial = [&](std::uint64_t, Rng& rng) {
    Tally t(kCounts, kSums, kPeaks);
    std::vector<Block> blk(static_cast<std::size_t>(B) + 1);
    for (int r = 0; r < 2; ++r) blk[0].w[r] = filler[r];
    // blk[0] stands for the known boundary state: relay message 0.
    for (int b = 1; b <= B; ++b) {
      Block& k = blk[b];
      for (int r = 0; r < 2; ++r) {
        k.w[r] = b < B ? static_cast<std::uint32_t>(rng.below(M[r])) : filler[r];
        k.u[r] = tu.coarse(r).sample_voronoi(rng);
      }
      k.u_relay = relay_book.coarse().sample_voronoi(rng);
      k.relay_true = true_index(k.w, k.u[1]);
    }

    // Transmission and relay sum decoding.
    std::uint32_t relay_est = 0;  // message for X_R of the next block
    for (int b = 1; b <= B; ++b) {
      Block& k = blk[b];
      std::array<Vec, 2> x;
      for (int r = 0; r < 2; ++r) x[r] = tu.user[r].book->encode(k.w[r], k.u[r]);
      k.relay_sent = relay_est;
      const Vec x_relay = a_relay * relay_book.encode(k.relay_sent, k.u_relay);
      const Vec y_relay = x[0] + x[1] + gaussian_vector(n, p.N_R, rng);
      for (int term = 0; term < 2; ++term)
        k.y[term] = gain[term] * x[src[term]] + x_relay + gaussian_vector(n, noise[term], rng);

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

    // Terminal decoding: terminal term+1 resolves the other user's message
    // of block b-1 from the relayed list of block b and its direct list of
    // block b-1.
    for (int term = 0; term < 2; ++term) {
      const int other = src[term], mine = own[term];
      const Codebook& own_book = *tu.user[mine].book;
      const double sign = gain[term] < 0.0 ? -1.0 : 1.0;
      const double amp = std::abs(gain[term]);
      const int base = term == 0 ? kDecisions1 : kDecisions2;
      std::vector<std::uint32_t> est(static_cast<std::size_t>(B) + 1, 0);
      est[0] = filler[other];
      auto own_message = [&](int b) {
        const std::uint32_t w = blk[b].w[mine];
        return term == 0 && opt.wrong_own_message && M[mine] > 1 ? (w + 1) % M[mine] : w;
      };

      for (int b = 2; b <= B; ++b) {
        const Block& prev = blk[b - 1];
        const Block& cur = blk[b];
        // Relay message of block b-1 as this terminal believes it.
        std::uint32_t sent_prev = 0;
        if (b - 2 >= 1) {
          std::array<std::uint32_t, 2> w{};
          w[other] = est[b - 2];
          w[mine] = own_message(b - 2);
          sent_prev = true_index(w, blk[b - 2].u[1]);
        }
        const Vec y_direct = sign * (prev.y[term] - a_relay * relay_book.encode(sent_prev, prev.u_relay));
        const ListProbe ld = list_probe(*direct[term], power[other], y_direct, amp, noise[term], prev.u[other]);
        const ListProbe lr =
            list_probe(*relayed[term], tu.relay.power, cur.y[term], a_relay, relayed_noise[term], cur.u_relay);
        const Vec t_own = own_book.point(own_message(b - 1));
        const std::uint32_t truth = prev.w[other];
        const detail::PairDecision d = detail::resolve_pair(tu, ld, lr, mine, t_own, prev.u[1], truth);
        t.sum[term == 0 ? kDirect1 : kDirect2] += double(ld.exact_size());
        t.sum[term == 0 ? kRelayed1 : kRelayed2] += double(lr.exact_size());
        if (d.miss) ++t.count[base + 2];
        if (d.survivors > 1) ++t.count[base + 3];
        if (d.survivors == 0) ++t.count[base + 4];
        est[b - 1] = d.message;
        ++t.count[base];
        if (est[b - 1] != truth) ++t.count[base + 1];
      }
    }
    return t;
  };

  const Tally tot = run_trials(opt.trials, opt.workers, opt.seed, Tally(kCounts, kSums, kPeaks), trial);

  SimReport rep;
  rep.scheme = "df";
  rep.topology = Topology::twrc;
  rep.n = n;
  rep.blocks = B;
  rep.trials = opt.trials;
  rep.master_seed = opt.seed;
  rep.rate_factor = double(B - 1) / B;
  detail::report_two_users(rep, tu, plan, opt.rate1, opt.rate2);

  auto terminal = [&](const char* name, int base, int direct_sum, int relayed_sum, int k) {
    const double d = double(tot.count[base]);
    StageReport s{name, tot.count[base], tot.count[base + 1], tot.count[base + 2], tot.count[base + 3],
                  tot.count[base + 4], direct[k]->list_size(), d ? tot.sum[direct_sum] / d : 0.0};
    StageReport relayed_stage{std::string(name) + "_relayed_list", tot.count[base], 0, 0, 0, 0,
                              relayed[k]->list_size(), d ? tot.sum[relayed_sum] / d : 0.0};
    return std::pair{s, relayed_stage};
  };
  const auto [t1, t1r] = terminal("terminal1", kDecisions1, kDirect1, kRelayed1, 0);
  const auto [t2, t2r] = terminal("terminal2", kDecisions2, kDirect2, kRelayed2, 1);
  rep.stages = {{"relay", tot.count[kRelayDecisions], tot.count[kRelayErrors]}, t1, t1r, t2, t2r};
  rep.messages = t1.decisions + t2.decisions;
  rep.message_errors = t1.errors + t2.errors;
  rep.error_rate = std::max(t1.error_rate(), t2.error_rate());
  const double blocks_total = double(opt.trials) * B;
  rep.powers = {{"user1", p.P1, tot.sum[kPower1] / blocks_total, tot.peak[kPeak1]},
                {"user2", p.P2, tot.sum[kPower2] / blocks_total, tot.peak[kPeak2]},
                {"relay", p.P_R, tot.sum[kPowerRelay] / blocks_total, tot.peak[kPeakRelay]}};
  rep.diagnostics.emplace_back("relay_alpha", relay_alpha);
  rep.diagnostics.emplace_back("wrong_own_message", opt.wrong_own_message ? 1.0 : 0.0);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

}  // namespace latrelay
