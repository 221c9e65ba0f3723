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
  kFirstDecisions,
  kFirstErrors,
  kSecondDecisions,
  kSecondErrors,
  kSecondMiss,
  kSecondAmbiguous,
  kSecondEmpty,
  kDestDecisions,
  kDestErrors,
  kDestMiss,
  kDestAmbiguous,
  kDestEmpty,
  kCounts
};
enum Sum { kListD1, kListD2, kListD3, kPowerSource, kPowerFirst, kPowerSecond, kSums };
enum Peak { kPeakSource, kPeakFirst, kPeakSecond, kPeaks };

}  // namespace

SimReport simulate_df_two_relay(const ChannelParams& p, const SimOptions& opt) {
  const auto started = std::chrono::steady_clock::now();
  if (p.topology != Topology::two_relay) throw std::invalid_argument("simulate_df_two_relay: topology must be two_relay");
  p.validate();
  if (opt.blocks < 3) throw std::invalid_argument("blocks: must be >= 3 for two relays");

  double a1, b1, a2;
  int perm = p.permutation;
  if (p.alpha1 && p.beta1 && p.alpha2) {
    a1 = *p.alpha1, b1 = *p.beta1, a2 = *p.alpha2;
  } else {
    const RatePoint opt_point = df_two_relay_rate(p);
    a1 = opt_point.arg("alpha1"), b1 = opt_point.arg("beta1"), a2 = opt_point.arg("alpha2");
    perm = static_cast<int>(opt_point.arg("permutation"));
  }
  // Physical node parameters by role.
  const double P_first = perm == 0 ? p.P2 : p.P3, P_second = perm == 0 ? p.P3 : p.P2;
  const double N_first = perm == 0 ? p.N2 : p.N3, N_second = perm == 0 ? p.N3 : p.N2;
  const double gamma = std::max(0.0, 1.0 - a1 - b1);

  // Amplitudes: the source splits into fresh / second-hop / third-hop
  // codewords; relays repeat the later hops coherently.
  const double s_fresh = std::sqrt(a1 * p.P1), s_mid = std::sqrt(b1 * p.P1), s_last = std::sqrt(gamma * p.P1);
  const double f_mid = std::sqrt(a2 * P_first), f_last = std::sqrt((1.0 - a2) * P_first);
  const double g_last = std::sqrt(P_second);
  const double A_mid = s_mid + f_mid, A_last = s_last + f_last + g_last;

  const Planner plan(opt);
  const int bits = plan.bits_for_rate(opt.rate);
  const PlannedCode code1 = plan.code("codebook1", bits, tagged_seed(opt.seed, StreamTag::codebook, 1));
  const PlannedCode code2 = plan.code("codebook2", bits, tagged_seed(opt.seed, StreamTag::codebook, 2));
  const PlannedCode code3 = plan.code("codebook3", bits, tagged_seed(opt.seed, StreamTag::codebook, 3));
  const Codebook& c1 = *code1.book;
  const Codebook& c2 = *code2.book;
  const Codebook& c3 = *code3.book;
  const double pw = code1.power;

  const double noise_s2 = s_fresh * s_fresh * pw + N_second;
  const double noise_d2 = s_fresh * s_fresh * pw + p.N4;
  const double noise_d3 = (s_fresh * s_fresh + A_mid * A_mid) * pw + p.N4;
  const ListDecoder dec_s1 = plan.list_decoder(code1, s_fresh * s_fresh * pw / N_second);
  const ListDecoder dec_s2 = plan.list_decoder(code2, A_mid * A_mid * pw / noise_s2);
  const ListDecoder dec_d1 = plan.list_decoder(code1, s_fresh * s_fresh * pw / p.N4);
  const ListDecoder dec_d2 = plan.list_decoder(code2, A_mid * A_mid * pw / noise_d2);
  const ListDecoder dec_d3 = plan.list_decoder(code3, A_last * A_last * pw / noise_d3);

  const auto M = static_cast<std::uint32_t>(c1.size());
  const std::uint32_t filler = 1 % M;
  const int B = opt.blocks;
  const int n = plan.n();
  // Message m is fresh for 1 <= m <= B-2; index m + 2 in the arrays below.
  auto fresh = [&](int m) { return m >= 1 && m <= B - 2; };
  auto at = [](int m) { return static_cast<std::size_t>(m + 2); };

  auto trial = [&](std::uint64_t, Rng& rng) {
    Tally t(kCounts, kSums, kPeaks);
    const std::size_t slots = static_cast<std::size_t>(B) + 3;
    std::vector<std::uint32_t> w(slots, filler), e_first(slots, filler), e_second(slots, filler),
        e_dest(slots, filler);
    for (int m = 1; m <= B - 2; ++m) w[at(m)] = static_cast<std::uint32_t>(rng.below(M));
    std::vector<std::optional<ListProbe>> second_l1(slots), dest_l1(slots), dest_l2(slots);
    Vec y_dest_prev, u1_prev, u2_prev, u3_prev;

    for (int b = 1; b <= B; ++b) {
      const Vec u1 = c1.coarse().sample_voronoi(rng);
      const Vec u2 = c2.coarse().sample_voronoi(rng);
      const Vec u3 = c3.coarse().sample_voronoi(rng);
      const Vec x_src = s_fresh * c1.encode(w[at(b)], u1) + s_mid * c2.encode(w[at(b - 1)], u2) +
                        s_last * c3.encode(w[at(b - 2)], u3);
      const Vec x_first = f_mid * c2.encode(e_first[at(b - 1)], u2) + f_last * c3.encode(e_first[at(b - 2)], u3);
      const Vec x_second = g_last * c3.encode(e_second[at(b - 2)], u3);
      // Each relay removes its own transmission exactly, so it only sees the others.
      const Vec y_first = x_src + x_second + gaussian_vector(n, N_first, rng);
      const Vec y_second = x_src + x_first + gaussian_vector(n, N_second, rng);
      const Vec y_dest = x_src + x_first + x_second + gaussian_vector(n, p.N4, rng);

      const double ps = block_power(x_src), pf = block_power(x_first), pv = block_power(x_second);
      t.sum[kPowerSource] += ps, t.sum[kPowerFirst] += pf, t.sum[kPowerSecond] += pv;
      t.peak[kPeakSource] = std::max(t.peak[kPeakSource], ps);
      t.peak[kPeakFirst] = std::max(t.peak[kPeakFirst], pf);
      t.peak[kPeakSecond] = std::max(t.peak[kPeakSecond], pv);

      // First relay: everything but the fresh codeword is known to it.
      if (fresh(b)) {
        const Vec clean = y_first - s_mid * c2.encode(e_first[at(b - 1)], u2) -
                          (s_last + g_last) * c3.encode(e_first[at(b - 2)], u3);
        e_first[at(b)] = unique_observe(c1, pw, clean, s_fresh, N_first, u1);
        ++t.count[kFirstDecisions];
        if (e_first[at(b)] != w[at(b)]) ++t.count[kFirstErrors];
      }

      // Second relay: third-hop codeword known; resolve w_{b-1} from two lists.
      const Vec y2 = y_second - (s_last + f_last) * c3.encode(e_second[at(b - 2)], u3);
      if (fresh(b - 1)) {
        const ListProbe l2 = list_probe(dec_s2, pw, y2, A_mid, noise_s2, u2);
        const ListProbe& l1 = *second_l1[at(b - 1)];
        const ListVote vote = decide_probes({&l2, &l1});
        const std::uint32_t truth = w[at(b - 1)];
        if (!l1.contains(truth) || !l2.contains(truth)) ++t.count[kSecondMiss];
        if (vote.survivors > 1) ++t.count[kSecondAmbiguous];
        if (vote.survivors == 0) ++t.count[kSecondEmpty];
        e_second[at(b - 1)] = vote.decision;
        ++t.count[kSecondDecisions];
        if (e_second[at(b - 1)] != truth) ++t.count[kSecondErrors];
      }
      if (fresh(b)) {
        const Vec clean = y2 - A_mid * c2.encode(e_second[at(b - 1)], u2);
        second_l1[at(b)] = list_probe(dec_s1, pw, clean, s_fresh, N_second, u1);
      }

      // Destination: w_{b-2} from the third-hop list and the two stored lists.
      if (fresh(b - 2)) {
        const ListProbe l3 = list_probe(dec_d3, pw, y_dest, A_last, noise_d3, u3);
        const ListProbe& l2 = *dest_l2[at(b - 2)];
        const ListProbe& l1 = *dest_l1[at(b - 2)];
        const ListVote vote = decide_probes({&l3, &l2, &l1});
        const std::uint32_t truth = w[at(b - 2)];
        t.sum[kListD1] += double(l1.exact_size());
        t.sum[kListD2] += double(l2.exact_size());
        t.sum[kListD3] += double(l3.exact_size());
        if (!l1.contains(truth) || !l2.contains(truth) || !l3.contains(truth)) ++t.count[kDestMiss];
        if (vote.survivors > 1) ++t.count[kDestAmbiguous];
        if (vote.survivors == 0) ++t.count[kDestEmpty];
        e_dest[at(b - 2)] = vote.decision;
        ++t.count[kDestDecisions];
        if (e_dest[at(b - 2)] != truth) ++t.count[kDestErrors];
      }
      if (fresh(b - 1)) {
        // Second-hop list for w_{b-1} from this block ...
        const Vec y_mid = y_dest - A_last * c3.encode(e_dest[at(b - 2)], u3);
        dest_l2[at(b - 1)] = list_probe(dec_d2, pw, y_mid, A_mid, noise_d2, u2);
        // ... and the fresh-codeword list for w_{b-1} from the previous block.
        const Vec y_old = y_dest_prev - A_last * c3.encode(e_dest[at(b - 3)], u3_prev) -
                          A_mid * c2.encode(e_dest[at(b - 2)], u2_prev);
        dest_l1[at(b - 1)] = list_probe(dec_d1, pw, y_old, s_fresh, p.N4, u1_prev);
      }
      y_dest_prev = y_dest, u1_prev = u1, u2_prev = u2, u3_prev = u3;
    }
    return t;
  };

  const Tally tot = run_trials(opt.trials, opt.workers, opt.seed, Tally(kCounts, kSums, kPeaks), trial);

  SimReport rep;
  rep.scheme = "df";
  rep.topology = Topology::two_relay;
  rep.n = n;
  rep.blocks = B;
  rep.trials = opt.trials;
  rep.master_seed = opt.seed;
  rep.rate_factor = double(B - 2) / B;
  report_code(rep, code1, plan, opt.rate);
  report_code(rep, code2, plan, opt.rate);
  report_code(rep, code3, plan, opt.rate);

  const double dd = double(tot.count[kDestDecisions]);
  const double mean1 = dd ? tot.sum[kListD1] / dd : 0.0;
  rep.stages = {
      {"first_relay", tot.count[kFirstDecisions], tot.count[kFirstErrors]},
      {"second_relay", tot.count[kSecondDecisions], tot.count[kSecondErrors], tot.count[kSecondMiss],
       tot.count[kSecondAmbiguous], tot.count[kSecondEmpty], dec_s2.list_size(), 0.0},
      {"list_destination_fresh", tot.count[kDestDecisions], 0, 0, 0, 0, dec_d1.list_size(), mean1},
      {"list_destination_second", tot.count[kDestDecisions], 0, 0, 0, 0, dec_d2.list_size(),
       dd ? tot.sum[kListD2] / dd : 0.0},
      {"list_destination_third", tot.count[kDestDecisions], 0, 0, 0, 0, dec_d3.list_size(),
       dd ? tot.sum[kListD3] / dd : 0.0},
      {"destination", tot.count[kDestDecisions], tot.count[kDestErrors], tot.count[kDestMiss],
       tot.count[kDestAmbiguous], tot.count[kDestEmpty], dec_d3.list_size(), dd ? tot.sum[kListD3] / dd : 0.0},
  };
  rep.messages = tot.count[kDestDecisions];
  rep.message_errors = tot.count[kDestErrors];
  rep.error_rate = rep.messages ? double(rep.message_errors) / double(rep.messages) : 0.0;
  const double blocks_total = double(opt.trials) * B;
  rep.powers = {{"source", p.P1, tot.sum[kPowerSource] / blocks_total, tot.peak[kPeakSource]},
                {"first_relay", P_first, tot.sum[kPowerFirst] / blocks_total, tot.peak[kPeakFirst]},
                {"second_relay", P_second, tot.sum[kPowerSecond] / blocks_total, tot.peak[kPeakSecond]}};
  rep.diagnostics = {{"alpha1", a1},
                     {"beta1", b1},
                     {"alpha2", a2},
                     {"permutation", double(perm)},
                     {"rate_effective", c1.rate() * rep.rate_factor}};
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return rep;
}

}  // namespace latrelay
