// SPDX-License-Identifier: Apache-2.0
// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>

#include "latrelay/harness.hpp"
#include "support.hpp"

using namespace latrelay;
using testsupport::uniform_vec;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

double half_log2(double x) { return 0.5 * std::log2(x); }

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Vec gaussian(int n, double var, Rng& rng) {
  Vec z(n);
  for (int i = 0; i < n; ++i) z(i) = std::sqrt(var) * rng.normal();
  return z;
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// 1 ------------------------------------------------------------------------
Outcome golden_values() {
  Outcome o;
  ChannelParams r;
  r.topology = Topology::relay;
  r.P = r.P_R = r.N_R = r.N_D = 1.0;
  const double cf = cf_rate(r).R;
  const double wz = wz_rate(1, 1, 1, 1).lattice;
  ChannelParams t;
  t.topology = Topology::twrc;
  t.P1 = t.P2 = t.P_R = t.N_R = t.N1 = t.N2 = 1.0;
  const double tw = twrc_region(t).R1;
  const RatePoint df = df_rate(r);
  o.pass = std::abs(cf - half_log2(2.25)) < 1e-9 && std::abs(wz - half_log2(2.5)) < 1e-9 &&
           std::abs(tw - half_log2(1.5)) < 1e-9 && std::abs(df.R - 0.5) < 1e-9 &&
           std::abs(df.arg("alpha") - 1.0) <= 1e-3;
  o.detail = fmt("cf %.12f wz %.12f twrc %.12f", cf, wz, tw) + fmt(" df %.12f alpha %.6f", df.R, df.arg("alpha"));
  return o;
}

// 2 ------------------------------------------------------------------------
Outcome poltyrev() {
  const double d2 = std::abs(poltyrev_branch(0, 2.0) - poltyrev_branch(1, 2.0));
  const double d4 = std::abs(poltyrev_branch(1, 4.0) - poltyrev_branch(2, 4.0));
  return {d2 < 1e-12 && d4 < 1e-12 && poltyrev_exponent(1.0) == 0.0,
          fmt("|gap| at 2: %.3g, at 4: %.3g, E(1) = %g", d2, d4, poltyrev_exponent(1.0))};
}

// 3 ------------------------------------------------------------------------
Outcome mod_algebra() {
  long failures = 0, checks = 0;
  auto expect = [&](bool ok) { ++checks, failures += !ok; };
  const double tol = 1e-9;
  Rng rng(3);
  for (int n : {1, 2}) {
    const Codebook c1(Lattice::integer_scaled(n, 4.0), Lattice::integer_scaled(n, 1.0), 11);
    const Codebook c2(Lattice::integer_scaled(n, 2.0), Lattice::integer_scaled(n, 1.0), 12);
    const Lattice& l1 = c1.coarse();
    const Lattice& l2 = c2.coarse();
    for (int t = 0; t < 1000; ++t) {
      const Vec x = uniform_vec(n, -9.0, 9.0, rng);
      for (const Lattice* l : {&l1, &l2}) {
        const Vec m = l->mod(x);
        expect((l->mod(m) - m).norm() < tol);
        Vec k(n);
        for (int i = 0; i < n; ++i) k(i) = double(static_cast<int>(rng.below(9)) - 4);
        expect((l->mod(x + l->generator() * k) - m).norm() < tol);
      }
      const auto w = static_cast<std::uint32_t>(rng.below(c1.size()));
      const Vec u = l1.sample_voronoi(rng);
      expect((l1.mod(c1.encode(w, u) + u) - c1.point(w)).norm() < tol);
    }
    // Both inversions: every pair for n = 1 (100 dithers), 1000 random
    // dithers and pairs for n = 2.
    const int dithers = n == 1 ? 100 : 1000;
    for (int k = 0; k < dithers; ++k) {
      const Vec d2 = l2.sample_voronoi(rng);
      auto check_pair = [&](const Vec& t1, const Vec& t2) {
        const Vec T = sum_point(l1, l2, t1, t2, d2);
        expect((recover_t1_from_T(T, t2, d2, l1, l2) - t1).norm() < tol);
        expect((recover_t2_from_T(T, t1, l1, l2) - t2).norm() < tol);
      };
      if (n == 1) {
        for (const Vec& t1 : c1.points())
          for (const Vec& t2 : c2.points()) check_pair(t1, t2);
      } else {
        check_pair(c1.point(static_cast<std::uint32_t>(rng.below(c1.size()))),
                   c2.point(static_cast<std::uint32_t>(rng.below(c2.size()))));
      }
    }
  }
  return {failures == 0, fmt("%.0f failures in %.0f checks", double(failures), double(checks))};
}

// 4 ------------------------------------------------------------------------
Outcome list_sizes() {
  const FlagFamily f = FlagFamily::e8();
  const auto cb = std::make_shared<const Codebook>(f.level(4, 1.0), f.level(12, 1.0), 4);
  Rng rng(4);
  long bad_size = 0, bad_equiv = 0;
  for (int gap : {1, 2, 3}) {
    const ListDecoder dec(cb, f.level(12 - gap, 1.0));
    for (int t = 0; t < 1000; ++t) {
      const Vec y = uniform_vec(8, -4.0, 4.0, rng);
      const Vec u = cb->coarse().sample_voronoi(rng);
      const double alpha = 0.5 + 0.5 * rng.uniform();
      const ListResult a = list_decode(dec, y, u, alpha);
      if (a.messages.size() != (1u << gap) || a.exact_size != (1u << gap)) ++bad_size;
      if (a.messages != list_decode_via_Q(dec, y, u, alpha).messages) ++bad_equiv;
    }
  }
  return {bad_size == 0 && bad_equiv == 0,
          fmt("size mismatches %.0f, equivalence mismatches %.0f over 3000 lists", double(bad_size), double(bad_equiv))};
}

// 5 ------------------------------------------------------------------------
Outcome in_list() {
  SimOptions opt;
  opt.list_margin = 4.0;
  opt.list_self_similar = true;
  const Planner plan(opt);
  const double N = 0.1;  // unit power, SNR 10
  const PlannedCode code = plan.code("acceptance", 16, 51);
  const ListDecoder dec = plan.list_decoder(code, code.power / N);
  Rng rng(52);
  int hits = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const auto w = static_cast<std::uint32_t>(rng.below(code.book->size()));
    const Vec u = code.book->coarse().sample_voronoi(rng);
    const Vec y = code.book->encode(w, u) + gaussian(8, N, rng);
    if (dec.probe(y, u, mmse_alpha(code.power, N)).contains(w)) ++hits;
  }
  const double p = double(hits) / trials;
  return {p >= 0.95, fmt("in-list %.4f with list size %.0f of %.0f", p, double(dec.list_size()),
                         double(code.book->size()))};
}

// 6 ------------------------------------------------------------------------
Outcome crypto_lemma() {
  const Lattice l = Lattice::construction_a(3, {{1, 2}}, 2, 2.0);
  Rng rng(6);
  const double crit = testsupport::chi2_critical(24, 0.01);
  double worst = 0.0;
  int failures = 0;
  for (int k = 0; k < 10; ++k) {
    const Vec x = uniform_vec(2, -5.0, 5.0, rng);
    std::vector<long> counts(25, 0);
    for (int s = 0; s < 100000; ++s) ++counts[testsupport::cell_bin(l, l.mod(x + l.sample_voronoi(rng)), 5)];
    const double stat = testsupport::chi2_statistic(counts);
    worst = std::max(worst, stat);
    failures += stat >= crit;
  }
  return {failures == 0, fmt("worst chi-square %.2f, critical %.2f (24 dof)", worst, crit)};
}

// 7 ------------------------------------------------------------------------
Outcome wz_distortion() {
  const double P = 1.0, N1 = 0.02, N2 = 0.1, D = 0.05;
  const FlagFamily f = FlagFamily::e8();
  const int jq = 20;
  const double scale = std::sqrt(D / f.unit_second_moment(jq));
  const Codebook pair(f.level(jq - 16, scale), f.level(jq, scale), 7);
  const double a2 = P / (P + N2);
  Rng rng(7);
  double acc = 0.0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    const Vec x = gaussian(8, P, rng);
    const Vec y = x + gaussian(8, N1, rng), s = x + gaussian(8, N2, rng);
    const Vec u = pair.fine().sample_voronoi(rng);
    acc += (wz_decode(pair, wz_encode(pair, y, u), s, u, a2) - y).squaredNorm() / 8.0;
  }
  const double got = acc / trials;
  return {std::abs(got - D) <= 0.1 * D, fmt("measured %.5f vs D %.5f (%.1f%%)", got, D, 100.0 * (got - D) / D)};
}

// 8 ------------------------------------------------------------------------
Outcome end_to_end() {
  struct Point {
    const char* label;
    const char* scheme;
    Topology topo;
    int order;
    double below;
    double limit;
  };
  const Point points[] = {{"df", "df", Topology::relay, 1, -0.2, 0.1},
                          {"two_relay", "df", Topology::two_relay, 1, -0.2, 0.1},
                          {"twrc", "df", Topology::twrc, 1, -0.2, 0.1},
                          {"marc1", "df", Topology::marc, 1, -0.2, 0.1},
                          {"marc2", "df", Topology::marc, 2, -0.2, 0.1},
                          {"cf", "cf", Topology::relay, 1, -0.25, 0.15}};
  Outcome o;
  for (const Point& pt : points) {
    ChannelParams p;
    p.topology = pt.topo;
    p.P = p.P_R = p.P1 = p.P2 = p.P3 = 10.0;
    p.N_R = p.N_D = p.N1 = p.N2 = p.N3 = p.N4 = 1.0;
    const RatePoint th = theorem_rates(pt.scheme, p, pt.order);
    auto run_at = [&](double offset) {
      SimOptions opt;
      opt.trials = 400;
      opt.seed = 8;
      opt.workers = workers();
      opt.decoding_order = pt.order;
      opt.rate = (1.0 + offset) * th.R;
      opt.rate1 = (1.0 + offset) * th.R1;
      opt.rate2 = (1.0 + offset) * th.R2;
      return simulate(pt.scheme, p, opt).error_rate;
    };
    const double below = run_at(pt.below), above = run_at(0.2);
    const bool ok = below < pt.limit && above > 0.5;
    o.pass = o.pass && ok;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + pt.label +
                fmt(" %.3f (< %.2f) above %.3f", below, pt.limit, above) + (ok ? "" : " x");
  }
  return o;
}

// 9 ------------------------------------------------------------------------
Outcome dominance() {
  Rng rng(9);
  auto pos = [&] { return std::exp(std::log(0.05) + rng.uniform() * std::log(400.0)); };
  int violations = 0;
  for (int t = 0; t < 100; ++t) {
    ChannelParams p;
    p.topology = Topology::twrc;
    p.P1 = pos(), p.P2 = pos(), p.P_R = pos(), p.N_R = pos(), p.N1 = pos(), p.N2 = pos();
    p.h12 = 3.0 * (rng.uniform() - 0.5), p.h21 = 3.0 * (rng.uniform() - 0.5);
    const RatePoint a = twrc_region(p), c = cutset_twrc(p);
    violations += a.R1 > c.R1 + 1e-12 || a.R2 > c.R2 + 1e-12;
  }

  // Monotonicity in own power (nondecreasing) and noise (nonincreasing).
  struct Sweep {
    Topology topo;
    const char* param;
    bool up;
    std::function<double(const ChannelParams&)> f;
  };
  auto df = [](const ChannelParams& p) { return df_rate(p).R; };
  auto cf = [](const ChannelParams& p) { return cf_rate(p).R; };
  auto tr = [](const ChannelParams& p) { return df_two_relay_rate(p, 0.05).R; };
  auto tw1 = [](const ChannelParams& p) { return twrc_region(p).R1; };
  auto tw2 = [](const ChannelParams& p) { return twrc_region(p).R2; };
  auto m1 = [](const ChannelParams& p) { return marc_corner(p, 1).R1; };
  auto m2 = [](const ChannelParams& p) { return marc_corner(p, 2).R2; };
  const Sweep sweeps[] = {
      {Topology::relay, "P", true, df},       {Topology::relay, "P_R", true, df},   {Topology::relay, "N_R", false, df},
      {Topology::relay, "N_D", false, df},    {Topology::relay, "P", true, cf},     {Topology::relay, "P_R", true, cf},
      {Topology::relay, "N_R", false, cf},    {Topology::relay, "N_D", false, cf},  {Topology::two_relay, "P1", true, tr},
      {Topology::two_relay, "N2", false, tr}, {Topology::two_relay, "N4", false, tr}, {Topology::twrc, "P1", true, tw1},
      {Topology::twrc, "N_R", false, tw1},    {Topology::twrc, "N2", false, tw1},   {Topology::twrc, "P2", true, tw2},
      {Topology::twrc, "N1", false, tw2},     {Topology::marc, "P1", true, m1},     {Topology::marc, "N_D", false, m1},
      {Topology::marc, "P2", true, m2},       {Topology::marc, "N_R", false, m2},
  };
  int non_monotone = 0;
  for (const Sweep& s : sweeps) {
    ChannelParams p;
    p.topology = s.topo;
    p.P = p.P_R = p.P1 = p.P2 = p.P3 = 10.0;
    double prev = s.up ? -INFINITY : INFINITY;
    for (int i = 0; i < 10; ++i) {
      set_param(p, s.param, 0.25 + 2.0 * i);
      const double v = s.f(p);
      non_monotone += s.up ? v < prev - 1e-9 : v > prev + 1e-9;
      prev = v;
    }
  }

  double worst = 0.0;
  int below = 0;
  for (int t = 0; t < 20; ++t) {
    ChannelParams p;
    p.topology = Topology::two_relay;
    p.P1 = pos(), p.P2 = pos(), p.P3 = pos(), p.N2 = pos(), p.N3 = pos(), p.N4 = pos();
    const double opt = df_two_relay_rate(p).R, grid = df_two_relay_grid(p, 0.005);
    worst = std::max(worst, std::abs(opt - grid));
    below += opt < grid - 1e-9;
  }
  return {violations == 0 && non_monotone == 0 && worst < 1e-3 && below == 0,
          fmt("cut-set violations %.0f, non-monotone steps %.0f, optimizer gap %.2e", double(violations),
              double(non_monotone), worst) +
              fmt(" vs the 0.005 grid, %.0f of 20 below it", double(below))};
}

// 10 -----------------------------------------------------------------------
Outcome determinism() {
  const char* text = R"({"command": "simulate", "topology": "twrc", "seed": 10,
    "params": {"P1": 10, "P2": 10, "P_R": 10, "N_R": 1, "N1": 1, "N2": 1},
    "simulation": {"trials": 60, "rate_backoff": -0.2},
    "output": {"include_timing": false}})";
  RunConfig c = parse_config_text(text);
  c.sim.workers = 1;
  const std::string a = record_text(run(c));
  const std::string a2 = record_text(run(c));
  c.sim.workers = 8;
  const std::string b = record_text(run(c));
  return {a == b && a == a2, fmt("%.0f-byte records, workers 1 vs 8 ", double(a.size())) + (a == b ? "identical" : "differ")};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> check;
  };
  const Criterion criteria[] = {
      {"formula golden values", 1.0, golden_values},
      {"Poltyrev exponent continuity", 1.0, poltyrev},
      {"mod-lattice algebra", 10.0, mod_algebra},
      {"exact list size and list equivalence", 30.0, list_sizes},
      {"in-list probability", 120.0, in_list},
      {"dither uniformity", 60.0, crypto_lemma},
      {"Wyner-Ziv distortion", 120.0, wz_distortion},
      {"end-to-end error targets", 900.0, end_to_end},
      {"dominance and monotonicity", 120.0, dominance},
      {"determinism across worker counts", 60.0, determinism},
  };
  int failed = 0, index = 0;
  for (const Criterion& c : criteria) {
    ++index;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %2d %s: %s [%s; %.2fs of %.0fs]\n", index, pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                secs, c.budget_seconds);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
