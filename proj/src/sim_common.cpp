// SPDX-License-Identifier: Apache-2.0
#include "latrelay/sim_common.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace latrelay {

std::string to_string(Topology t) {
  switch (t) {
    case Topology::relay: return "relay";
    case Topology::two_relay: return "two_relay";
    case Topology::twrc: return "twrc";
    case Topology::marc: return "marc";
  }
  return "?";
}

Topology topology_from_string(const std::string& s) {
  if (s == "relay") return Topology::relay;
  if (s == "two_relay") return Topology::two_relay;
  if (s == "twrc") return Topology::twrc;
  if (s == "marc") return Topology::marc;
  throw std::invalid_argument("topology: unknown value '" + s + "'");
}

std::string to_string(RateRounding r) {
  switch (r) {
    case RateRounding::nearest: return "nearest";
    case RateRounding::down: return "down";
    case RateRounding::up: return "up";
  }
  return "?";
}

RateRounding rate_rounding_from_string(const std::string& s) {
  if (s == "nearest") return RateRounding::nearest;
  if (s == "down") return RateRounding::down;
  if (s == "up") return RateRounding::up;
  throw std::invalid_argument("rate_rounding: unknown value '" + s + "'");
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string(field) + ": " + what);
}

void require_power(double v, const char* field) { require(std::isfinite(v) && v >= 0.0, field, "must be >= 0"); }
void require_noise(double v, const char* field) { require(std::isfinite(v) && v > 0.0, field, "must be > 0"); }
void require_unit(const std::optional<double>& v, const char* field) {
  if (v) require(*v >= 0.0 && *v <= 1.0, field, "must lie in [0, 1]");
}

}  // namespace

// Powers may be zero: degenerate cases (no relay, silent node) are part of
// the reduction checks.  Noise variances must be positive.
void ChannelParams::validate() const {
  switch (topology) {
    case Topology::relay:
      require_power(P, "P");
      require_power(P_R, "P_R");
      require_noise(N_R, "N_R");
      require_noise(N_D, "N_D");
      require_unit(alpha, "alpha");
      break;
    case Topology::two_relay:
      require_power(P1, "P1");
      require_power(P2, "P2");
      require_power(P3, "P3");
      require_noise(N2, "N2");
      require_noise(N3, "N3");
      require_noise(N4, "N4");
      require_unit(alpha1, "alpha1");
      require_unit(beta1, "beta1");
      require_unit(alpha2, "alpha2");
      if (alpha1 && beta1) require(*alpha1 + *beta1 <= 1.0 + 1e-12, "beta1", "alpha1 + beta1 must be <= 1");
      require(permutation == 0 || permutation == 1, "permutation", "must be 0 or 1");
      break;
    case Topology::twrc:
      require_power(P1, "P1");
      require_power(P2, "P2");
      require_power(P_R, "P_R");
      require_noise(N_R, "N_R");
      require_noise(N1, "N1");
      require_noise(N2, "N2");
      require(std::isfinite(h12), "h12", "must be finite");
      require(std::isfinite(h21), "h21", "must be finite");
      break;
    case Topology::marc:
      require_power(P1, "P1");
      require_power(P2, "P2");
      require_power(P_R, "P_R");
      require_noise(N_R, "N_R");
      require_noise(N_D, "N_D");
      require(time_share >= 0.0 && time_share <= 1.0, "time_share", "must lie in [0, 1]");
      break;
  }
}

ChannelParams ChannelParams::with_noise_scaled(double factor) const {
  ChannelParams p = *this;
  for (double* v : {&p.N_R, &p.N_D, &p.N1, &p.N2, &p.N3, &p.N4}) *v *= factor;
  return p;
}

const StageReport& SimReport::stage(const std::string& name) const {
  for (const auto& s : stages)
    if (s.name == name) return s;
  throw std::out_of_range("no stage '" + name + "'");
}

double SimReport::diagnostic(const std::string& name) const {
  for (const auto& [k, v] : diagnostics)
    if (k == name) return v;
  throw std::out_of_range("no diagnostic '" + name + "'");
}

void Tally::add(const Tally& other) {
  for (std::size_t i = 0; i < count.size(); ++i) count[i] += other.count[i];
  for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += other.sum[i];
  for (std::size_t i = 0; i < peak.size(); ++i) peak[i] = std::max(peak[i], other.peak[i]);
}

Tally run_trials(std::uint64_t trials, unsigned workers, std::uint64_t seed, const Tally& zero,
                 const std::function<Tally(std::uint64_t, Rng&)>& trial) {
  std::vector<std::optional<Tally>> results(trials);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;

  auto work = [&] {
    for (;;) {
      const std::uint64_t i = next.fetch_add(1);
      if (i >= trials) return;
      try {
        Rng rng(tagged_seed(seed, StreamTag::trial, i));
        results[i] = trial(i, rng);
      } catch (...) {
        std::lock_guard lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };

  const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::uint64_t>(trials, 1))));
  if (w == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(w);
    for (unsigned k = 0; k < w; ++k) pool.emplace_back(work);
  }
  if (failure) std::rethrow_exception(failure);

  Tally total = zero;
  for (const auto& r : results) total.add(*r);
  return total;
}

Planner::Planner(const SimOptions& opt)
    : opt_(opt), family_(FlagFamily::by_name(opt.family, opt.n)), scale_(0.0) {
  scale_ = family_.scale_for_power(family_.shaping_offset(), 1.0);
}

int Planner::bits_for_rate(double rate) const {
  if (!(rate >= 0.0)) throw std::invalid_argument("rate: must be >= 0");
  const double bits = rate * n();
  switch (opt_.rounding) {
    case RateRounding::down: return static_cast<int>(std::floor(bits + 1e-9));
    case RateRounding::up: return static_cast<int>(std::ceil(bits - 1e-9));
    case RateRounding::nearest: break;
  }
  return static_cast<int>(std::llround(bits));
}

PlannedCode Planner::code(const std::string& role, int bits, std::uint64_t seed) const {
  return code_between(role, coarse_level(), coarse_level() + bits, seed);
}

double Planner::second_moment(int j, double scale) const {
  const double s = scale > 0.0 ? scale : scale_;
  return family_.unit_second_moment(j) * s * s;
}

PlannedCode Planner::code_between(const std::string& role, int coarse, int fine, std::uint64_t seed,
                                  double scale) const {
  if (fine < coarse) throw std::invalid_argument(role + ": fine level below coarse level");
  if (fine - coarse > 24) throw std::invalid_argument(role + ": codebook larger than 2^24 messages");
  PlannedCode c;
  c.role = role;
  c.coarse_level = coarse;
  c.fine_level = fine;
  c.scale = scale > 0.0 ? scale : scale_;
  c.power = second_moment(coarse, c.scale);
  c.book = std::make_shared<const Codebook>(level(coarse, scale), level(fine, scale), seed);
  return c;
}

int Planner::list_bits(double snr, int max_bits) const {
  if (!(snr > 0.0) || !std::isfinite(snr)) return snr > 0.0 ? max_bits : 0;
  // V/V_s = (1 + snr)^{n/2} / margin, rounded so that V_s never drops below
  // the target volume.
  const double target = 0.5 * n() * std::log2(1.0 + snr) - std::log2(opt_.list_margin);
  int bits = static_cast<int>(std::floor(target + 1e-9));
  if (opt_.list_self_similar) bits = (bits / n()) * n();
  return std::clamp(bits, 0, max_bits);
}

ListDecoder Planner::list_decoder(const PlannedCode& code, double snr) const {
  const int bits = list_bits(snr, code.fine_level - code.coarse_level);
  return ListDecoder(code.book, level(code.coarse_level + bits, code.scale));
}

ListResult list_observe(const ListDecoder& dec, double code_power, const Vec& y, double amplitude, double noise,
                        const Vec& dither) {
  if (!(amplitude > 0.0)) {
    ListResult all;
    const auto m = dec.codebook().size();
    all.exact_size = m;
    all.messages.resize(m);
    for (std::uint64_t i = 0; i < m; ++i) all.messages[i] = static_cast<std::uint32_t>(i);
    return all;
  }
  const double a = code_power / (code_power + noise / (amplitude * amplitude));
  return dec.decode(y / amplitude, dither, a);
}

ListProbe list_probe(const ListDecoder& dec, double code_power, const Vec& y, double amplitude, double noise,
                     const Vec& dither) {
  if (!(amplitude > 0.0)) return ListProbe(dec);
  const double a = code_power / (code_power + noise / (amplitude * amplitude));
  return dec.probe(y / amplitude, dither, a);
}

std::uint32_t unique_observe(const Codebook& cb, double code_power, const Vec& y, double amplitude, double noise,
                             const Vec& dither) {
  if (!(amplitude > 0.0)) return 0;
  const double a = code_power / (code_power + noise / (amplitude * amplitude));
  return unique_decode(cb, y / amplitude, dither, a);
}

Vec gaussian_vector(int n, double variance, Rng& rng) {
  Vec z(n);
  const double s = std::sqrt(variance);
  for (int i = 0; i < n; ++i) z[i] = s * rng.normal();
  return z;
}

double block_power(const Vec& x) { return x.squaredNorm() / static_cast<double>(x.size()); }

std::vector<std::uint32_t> intersect_lists(const std::vector<const ListResult*>& lists) {
  if (lists.empty()) return {};
  std::vector<std::uint32_t> acc = lists.front()->messages;
  for (std::size_t i = 1; i < lists.size(); ++i) {
    std::vector<std::uint32_t> next;
    std::set_intersection(acc.begin(), acc.end(), lists[i]->messages.begin(), lists[i]->messages.end(),
                          std::back_inserter(next));
    acc.swap(next);
  }
  return acc;
}

ListVote decide_probes(const std::vector<const ListProbe*>& lists) {
  if (lists.empty()) return {};
  const ListProbe* shortest = lists.front();
  for (const ListProbe* l : lists)
    if (l->exact_size() < shortest->exact_size()) shortest = l;
  const ListResult base = shortest->materialize();
  ListVote v;
  bool first = true;
  for (std::uint32_t m : base.messages) {
    bool all = true;
    for (const ListProbe* l : lists)
      if (l != shortest && !l->contains(m)) {
        all = false;
        break;
      }
    if (!all) continue;
    if (first) v.decision = m, first = false;
    ++v.survivors;
  }
  if (first && !base.messages.empty()) v.decision = base.messages.front();
  return v;
}

void report_code(SimReport& rep, const PlannedCode& code, const Planner& plan, double requested_rate) {
  const auto& book = *code.book;
  rep.rates.push_back({code.role, requested_rate, book.rate(), book.size()});
  rep.codebook_seeds.emplace_back(code.role, book.seed());
  const Lattice& c = book.coarse();
  rep.lattices.push_back({code.role + ".coarse", c.describe(), code.coarse_level, c.volume(), code.power});
  const Lattice& f = book.fine();
  rep.lattices.push_back({code.role + ".fine", f.describe(), code.fine_level, f.volume(),
                          plan.second_moment(code.fine_level, code.scale)});
}

}  // namespace latrelay
