// SPDX-License-Identifier: Apache-2.0
#include "latrelay/rate_regions.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace latrelay {
namespace {

double C(double x) { return 0.5 * std::log2(1.0 + std::max(x, 0.0)); }
// [0.5 log2(x)]^+
double half_log_plus(double x) { return x > 1.0 ? 0.5 * std::log2(x) : 0.0; }
double sq(double x) { return x * x; }
double root(double x) { return std::sqrt(std::max(x, 0.0)); }

struct Best {
  double x = 0.0;
  double value = -1.0;
};

// Grid with `cells` intervals followed by golden section on the bracket
// around the best grid point.  Assumes f is unimodal on the bracket.
Best maximize_1d(const std::function<double(double)>& f, double lo, double hi, int cells = 1000) {
  Best best;
  int best_i = 0;
  for (int i = 0; i <= cells; ++i) {
    const double x = lo + (hi - lo) * i / cells;
    const double v = f(x);
    if (v > best.value) best = {x, v}, best_i = i;
  }
  double a = lo + (hi - lo) * std::max(best_i - 1, 0) / cells;
  double b = lo + (hi - lo) * std::min(best_i + 1, cells) / cells;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-10) {
    if (fc >= fd) {
      b = d, d = c, fd = fc;
      c = b - g * (b - a), fc = f(c);
    } else {
      a = c, c = d, fc = fd;
      d = a + g * (b - a), fd = f(d);
    }
  }
  for (double x : {a, b, 0.5 * (a + b)}) {
    const double v = f(x);
    if (v > best.value) best = {x, v};
  }
  return best;
}

}  // namespace

double RatePoint::arg(const std::string& name) const {
  for (const auto& [k, v] : args)
    if (k == name) return v;
  throw std::out_of_range("no optimizer argument '" + name + "'");
}

std::pair<double, double> df_terms(double P, double P_R, double N_R, double N_D, double alpha) {
  const double bar = 1.0 - alpha;
  return {C(alpha * P / N_R), C((P + P_R + 2.0 * root(bar * P * P_R)) / N_D)};
}

RatePoint df_rate(const ChannelParams& p) {
  auto f = [&](double a) {
    const auto [r, d] = df_terms(p.P, p.P_R, p.N_R, p.N_D, a);
    return std::min(r, d);
  };
  RatePoint out;
  const Best b = p.alpha ? Best{*p.alpha, f(*p.alpha)} : maximize_1d(f, 0.0, 1.0);
  out.R = b.value;
  out.args = {{"alpha", b.x}};
  return out;
}

RatePoint relay_cutset(const ChannelParams& p) {
  auto f = [&](double rho) {
    const double bc = C((1.0 - rho * rho) * p.P * (1.0 / p.N_R + 1.0 / p.N_D));
    const double mac = C((p.P + p.P_R + 2.0 * rho * root(p.P * p.P_R)) / p.N_D);
    return std::min(bc, mac);
  };
  const Best b = maximize_1d(f, 0.0, 1.0);
  RatePoint out;
  out.bound = "cutset";
  out.R = b.value;
  out.args = {{"rho", b.x}};
  return out;
}

double cf_min_distortion(const ChannelParams& p) {
  const double cond = p.N_R + p.P * p.N_D / (p.P + p.N_D);
  if (!(p.P_R > 0.0)) return INFINITY;
  return cond * (p.P + p.N_D) / p.P_R;
}

double cf_rate_at(const ChannelParams& p, double D) {
  const double relay = std::isfinite(D) ? p.P / (p.N_R + D) : 0.0;
  return C(p.P / p.N_D + relay);
}

RatePoint cf_rate(const ChannelParams& p) {
  RatePoint out;
  out.R = C(p.P / p.N_D + p.P * p.P_R / (p.P * p.N_R + p.P * p.N_D + p.P_R * p.N_R + p.N_R * p.N_D));
  out.args = {{"D_min", cf_min_distortion(p)}, {"R_index", C(p.P_R / (p.P + p.N_D))}};
  return out;
}

WzRate wz_rate(double P, double N1, double N2, double D) {
  if (!(P > 0.0) || !(N1 > 0.0) || !(N2 > 0.0) || !(D > 0.0)) throw std::invalid_argument("wz_rate: arguments must be positive");
  const double cond = std::isfinite(N2) ? N1 + P * N2 / (P + N2) : N1 + P;
  return {C(cond / D), half_log_plus(cond / D)};
}

namespace {
std::array<double, 3> relay_terms(const ChannelParams& p, double a1, double b1, double a2, int permutation) {
  const double Pa = permutation == 0 ? p.P2 : p.P3;  // first relay in the order
  const double Pb = permutation == 0 ? p.P3 : p.P2;
  const double Na = permutation == 0 ? p.N2 : p.N3;
  const double Nb = permutation == 0 ? p.N3 : p.N2;
  const double g = std::max(1.0 - a1 - b1, 0.0);
  const double fresh = a1 * p.P1;
  const double second = sq(root(b1 * p.P1) + root(a2 * Pa));
  const double third = sq(root(g * p.P1) + root((1.0 - a2) * Pa) + root(Pb));
  return {C(fresh / Na), C((fresh + second) / Nb), C((fresh + second + third) / p.N4)};
}
}  // namespace

std::vector<double> two_relay_terms(const ChannelParams& p, double a1, double b1, double a2, int permutation) {
  const auto t = relay_terms(p, a1, b1, a2, permutation);
  return {t.begin(), t.end()};
}

namespace {
double two_relay_min(const ChannelParams& p, double a1, double b1, double a2, int perm) {
  const auto t = relay_terms(p, a1, b1, a2, perm);
  return std::min({t[0], t[1], t[2]});
}

struct TwoRelayBest {
  double value = -1.0;
  double a1 = 0, b1 = 0, a2 = 0;
  int perm = 0;
};

TwoRelayBest two_relay_grid_search(const ChannelParams& p, double step, int only = -1) {
  TwoRelayBest best;
  const int cells = static_cast<int>(std::llround(1.0 / step));
  auto axis = [&](const std::optional<double>& fixed, int i) { return fixed ? *fixed : double(i) / cells; };
  const int na1 = p.alpha1 ? 0 : cells, nb1 = p.beta1 ? 0 : cells, na2 = p.alpha2 ? 0 : cells;
  for (int perm = 0; perm < 2; ++perm)
    for (int i = 0; i <= na1 && (only < 0 || only == perm); ++i) {
      const double a1 = axis(p.alpha1, i);
      // The first term depends on alpha1 alone and bounds the min, so rows
      // that cannot beat the incumbent are skipped; the result is unchanged.
      if (relay_terms(p, a1, 0.0, 0.0, perm)[0] <= best.value) continue;
      for (int j = 0; j <= nb1; ++j) {
        const double b1 = axis(p.beta1, j);
        if (a1 + b1 > 1.0 + 1e-12) break;
        for (int k = 0; k <= na2; ++k) {
          const double a2 = axis(p.alpha2, k);
          const double v = two_relay_min(p, a1, b1, a2, perm);
          if (v > best.value) best = {v, a1, b1, a2, perm};
        }
      }
    }
  return best;
}

}  // namespace

double df_two_relay_grid(const ChannelParams& p, double step) { return two_relay_grid_search(p, step).value; }

RatePoint df_two_relay_rate(const ChannelParams& p, double grid) {
  // Nested 1-D searches (α2 innermost, then β1 on [0, 1 - α1], then α1),
  // each a grid plus golden section, follow the curved ridges where two
  // terms of the min meet.  A pattern search over all 26 neighbour
  // directions then polishes the result.
  const int outer_cells = std::max(4, static_cast<int>(std::llround(1.0 / grid)));
  constexpr int kInnerCells = 40;
  auto feasible = [](double a1, double b1, double a2) {
    return a1 >= 0.0 && b1 >= 0.0 && a2 >= 0.0 && a2 <= 1.0 && a1 + b1 <= 1.0 + 1e-12;
  };
  const std::array<bool, 3> free{!p.alpha1, !p.beta1, !p.alpha2};
  TwoRelayBest best;
  for (int perm = 0; perm < 2; ++perm) {
    auto best_a2 = [&](double a1, double b1) {
      if (p.alpha2) return Best{*p.alpha2, two_relay_min(p, a1, b1, *p.alpha2, perm)};
      return maximize_1d([&](double a2) { return two_relay_min(p, a1, b1, a2, perm); }, 0.0, 1.0, kInnerCells);
    };
    auto best_b1 = [&](double a1) {
      if (p.beta1) return Best{*p.beta1, best_a2(a1, *p.beta1).value};
      return maximize_1d([&](double b1) { return best_a2(a1, b1).value; }, 0.0, std::max(0.0, 1.0 - a1),
                         kInnerCells);
    };
    const Best ba1 = p.alpha1 ? Best{*p.alpha1, best_b1(*p.alpha1).value}
                              : maximize_1d([&](double a1) { return best_b1(a1).value; }, 0.0, 1.0, outer_cells);
    const double b1 = best_b1(ba1.x).x;
    const double a2 = best_a2(ba1.x, b1).x;
    TwoRelayBest cur{two_relay_min(p, ba1.x, b1, a2, perm), ba1.x, b1, a2, perm};

    for (double h = 1.0 / outer_cells; h > 1e-9;) {
      bool moved = false;
      for (int d = 0; d < 27; ++d) {
        const std::array<int, 3> dir{d % 3 - 1, d / 3 % 3 - 1, d / 9 - 1};
        if (dir == std::array<int, 3>{0, 0, 0}) continue;
        if ((dir[0] && !free[0]) || (dir[1] && !free[1]) || (dir[2] && !free[2])) continue;
        const double x = cur.a1 + h * dir[0], y = cur.b1 + h * dir[1], z = cur.a2 + h * dir[2];
        if (!feasible(x, y, z)) continue;
        const double v = two_relay_min(p, x, y, z, perm);
        if (v > cur.value + 1e-15) cur = {v, x, y, z, perm}, moved = true;
      }
      if (!moved) h *= 0.5;
    }
    if (cur.value > best.value) best = cur;
  }
  RatePoint out;
  out.R = best.value;
  out.args = {{"alpha1", best.a1}, {"beta1", best.b1}, {"alpha2", best.a2}, {"permutation", double(best.perm)}};
  return out;
}

RatePoint two_relay_cutset(const ChannelParams& p) {
  const double s1 = root(p.P1), s2 = root(p.P2), s3 = root(p.P3);
  RatePoint out;
  out.bound = "cutset";
  out.R = std::min({C(p.P1 * (1.0 / p.N2 + 1.0 / p.N3 + 1.0 / p.N4)), C(sq(s1 + s2) * (1.0 / p.N3 + 1.0 / p.N4)),
                    C(sq(s1 + s3) * (1.0 / p.N2 + 1.0 / p.N4)), C(sq(s1 + s2 + s3) / p.N4)});
  return out;
}

RatePoint twrc_region(const ChannelParams& p) {
  RatePoint out;
  const double sum = p.P1 + p.P2;
  const double s1 = sum > 0.0 ? p.P1 / sum : 0.0, s2 = sum > 0.0 ? p.P2 / sum : 0.0;
  out.R1 = std::min(half_log_plus(s1 + p.P1 / p.N_R), C((p.h12 * p.h12 * p.P1 + p.P_R) / p.N2));
  out.R2 = std::min(half_log_plus(s2 + p.P2 / p.N_R), C((p.h21 * p.h21 * p.P2 + p.P_R) / p.N1));
  return out;
}

RatePoint cutset_twrc(const ChannelParams& p) {
  RatePoint out;
  out.bound = "cutset";
  out.R1 = std::min(C(p.P1 / p.N_R + p.h12 * p.h12 * p.P1 / p.N2), C(sq(std::abs(p.h12) * root(p.P1) + root(p.P_R)) / p.N2));
  out.R2 = std::min(C(p.P2 / p.N_R + p.h21 * p.h21 * p.P2 / p.N1), C(sq(std::abs(p.h21) * root(p.P2) + root(p.P_R)) / p.N1));
  return out;
}

RatePoint marc_corner(const ChannelParams& p, int order) {
  if (order != 1 && order != 2) throw std::invalid_argument("decoding_order: must be 1 or 2");
  const double sum = p.P1 + p.P2;
  const double relay1 = half_log_plus((sum > 0.0 ? p.P1 / sum : 0.0) + p.P1 / p.N_R);
  const double relay2 = half_log_plus((sum > 0.0 ? p.P2 / sum : 0.0) + p.P2 / p.N_R);
  RatePoint out;
  if (order == 1) {
    out.R1 = std::min(relay1, C(p.P1 / (p.P2 + p.P_R + p.N_D)));
    out.R2 = std::min(relay2, C((p.P2 + p.P_R) / p.N_D));
  } else {
    out.R1 = std::min(relay1, C((p.P1 + p.P_R) / p.N_D));
    out.R2 = std::min(relay2, C(p.P2 / (p.P1 + p.P_R + p.N_D)));
  }
  out.args = {{"order", double(order)}};
  return out;
}

RatePoint marc_point(const ChannelParams& p, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("time_share: must lie in [0, 1]");
  const RatePoint a = marc_corner(p, 1), b = marc_corner(p, 2);
  RatePoint out;
  out.R1 = t * a.R1 + (1.0 - t) * b.R1;
  out.R2 = t * a.R2 + (1.0 - t) * b.R2;
  out.args = {{"time_share", t}};
  return out;
}

std::vector<RatePoint> marc_region(const ChannelParams& p, const std::vector<double>& time_shares) {
  std::vector<RatePoint> out;
  out.reserve(time_shares.size());
  for (double t : time_shares) out.push_back(marc_point(p, t));
  return out;
}

RatePoint marc_cutset(const ChannelParams& p) {
  const double s1 = root(p.P1), s2 = root(p.P2), sr = root(p.P_R);
  const double both = 1.0 / p.N_R + 1.0 / p.N_D;
  RatePoint out;
  out.bound = "cutset";
  out.R1 = std::min(C(p.P1 * both), C(sq(s1 + sr) / p.N_D));
  out.R2 = std::min(C(p.P2 * both), C(sq(s2 + sr) / p.N_D));
  out.args = {{"sum", std::min(C(sq(s1 + s2) * both), C(sq(s1 + s2 + sr) / p.N_D))}};
  return out;
}

double SweepAxis::value(int i) const { return steps <= 1 ? lo : lo + (hi - lo) * i / (steps - 1); }

namespace {

struct Field {
  const char* name;
  double ChannelParams::*member;
};

constexpr std::array<Field, 14> kFields{{
    {"P", &ChannelParams::P},     {"P_R", &ChannelParams::P_R}, {"N_R", &ChannelParams::N_R},
    {"N_D", &ChannelParams::N_D}, {"P1", &ChannelParams::P1},   {"P2", &ChannelParams::P2},
    {"P3", &ChannelParams::P3},   {"N1", &ChannelParams::N1},   {"N2", &ChannelParams::N2},
    {"N3", &ChannelParams::N3},   {"N4", &ChannelParams::N4},   {"h12", &ChannelParams::h12},
    {"h21", &ChannelParams::h21}, {"time_share", &ChannelParams::time_share},
}};

}  // namespace

void set_param(ChannelParams& p, const std::string& name, double value) {
  for (const auto& f : kFields)
    if (name == f.name) {
      p.*f.member = value;
      return;
    }
  if (name == "alpha") p.alpha = value;
  else if (name == "alpha1") p.alpha1 = value;
  else if (name == "beta1") p.beta1 = value;
  else if (name == "alpha2") p.alpha2 = value;
  else throw std::invalid_argument("unknown parameter '" + name + "'");
}

double get_param(const ChannelParams& p, const std::string& name) {
  for (const auto& f : kFields)
    if (name == f.name) return p.*f.member;
  auto opt = [&](const std::optional<double>& v) { return v ? *v : NAN; };
  if (name == "alpha") return opt(p.alpha);
  if (name == "alpha1") return opt(p.alpha1);
  if (name == "beta1") return opt(p.beta1);
  if (name == "alpha2") return opt(p.alpha2);
  throw std::invalid_argument("unknown parameter '" + name + "'");
}

std::vector<std::string> param_names(Topology t) {
  switch (t) {
    case Topology::relay: return {"P", "P_R", "N_R", "N_D"};
    case Topology::two_relay: return {"P1", "P2", "P3", "N2", "N3", "N4"};
    case Topology::twrc: return {"P1", "P2", "P_R", "N_R", "N1", "N2", "h12", "h21"};
    case Topology::marc: return {"P1", "P2", "P_R", "N_R", "N_D", "time_share"};
  }
  return {};
}

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

namespace {

std::vector<std::string> result_columns(Topology t) {
  switch (t) {
    case Topology::relay: return {"df_R", "cf_R", "cutset_R", "alpha", "D_min"};
    case Topology::two_relay: return {"R", "cutset_R", "alpha1", "beta1", "alpha2", "permutation"};
    case Topology::twrc: return {"R1", "R2", "cutset_R1", "cutset_R2"};
    case Topology::marc: return {"R1", "R2", "cutset_R1", "cutset_R2", "cutset_sum"};
  }
  return {};
}

std::vector<double> evaluate_row(const ChannelParams& p) {
  switch (p.topology) {
    case Topology::relay: {
      const RatePoint df = df_rate(p), cf = cf_rate(p);
      return {df.R, cf.R, relay_cutset(p).R, df.arg("alpha"), cf.arg("D_min")};
    }
    case Topology::two_relay: {
      const RatePoint r = df_two_relay_rate(p);
      return {r.R, two_relay_cutset(p).R, r.arg("alpha1"), r.arg("beta1"), r.arg("alpha2"), r.arg("permutation")};
    }
    case Topology::twrc: {
      const RatePoint r = twrc_region(p), c = cutset_twrc(p);
      return {r.R1, r.R2, c.R1, c.R2};
    }
    case Topology::marc: {
      const RatePoint r = marc_point(p, p.time_share), c = marc_cutset(p);
      return {r.R1, r.R2, c.R1, c.R2, c.arg("sum")};
    }
  }
  return {};
}

}  // namespace

std::string region_sweep(const ChannelParams& base, const std::vector<SweepAxis>& axes, unsigned workers) {
  std::size_t rows = 1;
  for (const auto& a : axes) {
    if (a.steps < 1) throw std::invalid_argument("sweep axis '" + a.param + "': empty range");
    get_param(base, a.param);  // validates the name
    rows *= static_cast<std::size_t>(a.steps);
  }
  std::vector<ChannelParams> points(rows, base);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = r;
    for (std::size_t k = axes.size(); k-- > 0;) {
      const auto steps = static_cast<std::size_t>(axes[k].steps);
      set_param(points[r], axes[k].param, axes[k].value(static_cast<int>(rest % steps)));
      rest /= steps;
    }
    points[r].validate();
  }

  std::vector<std::vector<double>> values(rows);
  {
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < rows;) values[i] = evaluate_row(points[i]);
    };
    const unsigned w = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows)));
    std::vector<std::jthread> pool;
    for (unsigned k = 1; k < w; ++k) pool.emplace_back(work);
    work();
  }

  std::ostringstream out;
  const auto params = param_names(base.topology);
  const auto cols = result_columns(base.topology);
  out << "topology";
  for (const auto& n : params) out << ',' << csv_field(n);
  for (const auto& c : cols) out << ',' << csv_field(c);
  out << "\r\n";
  for (std::size_t r = 0; r < rows; ++r) {
    out << csv_field(to_string(base.topology));
    for (const auto& n : params) out << ',' << format_number(get_param(points[r], n));
    for (double v : values[r]) out << ',' << format_number(v);
    out << "\r\n";
  }
  return out.str();
}

}  // namespace latrelay
