// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "latrelay/sim_common.hpp"

namespace latrelay {

/// An achievable rate or an outer bound, in bits per channel use.
struct RatePoint {
  std::string bound = "achievable";  // or "cutset"
  double R = 0.0;                    // single-message schemes
  double R1 = 0.0, R2 = 0.0;         // two-message schemes
  std::vector<std::pair<std::string, double>> args;  // optimizer arguments

  double arg(const std::string& name) const;
};

// --- single relay ----------------------------------------------------------

/// The two terms of the DF max-min at a fixed split alpha.
std::pair<double, double> df_terms(double P, double P_R, double N_R, double N_D, double alpha);
/// Maximizes over alpha (grid then golden section); p.alpha pins the split.
RatePoint df_rate(const ChannelParams& p);
RatePoint relay_cutset(const ChannelParams& p);

/// CF rate; args carry "D_min", the smallest distortion the relay index can
/// carry, and "R_index", the relay-destination rate.
RatePoint cf_rate(const ChannelParams& p);
double cf_min_distortion(const ChannelParams& p);
/// Rate of the destination decoder for a given distortion D.
double cf_rate_at(const ChannelParams& p, double D);

struct WzRate {
  double lattice = 0.0;    // 0.5 log(1 + σ²/D)
  double classical = 0.0;  // [0.5 log(σ²/D)]^+
};
/// σ² = N1 + P N2/(P + N2) is the variance of X+Z1 given X+Z2.
WzRate wz_rate(double P, double N1, double N2, double D);

// --- two relays ------------------------------------------------------------

/// The three terms for permutation 0 (node 2 decodes first) or 1.
std::vector<double> two_relay_terms(const ChannelParams& p, double a1, double b1, double a2, int permutation);
/// Nested 1-D searches (outer step `grid`) with a pattern-search polish,
/// over both permutations; fixed alpha1/beta1/alpha2 in p are respected.
RatePoint df_two_relay_rate(const ChannelParams& p, double grid = 0.01);
/// Plain exhaustive grid maximum with the given step (reference oracle).
double df_two_relay_grid(const ChannelParams& p, double step);
RatePoint two_relay_cutset(const ChannelParams& p);

// --- two-way relay ---------------------------------------------------------

RatePoint twrc_region(const ChannelParams& p);
/// Full-cooperation cut-set envelope:
///   R1 <= min(C(P1/N_R + h12² P1/N2), C((|h12|√P1 + √P_R)²/N2)), R2 alike.
RatePoint cutset_twrc(const ChannelParams& p);

// --- multiple-access relay -------------------------------------------------

/// Corner for decoding order 1 (user 1 first) or 2.
RatePoint marc_corner(const ChannelParams& p, int order);
/// Time sharing: share t of the blocks use order 1.
RatePoint marc_point(const ChannelParams& p, double time_share);
std::vector<RatePoint> marc_region(const ChannelParams& p, const std::vector<double>& time_shares);
/// Cut-set envelope including the sum-rate cuts; R1/R2 hold the single-user
/// cuts and args["sum"] the sum-rate cut.
RatePoint marc_cutset(const ChannelParams& p);

// --- sweeps ----------------------------------------------------------------

/// A swept parameter: `steps` evenly spaced values from lo to hi.
struct SweepAxis {
  std::string param;
  double lo = 0.0, hi = 0.0;
  int steps = 1;

  double value(int i) const;
};

/// Assigns a named ChannelParams field; throws for unknown names.
void set_param(ChannelParams& p, const std::string& name, double value);
double get_param(const ChannelParams& p, const std::string& name);
/// Parameter names relevant to a topology, in CSV order.
std::vector<std::string> param_names(Topology t);

/// One CSV document: header plus one row per grid point (last axis fastest)
/// with the achievable point, the cut-set point and the optimizer arguments.
std::string region_sweep(const ChannelParams& base, const std::vector<SweepAxis>& axes, unsigned workers = 1);

/// 9 significant digits, shortest round-trip style ("%.9g").
std::string format_number(double v);
/// RFC-4180 quoting where needed.
std::string csv_field(const std::string& s);

}  // namespace latrelay
