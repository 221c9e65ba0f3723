// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "latrelay/sim_common.hpp"
#include "latrelay/sum_algebra.hpp"
#include "latrelay/wyner_ziv.hpp"

namespace latrelay {

// Block-Markov simulations.  Every codebook has unit power; transmitters
// scale by amplitudes √(share · budget) and receivers normalize by the total
// amplitude of the stream they decode.  Rates come from SimOptions
// (bits per dimension, rounded per SimOptions::rounding).

/// Single relay, decode-and-forward.  Stages: "relay",
/// "list_relay_destination", "list_source_destination", "destination".
SimReport simulate_df_relay(const ChannelParams& p, const SimOptions& opt);

/// Two relays, decode-and-forward.  The relay decoding first under the
/// permutation is "first_relay", the other "second_relay"; the destination
/// intersects three lists.  Stages: "first_relay", "second_relay", one
/// "list_destination_*" entry per list, "destination".
SimReport simulate_df_two_relay(const ChannelParams& p, const SimOptions& opt);

/// Two-way relay with direct links.  Stages: "relay" (sum decoding),
/// "terminal1" (decodes w2), "terminal2" (decodes w1), each followed by its
/// "*_relayed_list" entry.
SimReport simulate_twrc(const ChannelParams& p, const SimOptions& opt);

/// Multiple-access relay under SimOptions::decoding_order.  Stages:
/// "relay", "user1", "user2" and the relayed list of the user resolved second.
SimReport simulate_marc(const ChannelParams& p, const SimOptions& opt);

/// Compress-and-forward with lattice Wyner-Ziv at the relay.  Stages:
/// "index" (relay index at the destination), "destination".
SimReport simulate_cf(const ChannelParams& p, const SimOptions& opt);

/// Dispatch on topology plus scheme name ("df" or "cf" for relay).
SimReport simulate(const std::string& scheme, const ChannelParams& p, const SimOptions& opt);

}  // namespace latrelay
