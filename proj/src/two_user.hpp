// SPDX-License-Identifier: Apache-2.0
// Shared construction for the two-user schemes (TWRC, MARC).
#pragma once

#include <algorithm>
#include <array>
#include <memory>

#include "latrelay/relay_schemes.hpp"

namespace latrelay::detail {

/// Users are reordered so that role 0 ("strong") has the coarser shaping
/// lattice Λ1 and role 1 ("weak") the lattice Λ2 ⊇ Λ1.  Both chains are
/// cut from one flag family at a common scale, so every lattice involved
/// is nested in every finer one.
struct TwoUserPlan {
  bool swapped = false;  // external user 1 plays the weak role
  std::array<PlannedCode, 2> user;
  std::array<double, 2> budget{};
  int weak_offset = 0;  // level gap between Λ1 and Λ2
  Lattice finer = Lattice::integer_scaled(1, 1.0);
  int finer_level = 0;
  std::shared_ptr<const CosetSystem> sums;  // cosets of Λ1 in the finer fine lattice
  PlannedCode relay;                        // unit power, one message per coset

  int role_of(int external_user) const { return (external_user == 1) == !swapped ? 0 : 1; }
  /// Relay message of a sum point T.
  std::uint32_t index_of_sum(const Vec& T) const { return static_cast<std::uint32_t>(sums->index_of(T)); }
  Vec sum_of_index(std::uint32_t m) const { return sums->point(m); }
  const Lattice& coarse(int role) const { return user[role].book->coarse(); }
};

TwoUserPlan plan_two_users(const Planner& plan, double P1, double P2, int bits1, int bits2, std::uint64_t seed);

void report_two_users(SimReport& rep, const TwoUserPlan& tu, const Planner& plan, double rate1, double rate2);

/// The other user's codeword from a sum point T and a known codeword.
inline Vec other_from_sum(const TwoUserPlan& tu, const Vec& T, int known_role, const Vec& t_known,
                          const Vec& weak_dither) {
  const Lattice& l1 = tu.coarse(0);
  const Lattice& l2 = tu.coarse(1);
  if (known_role == 1) return recover_t1_from_T(T, t_known, -weak_dither, l1, l2);
  return recover_t2_from_T(T, t_known, l1, l2);
}

/// Sorted, duplicate-free message list of the other user implied by a list
/// of relay messages.
inline ListResult map_relay_list(const TwoUserPlan& tu, const ListResult& relay_list, int known_role,
                                 const Vec& t_known, const Vec& weak_dither) {
  const int other = 1 - known_role;
  const Codebook& book = *tu.user[other].book;
  ListResult out;
  out.alpha = relay_list.alpha;
  out.exact_size = relay_list.exact_size;
  out.messages.reserve(relay_list.messages.size());
  for (std::uint32_t m : relay_list.messages) {
    // Sums outside the other user's fine lattice match no codeword.
    const Vec t = other_from_sum(tu, tu.sum_of_index(m), known_role, t_known, weak_dither);
    if (book.fine().contains(t)) out.messages.push_back(book.message_of(t));
  }
  std::sort(out.messages.begin(), out.messages.end());
  out.messages.erase(std::unique(out.messages.begin(), out.messages.end()), out.messages.end());
  return out;
}

/// Relay message carrying the pair (known codeword, other codeword).
inline std::uint32_t relay_message_of(const TwoUserPlan& tu, int known_role, const Vec& t_known, const Vec& t_other,
                                      const Vec& weak_dither) {
  const Vec& strong = known_role == 0 ? t_known : t_other;
  const Vec& weak = known_role == 0 ? t_other : t_known;
  return tu.index_of_sum(sum_point(tu.coarse(0), tu.coarse(1), strong, weak, -weak_dither));
}

struct PairDecision {
  std::uint32_t message = 0;
  std::size_t survivors = 0;
  bool miss = false;  // the true message is absent from at least one list
};

/// Intersects the direct list of the other user's message with the relayed
/// list (over relay messages).  The shorter list is enumerated and the other
/// one only probed; an empty intersection falls back to the shorter list,
/// like decide_probes.
inline PairDecision resolve_pair(const TwoUserPlan& tu, const ListProbe& direct, const ListProbe& relayed,
                                 int known_role, const Vec& t_known, const Vec& weak_dither, std::uint32_t truth) {
  const Codebook& book = *tu.user[1 - known_role].book;
  auto relay_has = [&](std::uint32_t m) {
    return relayed.contains(relay_message_of(tu, known_role, t_known, book.point(m), weak_dither));
  };
  PairDecision d;
  d.miss = !direct.contains(truth) || !relay_has(truth);
  const bool direct_shorter = direct.exact_size() <= relayed.exact_size();
  const ListResult base = direct_shorter ? direct.materialize()
                                         : map_relay_list(tu, relayed.materialize(), known_role, t_known, weak_dither);
  bool first = true;
  for (std::uint32_t m : base.messages) {
    if (!(direct_shorter ? relay_has(m) : direct.contains(m))) continue;
    if (first) d.message = m, first = false;
    ++d.survivors;
  }
  if (first && !base.messages.empty()) d.message = base.messages.front();
  return d;
}

}  // namespace latrelay::detail
