// SPDX-License-Identifier: Apache-2.0
#include "two_user.hpp"

#include <stdexcept>

namespace latrelay::detail {

TwoUserPlan plan_two_users(const Planner& plan, double P1, double P2, int bits1, int bits2, std::uint64_t seed) {
  if (!(P1 > 0.0) || !(P2 > 0.0)) throw std::invalid_argument("P1, P2: two-user schemes need positive powers");
  TwoUserPlan tu;
  tu.swapped = P2 > P1;
  const double strong = tu.swapped ? P2 : P1, weak = tu.swapped ? P1 : P2;
  const int strong_bits = tu.swapped ? bits2 : bits1, weak_bits = tu.swapped ? bits1 : bits2;
  tu.budget = {strong, weak};

  const int j0 = plan.coarse_level();
  const double scale = plan.family().scale_for_power(j0, strong);
  // Smallest gap whose second moment fits the weak budget; the weak user
  // may then run slightly below its budget.
  int d = 0;
  while (plan.second_moment(j0 + d, scale) > weak * (1.0 + 1e-9)) ++d;
  tu.weak_offset = d;

  const std::uint64_t seed_strong = tagged_seed(seed, StreamTag::codebook, tu.swapped ? 2 : 1);
  const std::uint64_t seed_weak = tagged_seed(seed, StreamTag::codebook, tu.swapped ? 1 : 2);
  tu.user[0] = plan.code_between(tu.swapped ? "user2" : "user1", j0, j0 + strong_bits, seed_strong, scale);
  tu.user[1] = plan.code_between(tu.swapped ? "user1" : "user2", j0 + d, j0 + d + weak_bits, seed_weak, scale);

  // T lives on the finer of the two fine lattices; equal levels are the
  // same lattice, and the strong user's is taken.
  tu.finer_level = std::max(j0 + strong_bits, j0 + d + weak_bits);
  tu.finer = plan.level(tu.finer_level, scale);
  tu.sums = std::make_shared<const CosetSystem>(tu.user[0].book->coarse(), tu.finer);
  tu.relay = plan.code("relay", tu.finer_level - j0, tagged_seed(seed, StreamTag::codebook, 3));
  if (tu.relay.book->size() != tu.sums->count()) throw std::logic_error("relay codebook size mismatch");
  return tu;
}

void report_two_users(SimReport& rep, const TwoUserPlan& tu, const Planner& plan, double rate1, double rate2) {
  const int r1 = tu.role_of(1), r2 = tu.role_of(2);
  report_code(rep, tu.user[r1], plan, rate1);
  report_code(rep, tu.user[r2], plan, rate2);
  report_code(rep, tu.relay, plan, std::max(tu.user[0].book->rate(), tu.user[1].book->rate()));
  rep.lattices.push_back({"sum.finer", tu.finer.describe(), tu.finer_level, tu.finer.volume(),
                          plan.second_moment(tu.finer_level, tu.user[0].scale)});
  rep.diagnostics.emplace_back("weak_level_offset", double(tu.weak_offset));
  rep.diagnostics.emplace_back("strong_user", tu.swapped ? 2.0 : 1.0);
}

}  // namespace latrelay::detail
