// SPDX-License-Identifier: Apache-2.0
#include <cmath>

#include "doctest.h"
#include "latrelay/family.hpp"
#include "latrelay/nested.hpp"
#include "latrelay/sum_algebra.hpp"
#include "support.hpp"

using namespace latrelay;
using testsupport::uniform_vec;

namespace {

Vec v1(double a) {
  Vec v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("sum point by hand on (4Z, 2Z)") {
  const Lattice l1 = Lattice::integer_scaled(1, 4.0), l2 = Lattice::integer_scaled(1, 2.0);
  // Q2(-1 + 0.3) = 0, so T = (1 - 1 - 0) mod 4Z = 0.
  CHECK(sum_point(l1, l2, v1(1.0), v1(-1.0), v1(0.3)).norm() < 1e-12);
  CHECK((recover_t1_from_T(v1(3.0), v1(0.0), v1(0.0), l1, l2) - v1(-1.0)).norm() < 1e-12);
  CHECK((recover_t1_from_T(v1(1.5), v1(0.0), v1(0.0), l1, l2) - v1(1.5)).norm() < 1e-12);
}

TEST_CASE("both inversions hold for every codeword pair and 100 offsets") {
  const Codebook c1(Lattice::integer_scaled(1, 4.0), Lattice::integer_scaled(1, 1.0), 1);
  const Codebook c2(Lattice::integer_scaled(1, 2.0), Lattice::integer_scaled(1, 1.0), 2);
  const Lattice& l1 = c1.coarse();
  const Lattice& l2 = c2.coarse();
  Rng rng(3);
  int failures = 0;
  for (int k = 0; k < 100; ++k) {
    const Vec d2 = l2.sample_voronoi(rng);
    for (const Vec& t1 : c1.points())
      for (const Vec& t2 : c2.points()) {
        const Vec T = sum_point(l1, l2, t1, t2, d2);
        if ((recover_t1_from_T(T, t2, d2, l1, l2) - t1).norm() > 1e-9) ++failures;
        if ((recover_t2_from_T(T, t1, l1, l2) - t2).norm() > 1e-9) ++failures;
      }
  }
  CHECK(failures == 0);
}

TEST_CASE("inversions on an E8 chain") {
  const FlagFamily f = FlagFamily::e8();
  const Codebook c1(f.level(4, 1.0), f.level(10, 1.0), 1);
  const Codebook c2(f.level(7, 1.0), f.level(12, 1.0), 2);
  Rng rng(4);
  for (int t = 0; t < 1000; ++t) {
    const Vec t1 = c1.point(static_cast<std::uint32_t>(rng.below(c1.size())));
    const Vec t2 = c2.point(static_cast<std::uint32_t>(rng.below(c2.size())));
    const Vec d2 = c2.coarse().sample_voronoi(rng);
    const Vec T = sum_point(c1.coarse(), c2.coarse(), t1, t2, d2);
    CHECK((recover_t1_from_T(T, t2, d2, c1.coarse(), c2.coarse()) - t1).norm() < 1e-9);
    CHECK((recover_t2_from_T(T, t1, c1.coarse(), c2.coarse()) - t2).norm() < 1e-9);
  }
}

TEST_CASE("zero weak codeword and offset leave t1") {
  const Lattice l1 = Lattice::integer_scaled(2, 4.0), l2 = Lattice::integer_scaled(2, 2.0);
  Rng rng(5);
  for (int t = 0; t < 100; ++t) {
    const Vec t1 = l1.mod(uniform_vec(2, -2.0, 2.0, rng));
    const Vec T = sum_point(l1, l2, t1, Vec::Zero(2), Vec::Zero(2));
    CHECK((T - t1).norm() < 1e-12);
    CHECK((recover_t1_from_T(T, Vec::Zero(2), Vec::Zero(2), l1, l2) - T).norm() < 1e-12);
  }
}

TEST_CASE("reduction mod the coarser lattice first changes nothing") {
  const FlagFamily f = FlagFamily::e8();
  const Lattice l1 = f.level(3, 1.0), l2 = f.level(6, 1.0);
  Rng rng(6);
  for (int t = 0; t < 1000; ++t) {
    const Vec x = uniform_vec(8, -4.0, 4.0, rng);
    CHECK((l2.mod(l1.mod(x)) - l2.mod(x)).norm() < 1e-9);
  }
}

TEST_CASE("noiseless relay decodes the sum point") {
  const FlagFamily f = FlagFamily::e8();
  const Codebook c1(f.level(4, 1.0), f.level(10, 1.0), 1);
  const Codebook c2(f.level(6, 1.0), f.level(12, 1.0), 2);
  const Lattice finer = f.level(12, 1.0);
  Rng rng(7);
  for (int t = 0; t < 500; ++t) {
    const Vec t1 = c1.point(static_cast<std::uint32_t>(rng.below(c1.size())));
    const Vec t2 = c2.point(static_cast<std::uint32_t>(rng.below(c2.size())));
    const Vec u1 = c1.coarse().sample_voronoi(rng), u2 = c2.coarse().sample_voronoi(rng);
    const Vec y = c1.coarse().mod(t1 - u1) + c2.coarse().mod(t2 - u2);
    const Vec T = relay_sum_decode(c1.coarse(), c2.coarse(), finer, y, u1, u2, 1.0);
    CHECK((T - sum_point(c1.coarse(), c2.coarse(), t1, t2, -u2)).norm() < 1e-9);
  }
}

TEST_CASE("nesting is enforced") {
  const Lattice l1 = Lattice::integer_scaled(1, 2.0), l2 = Lattice::integer_scaled(1, 4.0);
  CHECK_THROWS_AS(sum_point(l1, l2, v1(0), v1(0), v1(0)), std::invalid_argument);
  CHECK_THROWS_AS(recover_t2_from_T(v1(0), v1(0), l1, l2), std::invalid_argument);
}
