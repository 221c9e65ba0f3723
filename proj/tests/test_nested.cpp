// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "latrelay/family.hpp"
#include "latrelay/nested.hpp"
#include "support.hpp"

using namespace latrelay;
using testsupport::uniform_vec;

namespace {

std::vector<double> sorted_points(const Codebook& cb) {
  std::vector<double> out;
  for (const Vec& p : cb.points()) out.push_back(p(0));
  std::sort(out.begin(), out.end());
  return out;
}

// Fine points inside y + V(coarse), counted by scanning a box of fine grid
// coefficients (independent of the coset system).
std::size_t count_in_shifted_cell(const Lattice& coarse, const Lattice& fine, const Vec& y, int reach) {
  const int n = fine.dim();
  const Eigen::MatrixXd& g = fine.generator();
  const Vec k0 = g.fullPivLu().solve(y);
  std::vector<int> off(static_cast<std::size_t>(n), -reach);
  std::size_t count = 0;
  for (;;) {
    Vec k(n);
    for (int i = 0; i < n; ++i) k(i) = std::round(k0(i)) + off[static_cast<std::size_t>(i)];
    const Vec p = g * k;
    if (coarse.nearest_point(p - y).norm() == 0.0) ++count;
    int i = 0;
    while (i < n && ++off[static_cast<std::size_t>(i)] > reach) off[static_cast<std::size_t>(i++)] = -reach;
    if (i == n) break;
  }
  return count;
}

}  // namespace

TEST_CASE("build_chain examples") {
  const NestedChain one = build_chain(Lattice::integer_scaled(1, 4.0), {4});
  CHECK(one.size() == 2);
  CHECK(one.index(0, 1) == 4);
  CHECK(one.rate(0, 1) == doctest::Approx(2.0));

  const NestedChain three = build_chain(Lattice::integer_scaled(1, 4.0), {2, 2});
  CHECK(three.level(0).volume() == doctest::Approx(4.0));
  CHECK(three.level(1).volume() == doctest::Approx(2.0));
  CHECK(three.level(2).volume() == doctest::Approx(1.0));
  CHECK(three.nesting_factors() == std::vector<std::uint64_t>{2, 2});

  const NestedChain plane = build_chain(Lattice::integer_scaled(2, 2.0), {2});
  CHECK(plane.index(0, 1) == 4);
  CHECK(plane.rate(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("build_chain errors") {
  CHECK_THROWS_AS(build_chain(Lattice::integer_scaled(1, 1.0), {0}), std::invalid_argument);
  CHECK_THROWS_AS(build_chain(Lattice::integer_scaled(1, 1.0), {}), std::invalid_argument);
  // A non-integer subgroup index is a nesting violation.
  CHECK_THROWS_AS(NestedChain({Lattice::integer_scaled(1, 1.0), Lattice::integer_scaled(1, 0.4)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(subgroup_index(Lattice::integer_scaled(1, 1.0), Lattice::integer_scaled(1, 2.0)),
                  std::invalid_argument);
}

TEST_CASE("codebook (4Z, Z) enumerates the half-open cell") {
  const Codebook cb(Lattice::integer_scaled(1, 4.0), Lattice::integer_scaled(1, 1.0), 1);
  CHECK(cb.size() == 4);
  CHECK(cb.rate() == doctest::Approx(2.0));
  // Ties go to the smaller grid coordinate, so V(4Z) = (-2, 2].
  CHECK(sorted_points(cb) == std::vector<double>{-1.0, 0.0, 1.0, 2.0});
}

TEST_CASE("codebook degenerate and planar counts") {
  const Codebook same(Lattice::integer_scaled(2, 1.0), Lattice::integer_scaled(2, 1.0), 1);
  CHECK(same.size() == 1);
  CHECK(same.rate() == 0.0);
  CHECK(same.point(0).norm() == 0.0);
  const Codebook plane(Lattice::integer_scaled(2, 2.0), Lattice::integer_scaled(2, 1.0), 1);
  CHECK(plane.size() == 4);
  CHECK(plane.rate() == doctest::Approx(1.0));
}

TEST_CASE("enumerate_codebook over a chain and the cap") {
  const NestedChain chain = build_chain(Lattice::integer_scaled(1, 16.0), {2, 2, 2, 2});
  const Codebook cb = enumerate_codebook(chain, 0, 4, 3);
  CHECK(cb.size() == 16);
  CHECK_THROWS_AS(enumerate_codebook(chain, 0, 4, 3, 8), std::length_error);
  CHECK_THROWS_AS(enumerate_codebook(chain, 3, 1, 3), std::invalid_argument);
}

TEST_CASE("message map is a seeded bijection") {
  const FlagFamily f = FlagFamily::e8();
  const Codebook a(f.level(4, 1.0), f.level(12, 1.0), 7);
  const Codebook b(f.level(4, 1.0), f.level(12, 1.0), 8);
  const Codebook a2(f.level(4, 1.0), f.level(12, 1.0), 7);
  CHECK(a.size() == 256);
  std::set<std::uint64_t> cosets;
  int differ = 0;
  for (std::uint32_t m = 0; m < a.size(); ++m) {
    const Vec t = a.point(m);
    CHECK(a.message_of(t) == m);
    CHECK(a.coarse().in_voronoi(t));
    CHECK(a.fine().contains(t));
    cosets.insert(a.coset_of_message(m));
    CHECK(a2.coset_of_message(m) == a.coset_of_message(m));
    if (b.coset_of_message(m) != a.coset_of_message(m)) ++differ;
  }
  CHECK(cosets.size() == a.size());
  CHECK(differ > 200);
  CHECK_THROWS_AS(a.point(256), std::out_of_range);
}

TEST_CASE("encode round trip and power") {
  const Codebook cb(Lattice::integer_scaled(1, 4.0), Lattice::integer_scaled(1, 1.0), 2);
  Rng rng(4);
  for (std::uint32_t w = 0; w < cb.size(); ++w)
    CHECK((cb.encode(w, Vec::Zero(1)) - cb.point(w)).norm() == 0.0);
  double power = 0.0;
  const int N = 10000;
  for (int i = 0; i < N; ++i) {
    const auto w = static_cast<std::uint32_t>(rng.below(cb.size()));
    const Vec u = cb.coarse().sample_voronoi(rng);
    const Vec x = encode(cb, w, u);
    CHECK(cb.coarse().in_voronoi(x));
    CHECK((cb.coarse().mod(x + u) - cb.point(w)).norm() < 1e-12);
    power += x.squaredNorm();
  }
  CHECK(power / N == doctest::Approx(16.0 / 12.0).epsilon(0.05));
}

TEST_CASE("encoding is uniform over the cell for a fixed message") {
  const FlagFamily f = FlagFamily::cubic(2);
  const Codebook cb(f.level(0, 3.0), f.level(3, 3.0), 5);
  Rng rng(12);
  std::vector<long> counts(25, 0);
  for (int i = 0; i < 50000; ++i) {
    const Vec x = cb.encode(2, cb.coarse().sample_voronoi(rng));
    ++counts[testsupport::cell_bin(cb.coarse(), x, 5)];
  }
  CHECK(testsupport::chi2_statistic(counts) < testsupport::chi2_critical(24, 0.01));
}

TEST_CASE("chain levels are mutually nested") {
  const FlagFamily f = FlagFamily::e8();
  std::vector<Lattice> levels;
  for (int j = 0; j <= 12; j += 3) levels.push_back(f.level(j, 2.0));
  const NestedChain chain(levels);
  Rng rng(1);
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t j = i + 1; j < chain.size(); ++j)
      for (int t = 0; t < 100; ++t) {
        Vec k(8);
        for (int c = 0; c < 8; ++c) k(c) = double(static_cast<int>(rng.below(11)) - 5);
        const Vec lambda = chain.level(i).generator() * k;
        CHECK(chain.level(j).mod(lambda).norm() < 1e-9);
      }
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) CHECK(chain.level(i).volume() > chain.level(i + 1).volume());
}

TEST_CASE("rates telescope") {
  const FlagFamily f = FlagFamily::e8();
  std::vector<Lattice> levels;
  for (int j : {0, 2, 5, 9, 12}) levels.push_back(f.level(j, 1.0));
  const NestedChain chain(levels);
  for (std::size_t i = 0; i < chain.size(); ++i)
    for (std::size_t k = i; k < chain.size(); ++k)
      for (std::size_t c = k; c < chain.size(); ++c)
        CHECK(chain.rate(i, c) == doctest::Approx(chain.rate(i, k) + chain.rate(k, c)).epsilon(1e-12));
  CHECK(chain.index(0, 4) == 4096);
}

TEST_CASE("every shifted coarse cell holds exactly the volume ratio of fine points") {
  Rng rng(13);
  struct Pair {
    Lattice coarse, fine;
    int reach;
  };
  const FlagFamily cubic = FlagFamily::cubic(2);
  const std::vector<Pair> pairs = {
      {Lattice::integer_scaled(1, 4.0), Lattice::integer_scaled(1, 1.0), 4},
      {Lattice::integer_scaled(2, 2.0), Lattice::integer_scaled(2, 1.0), 3},
      {cubic.level(0, 1.0), cubic.level(3, 1.0), 5},
      {Lattice::construction_a(3, {{1, 2}}, 2, 3.0), Lattice::construction_a(3, {{1, 2}}, 2, 1.0), 8},
  };
  for (const Pair& p : pairs) {
    const std::uint64_t ratio = subgroup_index(p.coarse, p.fine);
    CHECK(double(ratio) == doctest::Approx(p.coarse.volume() / p.fine.volume()));
    for (int t = 0; t < 100; ++t) {
      const Vec y = uniform_vec(p.fine.dim(), -7.0, 7.0, rng);
      CHECK(count_in_shifted_cell(p.coarse, p.fine, y, p.reach) == ratio);
    }
  }
}

TEST_CASE("coset indices are canonical") {
  const FlagFamily f = FlagFamily::e8();
  const CosetSystem cs(f.level(2, 1.0), f.level(7, 1.0));
  CHECK(cs.count() == 32);
  Rng rng(2);
  for (std::uint64_t i = 0; i < cs.count(); ++i) {
    const Vec p = cs.point(i);
    CHECK(cs.index_of(p) == i);
    Vec k(8);
    for (int c = 0; c < 8; ++c) k(c) = double(static_cast<int>(rng.below(7)) - 3);
    CHECK(cs.index_of(p + f.level(2, 1.0).generator() * k) == i);
  }
}
