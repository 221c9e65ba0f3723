// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "latrelay/family.hpp"
#include "latrelay/lattice.hpp"
#include "support.hpp"

using namespace latrelay;
using testsupport::brute_nearest;
using testsupport::uniform_vec;

namespace {

Vec v2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

Lattice ternary_plane() { return Lattice::construction_a(3, {{1, 2}}, 2, 1.0); }

std::vector<Lattice> small_lattices() {
  return {Lattice::integer_scaled(1, 1.0),
          Lattice::integer_scaled(3, 0.7),
          Lattice::diagonal({0.5, 2.0}),
          Lattice::diagonal({1.0, 0.3, 2.5, 1.1}),
          ternary_plane(),
          Lattice::construction_a(2, {{1, 1, 1, 1}}, 4, 1.0),  // D4-like
          Lattice::construction_a(5, {{1, 2, 3}}, 3, 2.0),
          Lattice::construction_a(3, {{1, 0, 2, 1}, {0, 1, 1, 2}}, 4, 1.5)};
}

}  // namespace

TEST_CASE("nearest point on Z^2 rounds each coordinate") {
  const Lattice z2 = Lattice::integer_scaled(2, 1.0);
  CHECK((z2.nearest_point(v2(0.6, -1.2)) - v2(1.0, -1.0)).norm() < 1e-12);
  CHECK(z2.nearest_point(v2(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("origin maps to origin for every kind") {
  for (const Lattice& l : small_lattices()) CHECK(l.nearest_point(Vec::Zero(l.dim())).norm() == 0.0);
}

TEST_CASE("ternary construction-A point matches brute force") {
  const Lattice l = ternary_plane();
  const Vec x = v2(0.9, 2.1);
  const Vec q = l.nearest_point(x);
  const Vec b = brute_nearest(l, x, 4);
  CHECK((x - q).norm() == doctest::Approx((x - b).norm()).epsilon(1e-12));
  CHECK(l.contains(q));
  CHECK(l.volume() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("nearest point agrees with exhaustive search, n <= 4") {
  Rng rng(11);
  for (const Lattice& l : small_lattices()) {
    CAPTURE(l.describe());
    int bad = 0;
    for (int t = 0; t < 1000; ++t) {
      const Vec x = uniform_vec(l.dim(), -5.0, 5.0, rng);
      const Vec q = l.nearest_point(x);
      const Vec b = brute_nearest(l, x, l.dim() <= 3 ? 4 : 3);
      if ((x - q).norm() > (x - b).norm() + 1e-9 || !l.contains(q)) ++bad;
    }
    CHECK(bad == 0);
  }
}

TEST_CASE("mod examples") {
  const Lattice z = Lattice::integer_scaled(1, 1.0);
  Vec x(1);
  x << 2.7;
  CHECK(z.mod(x)(0) == doctest::Approx(-0.3).epsilon(1e-12));
  x << 0.2;
  CHECK(z.mod(x)(0) == 0.2);
  const Lattice four = Lattice::integer_scaled(1, 4.0);
  x << 5.0;
  CHECK(four.mod(x)(0) == doctest::Approx(1.0));
}

TEST_CASE("mod is idempotent and ignores lattice shifts") {
  Rng rng(3);
  for (const Lattice& l : small_lattices()) {
    CAPTURE(l.describe());
    for (int t = 0; t < 200; ++t) {
      const Vec x = uniform_vec(l.dim(), -6.0, 6.0, rng);
      const Vec m = l.mod(x);
      CHECK((l.mod(m) - m).norm() < 1e-12);
      CHECK(l.in_voronoi(m));
      CHECK(l.contains(x - m));
      Vec k(l.dim());
      for (int i = 0; i < l.dim(); ++i) k(i) = double(static_cast<int>(rng.below(9)) - 4);
      const Vec lambda = l.generator() * k;
      CHECK((l.mod(x + lambda) - m).norm() < 1e-9);
    }
  }
}

TEST_CASE("boundary ties are shift-equivariant") {
  // Half-integers are ties on Z; the rule must commute with integer shifts.
  const Lattice z = Lattice::integer_scaled(1, 1.0);
  Vec x(1);
  for (int s = -3; s <= 3; ++s) {
    x << 0.5 + s;
    const double q = z.nearest_point(x)(0);
    CHECK(q == doctest::Approx(double(s)));
  }
  const Lattice four = Lattice::integer_scaled(1, 4.0);
  x << 2.0;
  CHECK(four.mod(x)(0) == doctest::Approx(2.0));
  x << -2.0;
  CHECK(four.mod(x)(0) == doctest::Approx(2.0));
}

TEST_CASE("construction-A volume equals |det G|") {
  for (const Lattice& l : small_lattices()) {
    CAPTURE(l.describe());
    CHECK(std::abs(l.generator().determinant()) == doctest::Approx(l.volume()).epsilon(1e-9));
  }
  // s^n p^{-k}
  const Lattice l = Lattice::construction_a(5, {{1, 2, 3}}, 3, 2.0);
  CHECK(l.volume() == doctest::Approx(8.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("voronoi samples on Z: mean and variance") {
  const Lattice z = Lattice::integer_scaled(1, 1.0);
  Rng rng(5);
  const int N = 100000;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < N; ++i) {
    const double u = z.sample_voronoi(rng)(0);
    s += u;
    s2 += u * u;
  }
  const double mean = s / N, var = s2 / N - mean * mean;
  CHECK(std::abs(mean) < 3.0 * std::sqrt(1.0 / 12.0 / N));
  CHECK(var == doctest::Approx(1.0 / 12.0).epsilon(0.05));
}

TEST_CASE("voronoi samples lie in the cell") {
  Rng rng(6);
  for (const Lattice& l : small_lattices())
    for (int i = 0; i < 500; ++i) CHECK(l.nearest_point(l.sample_voronoi(rng)).norm() == 0.0);
}

TEST_CASE("voronoi samples on 2Z^2 pass a 4x4 chi-square test") {
  const Lattice l = Lattice::integer_scaled(2, 2.0);
  Rng rng(7);
  std::vector<long> counts(16, 0);
  for (int i = 0; i < 100000; ++i) {
    const Vec u = l.sample_voronoi(rng);
    const int a = std::min(3, static_cast<int>((u(0) + 1.0) * 2.0));
    const int b = std::min(3, static_cast<int>((u(1) + 1.0) * 2.0));
    ++counts[static_cast<std::size_t>(a * 4 + b)];
  }
  CHECK(testsupport::chi2_statistic(counts) < testsupport::chi2_critical(15, 0.01));
}

TEST_CASE("voronoi stats") {
  Rng rng(8);
  const VoronoiStats z = voronoi_stats(Lattice::integer_scaled(1, 1.0), 100000, rng);
  CHECK(z.second_moment == doctest::Approx(1.0 / 12.0).epsilon(0.02));
  const VoronoiStats c = voronoi_stats(Lattice::integer_scaled(1, 3.0), 100000, rng);
  CHECK(c.second_moment == doctest::Approx(9.0 / 12.0).epsilon(0.02));
  const VoronoiStats z2 = voronoi_stats(Lattice::integer_scaled(2, 1.0), 10000, rng);
  CHECK(z2.r_eff == doctest::Approx(1.0 / std::sqrt(std::numbers::pi)).epsilon(1e-12));
  CHECK(z2.r_cov_estimate >= z2.r_eff);
  CHECK(z2.normalized_second_moment == doctest::Approx(z2.second_moment).epsilon(1e-12));
  CHECK_THROWS_AS(voronoi_stats(Lattice::integer_scaled(1, 1.0), 999, rng), std::invalid_argument);
}

TEST_CASE("poltyrev exponent") {
  CHECK(poltyrev_exponent(1.0) == 0.0);
  CHECK(poltyrev_exponent(0.5) == 0.0);
  CHECK(std::abs(poltyrev_branch(0, 2.0) - poltyrev_branch(1, 2.0)) < 1e-12);
  CHECK(poltyrev_exponent(2.0) == doctest::Approx(0.5 * (1.0 - std::log(2.0))).epsilon(1e-12));
  CHECK(std::abs(poltyrev_branch(1, 4.0) - poltyrev_branch(2, 4.0)) < 1e-12);
  CHECK(poltyrev_exponent(4.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(poltyrev_exponent(0.0), std::invalid_argument);
  CHECK_THROWS_AS(poltyrev_exponent(-1.0), std::invalid_argument);
}

TEST_CASE("capacity") {
  CHECK(capacity_C(0.0) == 0.0);
  CHECK(capacity_C(1.0) == doctest::Approx(0.5));
  CHECK(capacity_C(3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(capacity_C(-0.1), std::invalid_argument);
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(Lattice::integer_scaled(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(Lattice::integer_scaled(2, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(Lattice::diagonal({1.0, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Lattice::construction_a(1, {{1}}, 1, 1.0), std::invalid_argument);
  const Lattice z2 = Lattice::integer_scaled(2, 1.0);
  CHECK_THROWS_AS(z2.nearest_point(Vec::Zero(3)), std::invalid_argument);
}

TEST_CASE("flag family levels are nested with index 2") {
  for (const FlagFamily& f : {FlagFamily::e8(), FlagFamily::cubic(3)}) {
    CAPTURE(f.name());
    const int n = f.dim();
    for (int j = -2; j < 2 * n + 2; ++j) {
      const Lattice a = f.level(j, 1.7), b = f.level(j + 1, 1.7);
      CHECK(is_sublattice(a, b));
      CHECK_FALSE(is_sublattice(b, a));
      CHECK(a.volume() / b.volume() == doctest::Approx(2.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("E8 level: exact moment and minimum distance") {
  const FlagFamily f = FlagFamily::e8();
  const Lattice e8 = f.level(4, 1.0);
  // Minimum norm^2 of this E8 copy is 4 * (1/2)^2 = 1 and det = 1/16.
  Rng rng(9);
  double min_sq = 1e9;
  for (int i = 0; i < 8; ++i) min_sq = std::min(min_sq, e8.generator().col(i).squaredNorm());
  CHECK(min_sq == doctest::Approx(1.0));
  CHECK(e8.volume() == doctest::Approx(1.0 / 16.0));
  const VoronoiStats st = voronoi_stats(e8, 100000, rng);
  CHECK(st.second_moment == doctest::Approx(f.unit_second_moment(4)).epsilon(0.02));
  CHECK(f.scale_for_power(4, 1.0) > 0.0);
}
