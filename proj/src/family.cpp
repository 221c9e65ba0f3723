// SPDX-License-Identifier: Apache-2.0
#include "latrelay/family.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "latrelay/intmath.hpp"

namespace latrelay {
namespace {

// Normalized second moment of E8.
constexpr double kE8NormalizedMoment = 929.0 / 12960.0;

}  // namespace

FlagFamily::FlagFamily(std::string name, int n, std::vector<std::vector<int>> flag, int shaping)
    : name_(std::move(name)), n_(n), flag_(std::move(flag)), shaping_(shaping), cache_(std::make_shared<Cache>()) {
  cache_->moment.assign(static_cast<std::size_t>(n_), std::numeric_limits<double>::quiet_NaN());
}

FlagFamily FlagFamily::cubic(int n) {
  if (n <= 0) throw std::invalid_argument("family dimension must be positive");
  std::vector<std::vector<int>> flag;
  for (int i = 0; i < n; ++i) {
    std::vector<int> row(static_cast<std::size_t>(n), 0);
    row[static_cast<std::size_t>(i)] = 1;
    flag.push_back(std::move(row));
  }
  return FlagFamily("cubic", n, std::move(flag), 0);
}

FlagFamily FlagFamily::e8() {
  // First four rows generate the first-order Reed-Muller code RM(1,3), i.e.
  // the extended Hamming [8,4,4] code; adding three weight-2 rows reaches
  // the even-weight code, and a last weight-1 row all of F_2^8.
  std::vector<std::vector<int>> flag = {
      {1, 1, 1, 1, 1, 1, 1, 1}, {1, 1, 1, 1, 0, 0, 0, 0}, {1, 1, 0, 0, 1, 1, 0, 0}, {1, 0, 1, 0, 1, 0, 1, 0},
      {1, 1, 0, 0, 0, 0, 0, 0}, {1, 0, 1, 0, 0, 0, 0, 0}, {1, 0, 0, 0, 1, 0, 0, 0}, {1, 0, 0, 0, 0, 0, 0, 0},
  };
  return FlagFamily("e8", 8, std::move(flag), 4);
}

FlagFamily FlagFamily::by_name(const std::string& name, int n) {
  if (name == "cubic") return cubic(n);
  if (name == "e8") {
    if (n != 8) throw std::invalid_argument("lattice family e8 requires dimension 8");
    return e8();
  }
  throw std::invalid_argument("unknown lattice family '" + name + "'");
}

Lattice FlagFamily::level(int j, double scale) const {
  const int e = static_cast<int>(floor_div(j, n_));
  const int k = j - e * n_;
  const double s = scale * std::ldexp(1.0, -e);
  if (k == 0) return Lattice::integer_scaled(n_, s);
  if (name_ == "cubic") {
    std::vector<double> steps(static_cast<std::size_t>(n_), s);
    for (int i = 0; i < k; ++i) steps[static_cast<std::size_t>(i)] = 0.5 * s;
    return Lattice::diagonal(std::move(steps));
  }
  std::vector<std::vector<int>> rows(flag_.begin(), flag_.begin() + k);
  return Lattice::construction_a(2, rows, n_, s);
}

double FlagFamily::unit_second_moment(int j) const {
  const int e = static_cast<int>(floor_div(j, n_));
  const int k = j - e * n_;
  const double shrink = std::ldexp(1.0, -2 * e);
  if (k == 0) return shrink / 12.0;
  if (name_ == "cubic") return shrink * (static_cast<double>(k) / 4.0 + (n_ - k)) / (12.0 * n_);
  if (name_ == "e8" && k == 4) return shrink * kE8NormalizedMoment * std::pow(level(4, 1.0).volume(), 2.0 / n_);
  std::lock_guard<std::mutex> lock(cache_->mu);
  double& m = cache_->moment[static_cast<std::size_t>(k)];
  if (std::isnan(m)) {
    Rng rng(0x5eed0000ULL + static_cast<std::uint64_t>(k));
    m = voronoi_stats(level(k, 1.0), 100000, rng).second_moment;
  }
  return shrink * m;
}

double FlagFamily::scale_for_power(int j, double power) const {
  if (!(power > 0.0)) throw std::invalid_argument("power must be positive");
  return std::sqrt(power / unit_second_moment(j));
}

}  // namespace latrelay
