// SPDX-License-Identifier: Apache-2.0
#include "latrelay/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace latrelay {
namespace {

// Rounding slack, in grid units: values this close to a half-integer are
// treated as exact ties so that boundary decisions do not depend on the last
// bit of a product like (s/2)*3/s.
constexpr double kTieTol = 1e-9;

inline std::int64_t round_half_down(double v) {
  return static_cast<std::int64_t>(std::ceil(v - 0.5 - kTieTol));
}

constexpr std::size_t kMaxCodewords = std::size_t{1} << 16;

}  // namespace

std::string to_string(LatticeKind kind) {
  switch (kind) {
    case LatticeKind::integer_scaled: return "integer_scaled";
    case LatticeKind::diagonal: return "diagonal";
    case LatticeKind::construction_a: return "construction_a";
  }
  return "unknown";
}

Lattice Lattice::integer_scaled(int n, double scale) {
  if (n <= 0) throw std::invalid_argument("lattice dimension must be positive");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("lattice scale must be positive");
  Lattice l;
  l.n_ = n;
  l.kind_ = LatticeKind::integer_scaled;
  l.scale_ = scale;
  l.steps_.assign(static_cast<std::size_t>(n), scale);
  l.finish_diagonal();
  return l;
}

Lattice Lattice::diagonal(std::vector<double> steps) {
  if (steps.empty()) throw std::invalid_argument("lattice dimension must be positive");
  for (double d : steps) {
    if (!(d > 0.0) || !std::isfinite(d)) throw std::invalid_argument("diagonal steps must be positive");
  }
  Lattice l;
  l.n_ = static_cast<int>(steps.size());
  l.kind_ = LatticeKind::diagonal;
  l.scale_ = 1.0;
  l.steps_ = std::move(steps);
  l.finish_diagonal();
  return l;
}

void Lattice::finish_diagonal() {
  gen_ = Eigen::MatrixXd::Zero(n_, n_);
  volume_ = 1.0;
  for (int i = 0; i < n_; ++i) {
    gen_(i, i) = steps_[static_cast<std::size_t>(i)];
    volume_ *= steps_[static_cast<std::size_t>(i)];
  }
}

Lattice Lattice::construction_a(int modulus, const std::vector<std::vector<int>>& code_rows, int n,
                                double scale) {
  if (n <= 0) throw std::invalid_argument("lattice dimension must be positive");
  if (modulus < 2) throw std::invalid_argument("construction-A modulus must be >= 2");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("lattice scale must be positive");
  auto code = std::make_shared<Code>();
  for (const auto& row : code_rows) {
    if (static_cast<int>(row.size()) != n) throw std::invalid_argument("code row length differs from dimension");
    std::vector<int> r(row.size());
    for (std::size_t i = 0; i < row.size(); ++i) r[i] = ((row[i] % modulus) + modulus) % modulus;
    code->rows.push_back(std::move(r));
  }

  // Enumerate the code by running over all coefficient tuples; duplicates
  // appear when rows are dependent, hence the set.
  std::set<std::vector<int>> words;
  const std::size_t k = code->rows.size();
  std::size_t combos = 1;
  for (std::size_t i = 0; i < k; ++i) {
    combos *= static_cast<std::size_t>(modulus);
    if (combos > kMaxCodewords * kMaxCodewords) throw std::invalid_argument("code too large for exhaustive search");
  }
  std::vector<int> coeff(k, 0);
  for (std::size_t c = 0; c < combos; ++c) {
    std::vector<int> w(static_cast<std::size_t>(n), 0);
    for (std::size_t r = 0; r < k; ++r) {
      if (coeff[r] == 0) continue;
      for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] += coeff[r] * code->rows[r][static_cast<std::size_t>(i)];
    }
    for (int& v : w) v %= modulus;
    words.insert(std::move(w));
    if (words.size() > kMaxCodewords) throw std::invalid_argument("code too large for exhaustive search");
    for (std::size_t r = 0; r < k; ++r) {
      if (++coeff[r] < modulus) break;
      coeff[r] = 0;
    }
  }
  code->count = words.size();
  code->words.reserve(code->count * static_cast<std::size_t>(n));
  for (const auto& w : words) code->words.insert(code->words.end(), w.begin(), w.end());

  int dim_k = 0;
  for (std::size_t c = 1; c < code->count; c *= static_cast<std::size_t>(modulus)) ++dim_k;

  Lattice l;
  l.n_ = n;
  l.kind_ = LatticeKind::construction_a;
  l.scale_ = scale;
  l.modulus_ = modulus;
  l.code_dim_ = dim_k;
  const double g = scale / modulus;
  l.steps_.assign(static_cast<std::size_t>(n), g);
  l.code_ = code;

  IntMat stack(static_cast<Eigen::Index>(k) + n, n);
  stack.setZero();
  for (std::size_t r = 0; r < k; ++r)
    for (int i = 0; i < n; ++i) stack(static_cast<Eigen::Index>(r), i) = code->rows[r][static_cast<std::size_t>(i)];
  for (int i = 0; i < n; ++i) stack(static_cast<Eigen::Index>(k) + i, i) = modulus;
  const IntMat h = hermite_rows(stack);
  if (h.rows() != n) throw std::logic_error("construction-A basis is not full rank");
  l.gen_ = g * h.transpose().cast<double>();
  l.volume_ = std::pow(g, n);
  for (int i = 0; i < n; ++i) l.volume_ *= static_cast<double>(h(i, i));
  return l;
}

const std::vector<std::vector<int>>& Lattice::code_rows() const {
  static const std::vector<std::vector<int>> empty;
  return code_ ? code_->rows : empty;
}

void Lattice::check_dim(const Vec& x) const {
  if (x.size() != n_) throw std::invalid_argument("dimension mismatch");
}

IntVec Lattice::nearest_grid(const Vec& x) const {
  IntVec out(n_);
  if (kind_ != LatticeKind::construction_a) {
    for (int i = 0; i < n_; ++i) out(i) = round_half_down(x(i) / steps_[static_cast<std::size_t>(i)]);
    return out;
  }

  // Exhaustive coset search.  Per coordinate and residue r the nearest grid
  // value congruent to r mod p and its squared distance are tabulated once,
  // so each codeword costs n lookups.
  const int p = modulus_;
  const double g = steps_[0];
  thread_local std::vector<double> dist;
  thread_local std::vector<std::int64_t> cand;
  const std::size_t cells = static_cast<std::size_t>(n_) * static_cast<std::size_t>(p);
  dist.resize(cells);
  cand.resize(cells);
  for (int i = 0; i < n_; ++i) {
    const double t = x(i) / g;
    for (int r = 0; r < p; ++r) {
      const std::int64_t y = r + p * round_half_down((t - r) / p);
      const double d = t - static_cast<double>(y);
      const std::size_t at = static_cast<std::size_t>(i) * static_cast<std::size_t>(p) + static_cast<std::size_t>(r);
      dist[at] = d * d;
      cand[at] = y;
    }
  }
  const int* words = code_->words.data();
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t w = 0; w < code_->count; ++w) {
    const int* cw = words + w * static_cast<std::size_t>(n_);
    double d = 0.0;
    for (int i = 0; i < n_; ++i) d += dist[static_cast<std::size_t>(i * p + cw[i])];
    const double tol = w == 0 ? 0.0 : 1e-9 * std::max(1.0, best_d);
    if (w == 0 || d < best_d - tol) {
      best_d = d;
      best = w;
    } else if (d <= best_d + tol) {
      const int* bw = words + best * static_cast<std::size_t>(n_);
      for (int i = 0; i < n_; ++i) {
        const std::int64_t yc = cand[static_cast<std::size_t>(i * p + cw[i])];
        const std::int64_t yb = cand[static_cast<std::size_t>(i * p + bw[i])];
        if (yc != yb) {
          if (yc < yb) {
            best = w;
            best_d = std::min(best_d, d);
          }
          break;
        }
      }
    }
  }
  const int* bw = words + best * static_cast<std::size_t>(n_);
  for (int i = 0; i < n_; ++i) out(i) = cand[static_cast<std::size_t>(i * p + bw[i])];
  return out;
}

Vec Lattice::nearest_point(const Vec& x) const {
  check_dim(x);
  if (!x.allFinite()) throw std::invalid_argument("nearest_point: non-finite input");
  const IntVec z = nearest_grid(x);
  Vec out(n_);
  for (int i = 0; i < n_; ++i) out(i) = static_cast<double>(z(i)) * steps_[static_cast<std::size_t>(i)];
  return out;
}

Vec Lattice::mod(const Vec& x) const { return x - nearest_point(x); }

bool Lattice::in_voronoi(const Vec& x) const {
  check_dim(x);
  return nearest_grid(x).isZero();
}

bool Lattice::contains(const Vec& x) const {
  check_dim(x);
  const Vec q = nearest_point(x);
  for (int i = 0; i < n_; ++i) {
    if (std::abs(x(i) - q(i)) > 1e-7 * steps_[static_cast<std::size_t>(i)]) return false;
  }
  return true;
}

Vec Lattice::sample_voronoi(Rng& rng) const {
  Vec u(n_);
  for (int i = 0; i < n_; ++i) u(i) = rng.uniform();
  return mod(gen_ * u);
}

Lattice Lattice::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw std::invalid_argument("scale factor must be positive");
  Lattice l = *this;
  l.scale_ *= c;
  for (double& d : l.steps_) d *= c;
  l.gen_ *= c;
  l.volume_ *= std::pow(c, n_);
  return l;
}

IntVec Lattice::grid_coordinates(const Vec& point) const {
  check_dim(point);
  IntVec z(n_);
  for (int i = 0; i < n_; ++i) z(i) = std::llround(point(i) / steps_[static_cast<std::size_t>(i)]);
  return z;
}

std::string Lattice::describe() const {
  std::ostringstream os;
  os << to_string(kind_) << " n=" << n_;
  if (kind_ == LatticeKind::construction_a) os << " p=" << modulus_ << " k=" << code_dim_;
  if (kind_ != LatticeKind::diagonal) os << " scale=" << scale_;
  os << " volume=" << volume_;
  return os.str();
}

bool is_sublattice(const Lattice& coarse, const Lattice& fine) {
  if (coarse.dim() != fine.dim()) return false;
  for (int c = 0; c < coarse.dim(); ++c) {
    if (!fine.contains(coarse.generator().col(c))) return false;
  }
  return true;
}

double unit_ball_volume(int n) {
  const double half = 0.5 * n;
  return std::exp(half * std::log(std::numbers::pi) - std::lgamma(half + 1.0));
}

VoronoiStats voronoi_stats(const Lattice& lat, std::size_t n_samples, Rng& rng) {
  if (n_samples < 1000) throw std::invalid_argument("voronoi_stats needs at least 1000 samples");
  const int n = lat.dim();
  double sum = 0.0;
  double max_norm = 0.0;
  for (std::size_t s = 0; s < n_samples; ++s) {
    const Vec x = lat.sample_voronoi(rng);
    const double sq = x.squaredNorm();
    sum += sq;
    max_norm = std::max(max_norm, std::sqrt(sq));
  }
  VoronoiStats st;
  st.sample_count = n_samples;
  st.second_moment = sum / (static_cast<double>(n_samples) * n);
  st.normalized_second_moment = st.second_moment / std::pow(lat.volume(), 2.0 / n);
  st.r_eff = std::pow(lat.volume() / unit_ball_volume(n), 1.0 / n);
  st.r_cov_estimate = max_norm;
  return st;
}

double poltyrev_branch(int branch, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poltyrev_exponent: mu must be positive");
  switch (branch) {
    case 0: return 0.5 * ((mu - 1.0) - std::log(mu));
    case 1: return 0.5 * std::log(std::numbers::e * mu / 4.0);
    case 2: return mu / 8.0;
  }
  throw std::invalid_argument("poltyrev_branch: branch must be 0, 1 or 2");
}

double poltyrev_exponent(double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("poltyrev_exponent: mu must be positive");
  if (mu <= 1.0) return 0.0;
  return poltyrev_branch(mu <= 2.0 ? 0 : mu <= 4.0 ? 1 : 2, mu);
}

double capacity_C(double x) {
  if (x < 0.0 || std::isnan(x)) throw std::invalid_argument("capacity_C: negative argument");
  return 0.5 * std::log2(1.0 + x);
}

}  // namespace latrelay
