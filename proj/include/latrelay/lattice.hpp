// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>
#include <vector>

#include "latrelay/intmath.hpp"
#include "latrelay/rng.hpp"

namespace latrelay {

using Vec = Eigen::VectorXd;

enum class LatticeKind { integer_scaled, diagonal, construction_a };

std::string to_string(LatticeKind kind);

struct VoronoiStats {
  double second_moment = 0.0;             // per dimension
  double normalized_second_moment = 0.0;  // second_moment / V^{2/n}
  double r_eff = 0.0;                     // radius of the ball with volume V
  double r_cov_estimate = 0.0;            // max sample norm, a lower bound on r_cov
  std::size_t sample_count = 0;
};

/// Immutable n-dimensional lattice with exact nearest-point search.
///
/// Supported kinds:
///  - integer_scaled: s·Z^n
///  - diagonal:       diag(d)·Z^n
///  - construction_a: s·(C/p + Z^n) for a linear code C over Z_p
///
/// Boundary ties resolve to the lexicographically smallest integer grid
/// coordinate vector, which makes Q(x + l) = Q(x) + l hold for every lattice
/// vector l and gives every half-open Voronoi cell exactly one point per coset.
class Lattice {
 public:
  static Lattice integer_scaled(int n, double scale);
  static Lattice diagonal(std::vector<double> steps);
  /// `code_rows` are generator rows of C, entries taken mod `modulus`.
  static Lattice construction_a(int modulus, const std::vector<std::vector<int>>& code_rows, int n,
                                double scale);

  int dim() const noexcept { return n_; }
  LatticeKind kind() const noexcept { return kind_; }
  /// Columns are basis vectors.
  const Eigen::MatrixXd& generator() const noexcept { return gen_; }
  double volume() const noexcept { return volume_; }

  Vec nearest_point(const Vec& x) const;
  Vec mod(const Vec& x) const;
  bool in_voronoi(const Vec& x) const;
  bool contains(const Vec& x) const;
  /// Exact uniform draw over the half-open Voronoi cell.
  Vec sample_voronoi(Rng& rng) const;

  /// Same lattice multiplied by c > 0.
  Lattice scaled(double c) const;

  /// Integer coordinates of a lattice point on the lattice's grid
  /// (grid step s/p for construction-A, d_i for diagonal).
  IntVec grid_coordinates(const Vec& point) const;

  int modulus() const noexcept { return modulus_; }
  int code_dimension() const noexcept { return code_dim_; }
  double scale() const noexcept { return scale_; }
  const std::vector<double>& steps() const noexcept { return steps_; }
  const std::vector<std::vector<int>>& code_rows() const;
  std::string describe() const;

 private:
  struct Code {
    std::vector<std::vector<int>> rows;
    std::vector<int> words;  // flattened p^k x n
    std::size_t count = 0;
  };

  Lattice() = default;
  void finish_diagonal();
  void check_dim(const Vec& x) const;
  IntVec nearest_grid(const Vec& x) const;

  int n_ = 0;
  LatticeKind kind_ = LatticeKind::integer_scaled;
  double scale_ = 1.0;
  int modulus_ = 1;
  int code_dim_ = 0;
  std::vector<double> steps_;  // grid step per coordinate
  std::shared_ptr<const Code> code_;
  Eigen::MatrixXd gen_;
  double volume_ = 0.0;
};

/// True when every basis vector of `coarse` is a point of `fine`.
bool is_sublattice(const Lattice& coarse, const Lattice& fine);

VoronoiStats voronoi_stats(const Lattice& lat, std::size_t n_samples, Rng& rng);

/// Volume of the unit ball in n dimensions.
double unit_ball_volume(int n);

/// Poltyrev exponent with natural logarithm; 0 for mu <= 1.
double poltyrev_exponent(double mu);
/// One closed form of the exponent, evaluated anywhere: 0 for 1 < mu <= 2,
/// 1 for 2 <= mu <= 4, 2 for mu >= 4.  Used to check continuity.
double poltyrev_branch(int branch, double mu);

/// C(x) = 0.5 log2(1 + x).
double capacity_C(double x);

}  // namespace latrelay
