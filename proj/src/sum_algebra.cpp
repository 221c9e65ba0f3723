// SPDX-License-Identifier: Apache-2.0
#include "latrelay/sum_algebra.hpp"

#include <stdexcept>

namespace latrelay {
namespace {

void require_nested(const Lattice& l1, const Lattice& l2) {
  if (!is_sublattice(l1, l2)) throw std::invalid_argument("nesting violation: need Λ1 ⊆ Λ2");
}

}  // namespace

Vec sum_point(const Lattice& l1, const Lattice& l2, const Vec& t1, const Vec& t2, const Vec& d2) {
  require_nested(l1, l2);
  return l1.mod(t1 + t2 - l2.nearest_point(t2 + d2));
}

Vec recover_t1_from_T(const Vec& T, const Vec& t2, const Vec& d2, const Lattice& l1, const Lattice& l2) {
  require_nested(l1, l2);
  return l1.mod(T - t2 + l2.nearest_point(t2 + d2));
}

Vec recover_t2_from_T(const Vec& T, const Vec& t1, const Lattice& l1, const Lattice& l2) {
  require_nested(l1, l2);
  return l2.mod(l2.mod(T) - t1);
}

Vec relay_sum_decode(const Lattice& l1, const Lattice& l2, const Lattice& finer, const Vec& y, const Vec& u1,
                     const Vec& u2, double alpha) {
  require_nested(l1, l2);
  const Vec yp = l1.mod(alpha * y + u1 + u2);
  return l1.mod(finer.nearest_point(yp));
}

}  // namespace latrelay
