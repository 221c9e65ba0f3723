// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "latrelay/lattice.hpp"

namespace latrelay {

// Modulo-sum algebra for two users with nested coarse lattices
// Λ1 ⊆ Λ2 (user 1 has the larger power).
//
// The identities are written with an "offset" d2 in the position where the
// dither enters the quantizer:  T = (t1 + t2 - Q2(t2 + d2)) mod Λ1.
// Transmitters in this library send (t - U) mod Λ, so the sum a relay sees
// corresponds to d2 = -U2; callers holding the transmit dither pass its
// negation.

/// T = (t1 + t2 - Q2(t2 + d2)) mod Λ1.
Vec sum_point(const Lattice& l1, const Lattice& l2, const Vec& t1, const Vec& t2, const Vec& d2);

/// t1 = (T - t2 + Q2(t2 + d2)) mod Λ1.
Vec recover_t1_from_T(const Vec& T, const Vec& t2, const Vec& d2, const Lattice& l1, const Lattice& l2);

/// t2 = (T mod Λ2 - t1) mod Λ2; needs no dither.
Vec recover_t2_from_T(const Vec& T, const Vec& t1, const Lattice& l1, const Lattice& l2);

/// Decodes T from y = X1 + X2 + Z with X_i = (t_i - U_i) mod Λ_i:
///   Y' = (alpha y + U1 + U2) mod Λ1,  T̂ = Q_f(Y') mod Λ1,
/// where Λ_f is the finer of the two fine lattices.  Returns the estimate
/// of sum_point(t1, t2, -U2).
Vec relay_sum_decode(const Lattice& l1, const Lattice& l2, const Lattice& finer, const Vec& y, const Vec& u1,
                     const Vec& u2, double alpha);

}  // namespace latrelay
