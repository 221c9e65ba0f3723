// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

#include "latrelay/nested.hpp"

namespace latrelay {

// Lattice Wyner-Ziv codec over a pair Λ ⊆ Λ_q held as a Codebook
// (coarse = Λ, fine = Λ_q).  The encoder scaling is fixed to 1.

/// I = Q_q(y + U) mod Λ, returned as the codebook message of that point.
std::uint32_t wz_encode(const Codebook& pair, const Vec& y, const Vec& dither);

/// Ŷ = ((I - U - a2·s) mod Λ) + a2·s for side information s.
Vec wz_decode(const Codebook& pair, std::uint32_t index, const Vec& side_info, const Vec& dither, double alpha2);

}  // namespace latrelay
