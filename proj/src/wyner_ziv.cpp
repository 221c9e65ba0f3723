// SPDX-License-Identifier: Apache-2.0
#include "latrelay/wyner_ziv.hpp"

namespace latrelay {

std::uint32_t wz_encode(const Codebook& pair, const Vec& y, const Vec& dither) {
  return pair.message_of(pair.fine().nearest_point(y + dither));
}

Vec wz_decode(const Codebook& pair, std::uint32_t index, const Vec& side_info, const Vec& dither, double alpha2) {
  const Vec s = alpha2 * side_info;
  return pair.coarse().mod(pair.point(index) - dither - s) + s;
}

}  // namespace latrelay
