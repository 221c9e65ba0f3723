// SPDX-License-Identifier: Apache-2.0
#include "latrelay/list_decoding.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace latrelay {

double mmse_alpha(double P, double N) {
  if (!(P > 0.0) || !(N > 0.0)) throw std::invalid_argument("mmse_alpha: P and N must be positive");
  return P / (P + N);
}

double MixedNoiseSpec::total() const {
  double t = gaussian_variance;
  for (double p : uniform_powers) t += p;
  return t;
}

double equivalent_noise_variance(double alpha, double P, const MixedNoiseSpec& noise,
                                 std::span<const double> ratios) {
  if (alpha < 0.0 || alpha > 1.0) throw std::invalid_argument("alpha must lie in [0,1]");
  if (ratios.size() != noise.uniform_powers.size() + 1) {
    throw std::invalid_argument("need one covering ratio for the signal and one per uniform component");
  }
  for (double r : ratios) {
    if (r < 1.0) throw std::invalid_argument("covering ratio r_cov/r_eff must be >= 1");
  }
  double v = (1.0 - alpha) * (1.0 - alpha) * ratios[0] * ratios[0] * P + alpha * alpha * noise.gaussian_variance;
  for (std::size_t i = 0; i < noise.uniform_powers.size(); ++i) {
    v += alpha * alpha * ratios[i + 1] * ratios[i + 1] * noise.uniform_powers[i];
  }
  return v;
}

bool ListResult::contains(std::uint32_t m) const {
  return std::binary_search(messages.begin(), messages.end(), m);
}

ListDecoder::ListDecoder(std::shared_ptr<const Codebook> codebook, Lattice list_lattice)
    : cb_(std::move(codebook)), list_(std::move(list_lattice)) {
  if (!cb_) throw std::invalid_argument("ListDecoder: null codebook");
  if (!is_sublattice(cb_->coarse(), list_) || !is_sublattice(list_, cb_->fine())) {
    throw std::invalid_argument("nesting violation: need coarse ⊆ list ⊆ fine");
  }
  const CosetSystem reps(list_, cb_->fine());
  if (reps.count() > kDefaultEnumerationCap) throw std::length_error("list enumeration cap exceeded");
  reps_.reserve(reps.count());
  for (std::uint64_t i = 0; i < reps.count(); ++i) reps_.push_back(reps.point(i));
}

Vec ListDecoder::front_end(const Vec& y, const Vec& dither, double alpha) const {
  return cb_->coarse().mod(alpha * y + dither);
}

ListResult ListDecoder::decode(const Vec& y, const Vec& dither, double alpha) const {
  return list_at(front_end(y, dither, alpha), alpha);
}

ListResult ListDecoder::list_at(const Vec& yp, double alpha) const {
  ListResult out;
  out.alpha = alpha;
  out.exact_size = reps_.size();
  out.messages.reserve(reps_.size());
  // The point of coset r + Λ_s lying in Y' + V_s is Y' + ((r - Y') mod Λ_s).
  for (const Vec& r : reps_) {
    const Vec lambda = yp + list_.mod(r - yp);
    out.messages.push_back(cb_->message_of(lambda));
  }
  std::sort(out.messages.begin(), out.messages.end());
  return out;
}

ListResult ListDecoder::decode_via_q(const Vec& y, const Vec& dither, double alpha) const {
  const Vec yp = front_end(y, dither, alpha);
  ListResult out;
  out.alpha = alpha;
  out.exact_size = reps_.size();
  out.messages.reserve(reps_.size());
  // λ ∈ r + Λ_s with Y' ∈ λ + V_s is λ = r + Q_s(Y' - r).
  for (const Vec& r : reps_) {
    const Vec lambda = r + list_.nearest_point(yp - r);
    out.messages.push_back(cb_->message_of(lambda));
  }
  std::sort(out.messages.begin(), out.messages.end());
  return out;
}

ListProbe ListDecoder::probe(const Vec& y, const Vec& dither, double alpha) const {
  return ListProbe(*this, front_end(y, dither, alpha), alpha);
}

bool ListProbe::contains(std::uint32_t message) const {
  if (everything_) return message < dec_->codebook().size();
  const Vec t = dec_->codebook().point(message);
  return dec_->codebook().coarse().contains(dec_->list_.nearest_point(t - front_));
}

std::uint64_t ListProbe::exact_size() const {
  return everything_ ? dec_->codebook().size() : dec_->list_size();
}

ListResult ListProbe::materialize() const {
  if (!everything_) return dec_->list_at(front_, alpha_);
  ListResult all;
  all.exact_size = dec_->codebook().size();
  all.messages.resize(all.exact_size);
  for (std::uint64_t i = 0; i < all.exact_size; ++i) all.messages[i] = static_cast<std::uint32_t>(i);
  return all;
}

ListResult list_decode(const ListDecoder& dec, const Vec& y, const Vec& dither, double alpha) {
  return dec.decode(y, dither, alpha);
}

ListResult list_decode_via_Q(const ListDecoder& dec, const Vec& y, const Vec& dither, double alpha) {
  return dec.decode_via_q(y, dither, alpha);
}

std::uint32_t unique_decode(const Codebook& cb, const Vec& y, const Vec& dither, double alpha) {
  const Vec yp = cb.coarse().mod(alpha * y + dither);
  return cb.message_of(cb.fine().nearest_point(yp));
}

double list_volume_target(double coarse_volume, int n, double P, double N, double margin) {
  if (!(P > 0.0) || !(N > 0.0) || !(margin > 0.0)) throw std::invalid_argument("list_volume_target: bad arguments");
  return margin * std::pow(N / (P + N), 0.5 * n) * coarse_volume;
}

}  // namespace latrelay
