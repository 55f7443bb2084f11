#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

#include "hoeffding/rational.hpp"

namespace hoeffding {

/// Seedable generator used for every Monte Carlo run. The identifier is written into report metadata.
using Rng = std::mt19937_64;
inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

/// Uniform integer in [0, bound) by rejection over 64-bit words; exact and platform independent.
inline Integer uniform_below(Rng& rng, const Integer& bound) {
  if (bound <= 0) fail(ErrorKind::InvalidArgument, "uniform_below needs a positive bound");
  if (bound == 1) return 0;
  const unsigned bits = boost::multiprecision::msb(Integer(bound - 1)) + 1;
  const unsigned words = (bits + 63) / 64;
  const unsigned top_bits = bits - 64 * (words - 1);
  while (true) {
    Integer draw = 0;
    for (unsigned w = 0; w < words; ++w) {
      std::uint64_t word = rng();
      if (w == 0 && top_bits < 64) word &= (std::uint64_t{1} << top_bits) - 1;
      draw <<= 64;
      draw += word;
    }
    if (draw < bound) return draw;
  }
}

/// Draws an index with probability proportional to the nonnegative exact weights.
inline int draw_categorical(Rng& rng, std::span<const Rational> weights) {
  Integer common = 1;
  for (const auto& w : weights) {
    if (w < 0) fail(ErrorKind::InvalidArgument, "negative categorical weight");
    common = boost::multiprecision::lcm(common, denominator(w));
  }
  std::vector<Integer> scaled;
  scaled.reserve(weights.size());
  Integer total = 0;
  for (const auto& w : weights) {
    scaled.push_back(numerator(w) * (common / denominator(w)));
    total += scaled.back();
  }
  Integer u = uniform_below(rng, total);
  for (std::size_t i = 0; i < scaled.size(); ++i) {
    if (u < scaled[i]) return static_cast<int>(i);
    u -= scaled[i];
  }
  return static_cast<int>(scaled.size()) - 1;
}

}  // namespace hoeffding
