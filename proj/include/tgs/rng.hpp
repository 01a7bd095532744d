#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

#include "tgs/errors.hpp"

namespace tgs {

namespace detail {

inline constexpr std::uint64_t kSplitMixGamma = 0x9E3779B97F4A7C15ull;

inline std::uint64_t splitmix_scramble(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace detail

/// Counter-based pseudo-random stream keyed by (seed, label).
///
/// Identical (seed, label) pairs reproduce identical draw sequences on any
/// platform; distinct labels derived from the same seed are independent
/// streams. All draws go through explicit bit manipulation rather than
/// <random> distributions, whose output is implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view label)
      : state_(detail::splitmix_scramble(detail::splitmix_scramble(seed) ^
                                         detail::fnv1a64(label))) {}

  std::uint64_t next_u64() {
    state_ += detail::kSplitMixGamma;
    return detail::splitmix_scramble(state_);
  }

  /// Uniform double in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in (0, 1]. Safe as a log() argument.
  double next_unit_pos() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Unbiased uniform integer in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw ValidationError("RngStream::next_below: bound must be positive");
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Standard normal draw (Box-Muller, cached spare).
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = next_unit_pos();
    const double u2 = next_unit();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace tgs
