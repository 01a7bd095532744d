#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "tgs/errors.hpp"

namespace tgs {

/// Binary mask grid, row-major, entries 0 or 1.
struct MaskFrame {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::uint8_t> bits;

  MaskFrame() = default;
  MaskFrame(std::size_t h, std::size_t w)
      : height(h), width(w), bits(h * w, 0) {
    if (h == 0 || w == 0)
      throw ValidationError("MaskFrame: dimensions must be positive");
  }

  bool at(std::size_t r, std::size_t c) const { return bits[r * width + c] != 0; }
  void set(std::size_t r, std::size_t c, bool v) {
    bits[r * width + c] = v ? 1 : 0;
  }

  std::size_t count() const {
    return std::accumulate(bits.begin(), bits.end(), std::size_t{0},
                           [](std::size_t acc, std::uint8_t b) {
                             return acc + (b != 0 ? 1 : 0);
                           });
  }
  bool empty_mask() const { return count() == 0; }

  bool operator==(const MaskFrame&) const = default;
};

}  // namespace tgs
