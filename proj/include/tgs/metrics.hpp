#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "tgs/errors.hpp"
#include "tgs/mask.hpp"

namespace tgs {

namespace detail {

inline void check_same_shape(const MaskFrame& a, const MaskFrame& b,
                             const char* what) {
  if (a.height != b.height || a.width != b.width)
    throw ValidationError(std::string(what) + ": mask dimensions must match");
}

// Boundary pixels: mask pixels 4-adjacent to background or the image edge.
inline std::vector<std::uint8_t> boundary_of(const MaskFrame& m) {
  std::vector<std::uint8_t> out(m.height * m.width, 0);
  for (std::size_t r = 0; r < m.height; ++r) {
    for (std::size_t c = 0; c < m.width; ++c) {
      if (!m.at(r, c)) continue;
      const bool edge = r == 0 || c == 0 || r + 1 == m.height || c + 1 == m.width;
      const bool open = edge || !m.at(r - 1, c) || !m.at(r + 1, c) ||
                        !m.at(r, c - 1) || !m.at(r, c + 1);
      if (open) out[r * m.width + c] = 1;
    }
  }
  return out;
}

// Fraction of pixels in `from` with a pixel of `to` within Chebyshev
// distance tol. Both grids are boundary indicator grids of the same shape.
inline double matched_fraction(const std::vector<std::uint8_t>& from,
                               const std::vector<std::uint8_t>& to,
                               std::size_t height, std::size_t width,
                               std::size_t tol) {
  std::size_t total = 0;
  std::size_t matched = 0;
  const auto t = static_cast<std::ptrdiff_t>(tol);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      if (!from[r * width + c]) continue;
      ++total;
      bool hit = false;
      for (std::ptrdiff_t dr = -t; dr <= t && !hit; ++dr) {
        const std::ptrdiff_t rr = static_cast<std::ptrdiff_t>(r) + dr;
        if (rr < 0 || rr >= static_cast<std::ptrdiff_t>(height)) continue;
        for (std::ptrdiff_t dc = -t; dc <= t; ++dc) {
          const std::ptrdiff_t cc = static_cast<std::ptrdiff_t>(c) + dc;
          if (cc < 0 || cc >= static_cast<std::ptrdiff_t>(width)) continue;
          if (to[static_cast<std::size_t>(rr) * width +
                 static_cast<std::size_t>(cc)]) {
            hit = true;
            break;
          }
        }
      }
      if (hit) ++matched;
    }
  }
  return total == 0 ? 0.0
                    : static_cast<double>(matched) / static_cast<double>(total);
}

}  // namespace detail

/// Region similarity J: |pred AND gt| / |pred OR gt|; two empty masks agree
/// vacuously (1.0).
inline double region_j(const MaskFrame& pred, const MaskFrame& gt) {
  detail::check_same_shape(pred, gt, "region_j");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t i = 0; i < pred.bits.size(); ++i) {
    const bool a = pred.bits[i] != 0;
    const bool b = gt.bits[i] != 0;
    inter += (a && b) ? 1 : 0;
    uni += (a || b) ? 1 : 0;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Boundary F-measure with Chebyshev-distance matching at tolerance `tol`
/// pixels. Both boundaries empty -> 1; exactly one empty -> 0.
inline double boundary_f(const MaskFrame& pred, const MaskFrame& gt,
                         std::size_t tol = 1) {
  detail::check_same_shape(pred, gt, "boundary_f");
  const auto pb = detail::boundary_of(pred);
  const auto gb = detail::boundary_of(gt);
  const bool pred_empty = std::find(pb.begin(), pb.end(), 1) == pb.end();
  const bool gt_empty = std::find(gb.begin(), gb.end(), 1) == gb.end();
  if (pred_empty && gt_empty) return 1.0;
  if (pred_empty || gt_empty) return 0.0;
  const double precision =
      detail::matched_fraction(pb, gb, pred.height, pred.width, tol);
  const double recall =
      detail::matched_fraction(gb, pb, pred.height, pred.width, tol);
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

struct JfSummary {
  double j_mean = 0.0;
  double f_mean = 0.0;
  double jf = 0.0;
};

/// Per-frame J and F averaged over the sequence; JF is the mean of the two
/// averages.
inline JfSummary jf_summary(const std::vector<MaskFrame>& preds,
                            const std::vector<MaskFrame>& gts,
                            std::size_t tol = 1) {
  if (preds.empty() || preds.size() != gts.size())
    throw ValidationError("jf_summary: sequences must be equal-length and non-empty");
  double j_sum = 0.0;
  double f_sum = 0.0;
  for (std::size_t t = 0; t < preds.size(); ++t) {
    j_sum += region_j(preds[t], gts[t]);
    f_sum += boundary_f(preds[t], gts[t], tol);
  }
  JfSummary out;
  out.j_mean = j_sum / static_cast<double>(preds.size());
  out.f_mean = f_sum / static_cast<double>(preds.size());
  out.jf = (out.j_mean + out.f_mean) / 2.0;
  return out;
}

/// Cumulative IoU: sum of per-frame intersections over sum of unions.
inline double ciou(const std::vector<MaskFrame>& preds,
                   const std::vector<MaskFrame>& gts) {
  if (preds.empty() || preds.size() != gts.size())
    throw ValidationError("ciou: sequences must be equal-length and non-empty");
  std::size_t inter = 0;
  std::size_t uni = 0;
  for (std::size_t t = 0; t < preds.size(); ++t) {
    detail::check_same_shape(preds[t], gts[t], "ciou");
    for (std::size_t i = 0; i < preds[t].bits.size(); ++i) {
      const bool a = preds[t].bits[i] != 0;
      const bool b = gts[t].bits[i] != 0;
      inter += (a && b) ? 1 : 0;
      uni += (a || b) ? 1 : 0;
    }
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace tgs
