#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "tgs/curve.hpp"
#include "tgs/errors.hpp"

namespace tgs {

/// Inclusive frame interval [start, end]; measured on the real line as
/// [start, end+1) so a single frame has length 1.
struct FrameInterval {
  std::int64_t start = 0;
  std::int64_t end = 0;

  bool operator==(const FrameInterval&) const = default;
};

/// Result of the sliding-window moment search.
struct MomentResult {
  std::int64_t window_start = 0;  // i*
  std::int64_t center = 0;        // c* = i* + floor(w/2)
  std::int64_t window = 1;        // w
};

/// Maximal run of frames at or above the grounding threshold.
struct Segment {
  std::int64_t start = 0;  // inclusive
  std::int64_t end = 0;    // inclusive
  double score = 0.0;      // mean curve value over the run

  FrameInterval interval() const { return {start, end}; }
  bool operator==(const Segment&) const = default;
};

struct TsgReport {
  std::map<double, double> recalls;  // IoU threshold -> fraction of pairs
  double mean_iou = 0.0;
};

/// Default moment window: ceil(T/10), clamped to [1, T].
inline std::int64_t default_window(std::int64_t horizon) {
  if (horizon < 1) throw ValidationError("default_window: horizon must be positive");
  const std::int64_t w = (horizon + 9) / 10;
  return std::min(std::max<std::int64_t>(w, 1), horizon);
}

/// Finds the window of size `window` maximizing cumulative similarity.
///
/// Ties break toward the smallest start index; each window sum is
/// accumulated left to right so equal-valued curves tie exactly.
inline MomentResult moment_center(const SimilarityCurve& curve,
                                  std::int64_t window) {
  const auto horizon = static_cast<std::int64_t>(curve.length());
  if (window < 1 || window > horizon)
    throw ValidationError("moment_center: window must lie in [1, T]");

  std::int64_t best_start = 0;
  double best_sum = -1.0;
  for (std::int64_t i = 0; i + window <= horizon; ++i) {
    double sum = 0.0;
    for (std::int64_t j = i; j < i + window; ++j)
      sum += curve.values[static_cast<std::size_t>(j)];
    if (sum > best_sum) {
      best_sum = sum;
      best_start = i;
    }
  }
  return MomentResult{best_start, best_start + window / 2, window};
}

/// Extracts maximal runs of consecutive frames with S_i >= theta.
inline std::vector<Segment> extract_segments(const SimilarityCurve& curve,
                                             double theta) {
  if (!(theta > 0.0) || !(theta < 1.0))
    throw ValidationError("extract_segments: theta must lie in (0, 1)");
  std::vector<Segment> out;
  const auto n = static_cast<std::int64_t>(curve.length());
  std::int64_t i = 0;
  while (i < n) {
    if (curve.values[static_cast<std::size_t>(i)] < theta) {
      ++i;
      continue;
    }
    std::int64_t j = i;
    double sum = 0.0;
    while (j < n && curve.values[static_cast<std::size_t>(j)] >= theta) {
      sum += curve.values[static_cast<std::size_t>(j)];
      ++j;
    }
    out.push_back(Segment{i, j - 1, sum / static_cast<double>(j - i)});
    i = j;
  }
  return out;
}

/// Picks the segment with the largest cumulative similarity (ties -> earliest
/// start). Returns nullopt on an empty list; callers then fall back to the
/// moment window.
inline std::optional<Segment> best_segment(const std::vector<Segment>& segments,
                                           const SimilarityCurve& curve) {
  const auto n = static_cast<std::int64_t>(curve.length());
  std::optional<Segment> best;
  double best_sum = 0.0;
  for (const Segment& s : segments) {
    if (s.start < 0 || s.end < s.start || s.end >= n)
      throw ValidationError("best_segment: segment out of curve bounds");
    double sum = 0.0;
    for (std::int64_t j = s.start; j <= s.end; ++j)
      sum += curve.values[static_cast<std::size_t>(j)];
    if (!best || sum > best_sum) {
      best = s;
      best_sum = sum;
    }
  }
  return best;
}

/// IoU of two frame intervals on the real line ([start, end+1)).
inline double interval_iou(FrameInterval a, FrameInterval b) {
  if (a.start > a.end || b.start > b.end)
    throw ValidationError("interval_iou: interval start must not exceed end");
  const std::int64_t inter =
      std::max<std::int64_t>(0, std::min(a.end, b.end) + 1 - std::max(a.start, b.start));
  const std::int64_t len_a = a.end - a.start + 1;
  const std::int64_t len_b = b.end - b.start + 1;
  const std::int64_t uni = len_a + len_b - inter;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

/// Recall at each IoU threshold plus mean IoU over (prediction, truth) pairs.
/// A missing prediction scores IoU 0.
inline TsgReport tsg_metrics(
    const std::vector<std::pair<std::optional<FrameInterval>, FrameInterval>>& pairs,
    const std::vector<double>& thresholds) {
  if (pairs.empty())
    throw ValidationError("tsg_metrics: pair list must be non-empty");
  for (double t : thresholds)
    if (!(t > 0.0) || t > 1.0)
      throw ValidationError("tsg_metrics: thresholds must lie in (0, 1]");

  std::vector<double> ious;
  ious.reserve(pairs.size());
  for (const auto& [pred, truth] : pairs)
    ious.push_back(pred ? interval_iou(*pred, truth) : 0.0);

  TsgReport report;
  double sum = 0.0;
  for (double v : ious) sum += v;
  report.mean_iou = sum / static_cast<double>(ious.size());
  for (double t : thresholds) {
    std::size_t hits = 0;
    for (double v : ious)
      if (v >= t) ++hits;
    report.recalls[t] = static_cast<double>(hits) / static_cast<double>(ious.size());
  }
  return report;
}

inline const std::vector<double>& default_recall_thresholds() {
  static const std::vector<double> kThresholds{0.3, 0.5, 0.7};
  return kThresholds;
}

}  // namespace tgs
