#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "tgs/curve.hpp"
#include "tgs/errors.hpp"
#include "tgs/rng.hpp"

namespace tgs {

/// Sorted distinct frame indices chosen by a sampling strategy.
struct SampleSet {
  std::vector<std::int64_t> indices;  // strictly increasing, all in [0, T)
  std::int64_t k_requested = 0;
  std::optional<std::int64_t> center;

  bool contains(std::int64_t frame) const {
    return std::binary_search(indices.begin(), indices.end(), frame);
  }
};

namespace detail {

inline void check_horizon_k(std::int64_t horizon, std::int64_t k) {
  if (horizon < 1) throw ValidationError("sampling: horizon must be positive");
  if (k < 1) throw ValidationError("sampling: k must be positive");
}

inline SampleSet finish(std::vector<std::int64_t> indices, std::int64_t k,
                        std::optional<std::int64_t> center) {
  std::sort(indices.begin(), indices.end());
  indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
  return SampleSet{std::move(indices), k, center};
}

}  // namespace detail

inline SampleSet sample_first_k(std::int64_t horizon, std::int64_t k) {
  detail::check_horizon_k(horizon, k);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(std::min(k, horizon)));
  std::iota(idx.begin(), idx.end(), std::int64_t{0});
  return SampleSet{std::move(idx), k, std::nullopt};
}

/// Evenly spaced indices with half-up rounding; first and last frame are
/// always included for 2 <= K <= T, and K = 1 takes the midpoint.
inline SampleSet sample_uniform(std::int64_t horizon, std::int64_t k) {
  detail::check_horizon_k(horizon, k);
  if (k == 1) return SampleSet{{(horizon - 1) / 2}, k, std::nullopt};
  std::vector<std::int64_t> idx;
  idx.reserve(static_cast<std::size_t>(k));
  for (std::int64_t i = 0; i < k; ++i) {
    const double x = static_cast<double>(i) * static_cast<double>(horizon - 1) /
                     static_cast<double>(k - 1);
    idx.push_back(static_cast<std::int64_t>(std::floor(x + 0.5)));
  }
  return detail::finish(std::move(idx), k, std::nullopt);
}

/// min(K, T) distinct indices drawn uniformly without replacement.
inline SampleSet sample_random(std::int64_t horizon, std::int64_t k,
                               RngStream& rng) {
  detail::check_horizon_k(horizon, k);
  const std::int64_t take = std::min(k, horizon);
  std::vector<std::int64_t> pool(static_cast<std::size_t>(horizon));
  std::iota(pool.begin(), pool.end(), std::int64_t{0});
  for (std::int64_t i = 0; i < take; ++i) {
    const std::uint64_t j = static_cast<std::uint64_t>(i) +
                            rng.next_below(static_cast<std::uint64_t>(horizon - i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(take));
  std::sort(pool.begin(), pool.end());
  return SampleSet{std::move(pool), k, std::nullopt};
}

/// Indices of the K largest curve values; ties break toward smaller indices.
inline SampleSet sample_top_k(const SimilarityCurve& curve, std::int64_t k) {
  const auto horizon = static_cast<std::int64_t>(curve.length());
  detail::check_horizon_k(horizon, k);
  std::vector<std::int64_t> order(static_cast<std::size_t>(horizon));
  std::iota(order.begin(), order.end(), std::int64_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::int64_t a, std::int64_t b) {
    return curve.values[static_cast<std::size_t>(a)] >
           curve.values[static_cast<std::size_t>(b)];
  });
  order.resize(static_cast<std::size_t>(std::min(k, horizon)));
  std::sort(order.begin(), order.end());
  return SampleSet{std::move(order), k, std::nullopt};
}

/// Contiguous block of min(K, T) frames around `center`, left-biased for even
/// K and shifted to stay inside [0, T).
inline SampleSet sample_nearby_k(const SimilarityCurve& curve, std::int64_t k,
                                 std::int64_t center) {
  const auto horizon = static_cast<std::int64_t>(curve.length());
  detail::check_horizon_k(horizon, k);
  if (center < 0 || center >= horizon)
    throw ValidationError("sample_nearby_k: center must lie in [0, T)");
  const std::int64_t take = std::min(k, horizon);
  std::int64_t start = center - take / 2;
  start = std::min(std::max<std::int64_t>(start, 0), horizon - take);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(take));
  std::iota(idx.begin(), idx.end(), start);
  return SampleSet{std::move(idx), k, center};
}

/// First index whose CDF value reaches u. cdf must be non-decreasing with
/// cdf.back() == 1.
inline std::size_t index_from_cdf(const std::vector<double>& cdf, double u) {
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) return cdf.size() - 1;
  return static_cast<std::size_t>(it - cdf.begin());
}

/// Draws k indices from [base, base + weights.size()) by inverting the CDF of
/// the normalized weights.
///
/// The k uniform variates are stratified: u_m = (m-1+v_m)/k with v_m in
/// (0, 1], which preserves the target distribution while making duplicate
/// draws rare. Zero-weight indices are never emitted. The result is a
/// non-decreasing multiset.
inline std::vector<std::int64_t> inverse_cdf_sample(
    const std::vector<double>& weights, std::int64_t base, std::int64_t k,
    RngStream& rng) {
  if (k < 0) throw ValidationError("inverse_cdf_sample: k must be non-negative");
  if (k == 0) return {};
  std::vector<double> probs = normalize_weights(weights);
  std::vector<double> cdf(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;  // guard against accumulated rounding

  std::vector<std::int64_t> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int64_t m = 1; m <= k; ++m) {
    const double u = (static_cast<double>(m - 1) + rng.next_unit_pos()) /
                     static_cast<double>(k);
    out.push_back(base + static_cast<std::int64_t>(index_from_cdf(cdf, u)));
  }
  return out;
}

/// Outcome of moment-centric sampling, including the side allocation.
struct McsResult {
  SampleSet samples;
  std::int64_t k_left = 0;
  std::int64_t k_right = 0;
  double weight_left = 0.0;
  double weight_right = 0.0;
  bool degenerate_fallback = false;
};

namespace detail {

// Evenly spread k draws over [base, base+len); duplicates are fine, the
// caller deduplicates and refills.
inline std::vector<std::int64_t> uniform_side_draws(std::int64_t base,
                                                    std::int64_t len,
                                                    std::int64_t k) {
  std::vector<std::int64_t> out;
  if (len <= 0 || k <= 0) return out;
  SampleSet s = sample_uniform(len, std::min(k, len));
  for (std::int64_t i : s.indices) out.push_back(base + i);
  return out;
}

}  // namespace detail

/// Moment-centric sampling: keep the center frame, split the remaining K-1
/// draws across the two sides proportionally to their cumulative similarity
/// (half-up rounding), and draw each side by inverse-CDF sampling of the
/// per-frame weights.
///
/// Duplicates are removed and the set refilled with the highest-weight
/// unselected indices (ties toward smaller index) so the result always has
/// exactly min(K, T) distinct frames including the center. A curve with zero
/// mass off the center falls back to uniform coverage.
inline McsResult moment_centric_sample(const SimilarityCurve& curve,
                                       std::int64_t k, std::int64_t center,
                                       std::uint64_t seed) {
  const auto horizon = static_cast<std::int64_t>(curve.length());
  detail::check_horizon_k(horizon, k);
  if (center < 0 || center >= horizon)
    throw ValidationError("moment_centric_sample: center must lie in [0, T)");

  const std::int64_t target = std::min(k, horizon);
  McsResult result;

  double w_left = 0.0;
  double w_right = 0.0;
  for (std::int64_t i = 0; i < center; ++i)
    w_left += curve.values[static_cast<std::size_t>(i)];
  for (std::int64_t i = center + 1; i < horizon; ++i)
    w_right += curve.values[static_cast<std::size_t>(i)];
  result.weight_left = w_left;
  result.weight_right = w_right;

  if (w_left + w_right <= 0.0) {
    // Fully degenerate curve: global uniform coverage, center forced in.
    result.degenerate_fallback = true;
    SampleSet uni = sample_uniform(horizon, k);
    if (!uni.contains(center)) {
      // Replace the index nearest to the center (ties toward the smaller).
      std::size_t swap_at = 0;
      std::int64_t best_dist = std::numeric_limits<std::int64_t>::max();
      for (std::size_t i = 0; i < uni.indices.size(); ++i) {
        const std::int64_t d = std::llabs(uni.indices[i] - center);
        if (d < best_dist) {
          best_dist = d;
          swap_at = i;
        }
      }
      uni.indices[swap_at] = center;
      std::sort(uni.indices.begin(), uni.indices.end());
    }
    uni.center = center;
    result.samples = std::move(uni);
    return result;
  }

  const double share = static_cast<double>(k - 1) * w_left / (w_left + w_right);
  result.k_left = static_cast<std::int64_t>(std::floor(share + 0.5));
  result.k_right = (k - 1) - result.k_left;

  std::vector<std::int64_t> picked{center};
  const auto draw_side = [&](std::int64_t lo, std::int64_t len,
                             std::int64_t side_k, const char* label) {
    if (side_k <= 0 || len <= 0) return;
    const std::vector<double> side(
        curve.values.begin() + static_cast<std::ptrdiff_t>(lo),
        curve.values.begin() + static_cast<std::ptrdiff_t>(lo + len));
    RngStream rng(seed, label);
    try {
      const auto drawn = inverse_cdf_sample(side, lo, side_k, rng);
      picked.insert(picked.end(), drawn.begin(), drawn.end());
    } catch (const DegenerateWeightsError&) {
      // Zero-mass side: cover it evenly instead.
      const auto drawn = detail::uniform_side_draws(lo, len, side_k);
      picked.insert(picked.end(), drawn.begin(), drawn.end());
    }
  };
  draw_side(0, center, result.k_left, "mcs-left");
  draw_side(center + 1, horizon - center - 1, result.k_right, "mcs-right");

  SampleSet set = detail::finish(std::move(picked), k, center);

  // Refill any dedup deficit with the heaviest unselected frames.
  if (static_cast<std::int64_t>(set.indices.size()) < target) {
    std::vector<std::int64_t> rest;
    for (std::int64_t i = 0; i < horizon; ++i)
      if (!set.contains(i)) rest.push_back(i);
    std::stable_sort(rest.begin(), rest.end(), [&](std::int64_t a, std::int64_t b) {
      return curve.values[static_cast<std::size_t>(a)] >
             curve.values[static_cast<std::size_t>(b)];
    });
    const std::size_t need =
        static_cast<std::size_t>(target) - set.indices.size();
    set.indices.insert(set.indices.end(), rest.begin(),
                       rest.begin() + static_cast<std::ptrdiff_t>(need));
    std::sort(set.indices.begin(), set.indices.end());
  }

  result.samples = std::move(set);
  return result;
}

}  // namespace tgs
