#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tgs/curve.hpp"
#include "tgs/errors.hpp"
#include "tgs/grounding.hpp"
#include "tgs/metrics.hpp"
#include "tgs/propagation.hpp"
#include "tgs/sampling.hpp"
#include "tgs/scenario.hpp"

namespace tgs {

enum class Strategy { kFirstK, kUniform, kRandom, kTopK, kNearbyK, kMcs };

inline const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kFirstK: return "firstk";
    case Strategy::kUniform: return "uniform";
    case Strategy::kRandom: return "random";
    case Strategy::kTopK: return "topk";
    case Strategy::kNearbyK: return "nearbyk";
    case Strategy::kMcs: return "mcs";
  }
  throw ValidationError("strategy_name: unknown strategy");
}

inline Strategy parse_strategy(std::string_view name) {
  if (name == "firstk") return Strategy::kFirstK;
  if (name == "uniform") return Strategy::kUniform;
  if (name == "random") return Strategy::kRandom;
  if (name == "topk") return Strategy::kTopK;
  if (name == "nearbyk") return Strategy::kNearbyK;
  if (name == "mcs") return Strategy::kMcs;
  throw ValidationError("unknown sampling strategy: " + std::string(name));
}

struct PipelineParams {
  std::int64_t k = 8;
  std::int64_t window = 0;  // 0 -> default_window(T)
  double theta = 0.4;
  double lambda = 0.9;
  double smooth_sigma = 1.0;
  std::size_t smooth_radius = 3;
  std::size_t boundary_tol = 1;
};

/// Grounding outcome on a conditioned curve: moment window, threshold
/// segments, and the reported interval (best segment, else the window).
struct GroundingOutcome {
  MomentResult moment;
  std::vector<Segment> segments;
  std::optional<Segment> best;
  FrameInterval predicted;
};

inline GroundingOutcome ground_curve(const SimilarityCurve& curve,
                                     std::int64_t window, double theta) {
  GroundingOutcome out;
  out.moment = moment_center(curve, window);
  out.segments = extract_segments(curve, theta);
  out.best = best_segment(out.segments, curve);
  if (out.best)
    out.predicted = out.best->interval();
  else
    out.predicted = FrameInterval{out.moment.window_start,
                                  out.moment.window_start + window - 1};
  return out;
}

/// Smoothing step shared by the pipeline and the CLI; the radius shrinks on
/// very short curves so conditioning never rejects a valid scenario.
inline SimilarityCurve condition_curve(const SimilarityCurve& curve,
                                       double sigma, std::size_t radius) {
  const std::size_t max_radius = curve.length() - 1;
  const std::size_t r = std::min(radius, max_radius);
  if (r == 0) return curve;
  return gaussian_smooth(curve, sigma, r);
}

struct RunResult {
  Strategy strategy = Strategy::kFirstK;
  std::uint64_t seed = 0;
  SampleSet samples;
  GroundingOutcome grounding;
  std::optional<McsResult> mcs;  // present only for the mcs strategy
  double tsg_iou = 0.0;
  std::vector<double> per_frame_j;
  JfSummary jf;
  std::int64_t n_updates = 0;
};

/// End-to-end run: condition the curve, ground the moment, sample frames,
/// propagate masks with the mock tracker, and score against the ground
/// truth.
///
/// Strategies without an intrinsic center (firstk, uniform, random) anchor
/// propagation at their first sampled index; the others anchor at the moment
/// center. The propagation anchor is always added to the update checkpoints.
inline RunResult run_pipeline(const MaterializedScenario& scenario,
                              Strategy strategy, const PipelineParams& params,
                              std::uint64_t seed) {
  const auto horizon = static_cast<std::int64_t>(scenario.curve.length());
  if (horizon != scenario.config.horizon ||
      horizon != static_cast<std::int64_t>(scenario.gt_masks.size()))
    throw ValidationError("run_pipeline: scenario curve/mask lengths disagree");

  RunResult result;
  result.strategy = strategy;
  result.seed = seed;

  const SimilarityCurve curve =
      condition_curve(scenario.curve, params.smooth_sigma, params.smooth_radius);
  const std::int64_t window =
      params.window > 0 ? params.window : default_window(horizon);
  result.grounding = ground_curve(curve, window, params.theta);
  result.tsg_iou =
      interval_iou(result.grounding.predicted, scenario.config.gt_interval);
  const std::int64_t center = result.grounding.moment.center;

  switch (strategy) {
    case Strategy::kFirstK:
      result.samples = sample_first_k(horizon, params.k);
      break;
    case Strategy::kUniform:
      result.samples = sample_uniform(horizon, params.k);
      break;
    case Strategy::kRandom: {
      RngStream rng(seed, "random-sample");
      result.samples = sample_random(horizon, params.k, rng);
      break;
    }
    case Strategy::kTopK:
      result.samples = sample_top_k(curve, params.k);
      break;
    case Strategy::kNearbyK:
      result.samples = sample_nearby_k(curve, params.k, center);
      break;
    case Strategy::kMcs: {
      result.mcs = moment_centric_sample(curve, params.k, center, seed);
      result.samples = result.mcs->samples;
      break;
    }
  }

  const bool center_anchored = strategy == Strategy::kTopK ||
                               strategy == Strategy::kNearbyK ||
                               strategy == Strategy::kMcs;
  const std::int64_t start =
      center_anchored ? center : result.samples.indices.front();

  SampleSet anchors = result.samples;
  if (!anchors.contains(start)) {
    anchors.indices.push_back(start);
    std::sort(anchors.indices.begin(), anchors.indices.end());
  }

  MockTracker tracker(scenario.config.tracker, scenario.config.gt_interval,
                      scenario.gt_masks);
  const PropagationPlan plan = plan_bap(horizon, start, anchors);
  const BapResult bap = run_bap(plan, tracker, params.lambda);

  result.per_frame_j.resize(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t)
    result.per_frame_j[static_cast<std::size_t>(t)] =
        region_j(bap.masks[static_cast<std::size_t>(t)],
                 scenario.gt_masks[static_cast<std::size_t>(t)]);
  result.jf = jf_summary(bap.masks, scenario.gt_masks, params.boundary_tol);
  result.n_updates = bap.clear_count();
  return result;
}

}  // namespace tgs
