#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "tgs/errors.hpp"
#include "tgs/grounding.hpp"
#include "tgs/mask.hpp"
#include "tgs/sampling.hpp"

namespace tgs {

/// Decides whether to clear tracker memory at an anchor: clear exactly when
/// the cumulative tracking confidence has fallen below lambda times the
/// fresh prediction confidence.
inline bool memory_update_decision(double cum_track, double s_p, double lambda) {
  if (!(cum_track > 0.0) || cum_track > 1.0 || !std::isfinite(cum_track))
    throw ValidationError("memory_update_decision: cum_track must lie in (0, 1]");
  if (!(s_p >= 0.0) || s_p > 1.0)
    throw ValidationError("memory_update_decision: prediction score must lie in [0, 1]");
  if (!(lambda > 0.0) || lambda > 1.0)
    throw ValidationError("memory_update_decision: lambda must lie in (0, 1]");
  return cum_track < lambda * s_p;
}

/// Running product of tracking scores since the last memory clear.
struct UpdateRule {
  double lambda = 0.9;
  double cum_track = 1.0;

  bool should_clear(double s_p) const {
    return memory_update_decision(cum_track, s_p, lambda);
  }

  void absorb(double s_t) {
    const double clamped = std::clamp(s_t, 0.0, 1.0);
    // Floor keeps cum_track strictly positive even after a failed step.
    cum_track = std::max(cum_track * clamped, std::numeric_limits<double>::min());
  }

  void reset() { cum_track = 1.0; }
};

struct TrackStep {
  MaskFrame mask;
  double track_score = 0.0;  // S^t in [0, 1]
};

struct Prediction {
  MaskFrame mask;
  double predict_score = 0.0;  // S^p in [0, 1]
};

/// Abstract single-object tracker. init seeds the tracker at a frame, step
/// advances exactly one frame from the current state, predict queries a
/// fresh per-frame mask without touching tracking state.
class TrackerPort {
 public:
  virtual ~TrackerPort() = default;
  virtual void init(std::int64_t frame, const MaskFrame& seed) = 0;
  virtual TrackStep step(std::int64_t frame) = 0;
  virtual Prediction predict(std::int64_t frame) = 0;
};

/// Deterministic tracker stand-in driven by a synthetic ground truth.
///
/// Tracking score decays linearly with the distance d since the last init:
/// S^t = clamp(q0 - track_decay * d). When seeded with a non-empty mask, the
/// emitted mask keeps a clamp(1 - quality_decay * d) fraction of the ground
/// truth; an empty seed tracks nothing and emits empty masks. predict
/// returns the exact ground truth (score p_in) on target frames and an empty
/// mask (score p_out) elsewhere.
struct MockTrackerParams {
  double q0 = 0.98;
  double track_decay = 0.0;
  double quality_decay = 0.0;
  double p_in = 1.0;
  double p_out = 0.0;
};

class MockTracker final : public TrackerPort {
 public:
  MockTracker(const MockTrackerParams& params, FrameInterval target,
              const std::vector<MaskFrame>& gt_masks)
      : params_(params), target_(target), gt_(gt_masks) {
    if (!(params.q0 > 0.0) || params.q0 > 1.0)
      throw ValidationError("MockTracker: q0 must lie in (0, 1]");
    if (params.track_decay < 0.0 || params.quality_decay < 0.0)
      throw ValidationError("MockTracker: decay rates must be non-negative");
    if (params.p_in < 0.0 || params.p_in > 1.0 || params.p_out < 0.0 ||
        params.p_out > 1.0)
      throw ValidationError("MockTracker: anchor qualities must lie in [0, 1]");
    if (gt_.empty())
      throw ValidationError("MockTracker: ground-truth sequence must be non-empty");
    if (target.start > target.end)
      throw ValidationError("MockTracker: target interval start must not exceed end");
  }

  void init(std::int64_t frame, const MaskFrame& seed) override {
    check_frame(frame);
    distance_ = 0;
    seeded_ = !seed.empty_mask();
  }

  TrackStep step(std::int64_t frame) override {
    check_frame(frame);
    ++distance_;
    const double d = static_cast<double>(distance_);
    const double s_t = std::clamp(params_.q0 - params_.track_decay * d, 0.0, 1.0);
    if (!seeded_) return {blank(), s_t};
    const double quality =
        std::clamp(1.0 - params_.quality_decay * d, 0.0, 1.0);
    return {degraded(gt_[static_cast<std::size_t>(frame)], quality), s_t};
  }

  Prediction predict(std::int64_t frame) override {
    check_frame(frame);
    if (frame >= target_.start && frame <= target_.end)
      return {gt_[static_cast<std::size_t>(frame)], params_.p_in};
    return {blank(), params_.p_out};
  }

 private:
  void check_frame(std::int64_t frame) const {
    if (frame < 0 || frame >= static_cast<std::int64_t>(gt_.size()))
      throw ValidationError("MockTracker: frame out of range");
  }

  MaskFrame blank() const { return MaskFrame(gt_[0].height, gt_[0].width); }

  // Keeps the first round(quality * |gt|) set pixels in row-major order, so
  // region overlap against the ground truth equals `quality` up to pixel
  // quantization.
  static MaskFrame degraded(const MaskFrame& gt, double quality) {
    MaskFrame out(gt.height, gt.width);
    auto keep = static_cast<std::size_t>(
        std::llround(quality * static_cast<double>(gt.count())));
    for (std::size_t i = 0; i < gt.bits.size() && keep > 0; ++i) {
      if (gt.bits[i]) {
        out.bits[i] = 1;
        --keep;
      }
    }
    return out;
  }

  MockTrackerParams params_;
  FrameInterval target_;
  const std::vector<MaskFrame>& gt_;
  std::int64_t distance_ = 0;
  bool seeded_ = false;
};

/// Visit order for bidirectional propagation from an anchor frame, with the
/// update checkpoints baked in.
struct PropagationPlan {
  std::int64_t horizon = 0;
  std::int64_t anchor = 0;  // c*
  std::vector<std::int64_t> forward_order;   // c*+1 .. T-1
  std::vector<std::int64_t> backward_order;  // c*-1 .. 0
  std::vector<std::int64_t> anchor_set;      // sorted update checkpoints
};

inline PropagationPlan plan_bap(std::int64_t horizon, std::int64_t center,
                                const SampleSet& anchors) {
  if (horizon < 1) throw ValidationError("plan_bap: horizon must be positive");
  if (center < 0 || center >= horizon)
    throw ValidationError("plan_bap: anchor must lie in [0, T)");
  if (!anchors.contains(center))
    throw ValidationError("plan_bap: anchor set must contain the start anchor");
  for (std::int64_t i : anchors.indices)
    if (i < 0 || i >= horizon)
      throw ValidationError("plan_bap: anchor index out of range");

  PropagationPlan plan;
  plan.horizon = horizon;
  plan.anchor = center;
  for (std::int64_t f = center + 1; f < horizon; ++f)
    plan.forward_order.push_back(f);
  for (std::int64_t f = center - 1; f >= 0; --f)
    plan.backward_order.push_back(f);
  plan.anchor_set = anchors.indices;
  return plan;
}

enum class Pass { kForward, kBackward };

/// One Eq.-style gate evaluation at an anchor frame.
struct UpdateEvent {
  std::int64_t frame = 0;
  Pass pass = Pass::kForward;
  double cum_track = 0.0;      // value the decision saw
  double predict_score = 0.0;  // S^p at the anchor
  bool cleared = false;        // true -> memory cleared and tracker re-seeded
};

struct BapResult {
  std::vector<MaskFrame> masks;       // exactly one per frame
  std::vector<UpdateEvent> decisions;  // every anchor evaluation, in visit order

  std::int64_t clear_count() const {
    std::int64_t n = 0;
    for (const auto& e : decisions) n += e.cleared ? 1 : 0;
    return n;
  }
};

/// Runs bidirectional anchor-updated propagation.
///
/// Both passes start from a fresh init at the plan anchor with the predicted
/// mask there. Each visited frame is stepped once; at anchor frames the
/// update gate compares the tracking-score product accumulated since the
/// last clear (exclusive of the current step) against lambda * S^p, and on a
/// clear the tracker re-seeds from the fresh prediction and the product
/// resets to 1. A step failure yields an empty mask with S^t = 0, which
/// forces a clear at the next reachable anchor.
inline BapResult run_bap(const PropagationPlan& plan, TrackerPort& tracker,
                         double lambda) {
  if (!(lambda > 0.0) || lambda > 1.0)
    throw ValidationError("run_bap: lambda must lie in (0, 1]");

  BapResult result;
  result.masks.resize(static_cast<std::size_t>(plan.horizon));

  const Prediction seed = tracker.predict(plan.anchor);
  result.masks[static_cast<std::size_t>(plan.anchor)] = seed.mask;

  const auto is_anchor = [&](std::int64_t f) {
    return std::binary_search(plan.anchor_set.begin(), plan.anchor_set.end(), f);
  };

  const auto run_pass = [&](const std::vector<std::int64_t>& order, Pass pass) {
    tracker.init(plan.anchor, seed.mask);
    UpdateRule rule{lambda, 1.0};
    for (std::int64_t f : order) {
      MaskFrame mask(seed.mask.height, seed.mask.width);
      double s_t = 0.0;
      try {
        TrackStep out = tracker.step(f);
        mask = std::move(out.mask);
        s_t = out.track_score;
      } catch (const std::exception&) {
        // Failed step: empty mask, zero confidence.
      }
      result.masks[static_cast<std::size_t>(f)] = std::move(mask);
      if (is_anchor(f)) {
        const Prediction p = tracker.predict(f);
        const bool clear = rule.should_clear(p.predict_score);
        result.decisions.push_back(
            UpdateEvent{f, pass, rule.cum_track, p.predict_score, clear});
        if (clear) {
          tracker.init(f, p.mask);
          result.masks[static_cast<std::size_t>(f)] = p.mask;
          rule.reset();
        } else {
          rule.absorb(s_t);
        }
      } else {
        rule.absorb(s_t);
      }
    }
  };

  run_pass(plan.forward_order, Pass::kForward);
  run_pass(plan.backward_order, Pass::kBackward);
  return result;
}

/// Plain forward propagation from frame 0 with no anchor updates.
inline std::vector<MaskFrame> run_forward_baseline(std::int64_t horizon,
                                                   TrackerPort& tracker) {
  if (horizon < 1)
    throw ValidationError("run_forward_baseline: horizon must be positive");
  std::vector<MaskFrame> masks(static_cast<std::size_t>(horizon));
  const Prediction seed = tracker.predict(0);
  masks[0] = seed.mask;
  tracker.init(0, seed.mask);
  for (std::int64_t f = 1; f < horizon; ++f) {
    try {
      masks[static_cast<std::size_t>(f)] = tracker.step(f).mask;
    } catch (const std::exception&) {
      masks[static_cast<std::size_t>(f)] = MaskFrame(seed.mask.height, seed.mask.width);
    }
  }
  return masks;
}

}  // namespace tgs
