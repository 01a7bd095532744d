#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "tgs/curve.hpp"
#include "tgs/errors.hpp"
#include "tgs/grounding.hpp"
#include "tgs/mask.hpp"
#include "tgs/propagation.hpp"
#include "tgs/rng.hpp"

namespace tgs {

struct GaussianBump {
  double center = 0.0;
  double width = 1.0;
  double amplitude = 0.0;
};

struct CurveModel {
  std::vector<GaussianBump> bumps;
  double noise_sigma = 0.0;
};

/// Ground-truth mask spec: a rectangle of rect_h x rect_w pixels moving at
/// (vx, vy) pixels per frame from (x0, y0), clamped to the grid. The
/// rectangle exists only on frames inside the target interval.
struct MaskGeometry {
  std::size_t grid_h = 16;
  std::size_t grid_w = 16;
  std::size_t rect_h = 4;
  std::size_t rect_w = 4;
  double x0 = 0.0;
  double y0 = 0.0;
  double vx = 0.0;
  double vy = 0.0;
};

/// Full synthetic configuration: one scenario pins the curve, the ground
/// truth masks, and the tracker behaviour for a run.
struct Scenario {
  std::int64_t horizon = 0;
  FrameInterval gt_interval;
  CurveModel curve_model;
  MockTrackerParams tracker;
  MaskGeometry mask_geometry;
  std::uint64_t seed = 0;
};

struct MaterializedScenario {
  Scenario config;
  SimilarityCurve curve;
  std::vector<MaskFrame> gt_masks;
};

inline void validate_scenario(const Scenario& cfg) {
  if (cfg.horizon < 1)
    throw ValidationError("Scenario: horizon must be positive");
  if (cfg.gt_interval.start < 0 || cfg.gt_interval.start > cfg.gt_interval.end ||
      cfg.gt_interval.end >= cfg.horizon)
    throw ValidationError("Scenario: gt interval must satisfy 0 <= start <= end < T");
  for (const auto& b : cfg.curve_model.bumps) {
    if (!(b.width > 0.0))
      throw ValidationError("Scenario: bump width must be positive");
    if (b.amplitude < 0.0)
      throw ValidationError("Scenario: bump amplitude must be non-negative");
  }
  if (cfg.curve_model.noise_sigma < 0.0)
    throw ValidationError("Scenario: noise sigma must be non-negative");
  const auto& g = cfg.mask_geometry;
  if (g.grid_h == 0 || g.grid_w == 0 || g.rect_h == 0 || g.rect_w == 0)
    throw ValidationError("Scenario: grid and rectangle dimensions must be positive");
  if (g.rect_h > g.grid_h || g.rect_w > g.grid_w)
    throw ValidationError("Scenario: rectangle must fit inside the grid");
}

/// Materializes the similarity curve (bumps + clamped Gaussian noise) and the
/// per-frame ground-truth masks. Deterministic in (config, seed).
inline MaterializedScenario gen_scenario(const Scenario& cfg) {
  validate_scenario(cfg);

  RngStream noise(cfg.seed, "curve-noise");
  std::vector<double> values(static_cast<std::size_t>(cfg.horizon), 0.0);
  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    double v = 0.0;
    for (const auto& b : cfg.curve_model.bumps) {
      const double d = static_cast<double>(t) - b.center;
      v += b.amplitude * std::exp(-(d * d) / (2.0 * b.width * b.width));
    }
    if (cfg.curve_model.noise_sigma > 0.0)
      v += cfg.curve_model.noise_sigma * noise.next_gaussian();
    values[static_cast<std::size_t>(t)] = std::clamp(v, 0.0, 1.0);
  }

  const auto& g = cfg.mask_geometry;
  std::vector<MaskFrame> masks;
  masks.reserve(static_cast<std::size_t>(cfg.horizon));
  for (std::int64_t t = 0; t < cfg.horizon; ++t) {
    MaskFrame m(g.grid_h, g.grid_w);
    if (t >= cfg.gt_interval.start && t <= cfg.gt_interval.end) {
      const double steps = static_cast<double>(t - cfg.gt_interval.start);
      const auto max_x = static_cast<std::int64_t>(g.grid_w - g.rect_w);
      const auto max_y = static_cast<std::int64_t>(g.grid_h - g.rect_h);
      const std::int64_t px = std::clamp<std::int64_t>(
          std::llround(g.x0 + g.vx * steps), 0, max_x);
      const std::int64_t py = std::clamp<std::int64_t>(
          std::llround(g.y0 + g.vy * steps), 0, max_y);
      for (std::size_t r = 0; r < g.rect_h; ++r)
        for (std::size_t c = 0; c < g.rect_w; ++c)
          m.set(static_cast<std::size_t>(py) + r,
                static_cast<std::size_t>(px) + c, true);
    }
    masks.push_back(std::move(m));
  }

  return MaterializedScenario{cfg, SimilarityCurve(std::move(values)),
                              std::move(masks)};
}

}  // namespace tgs
