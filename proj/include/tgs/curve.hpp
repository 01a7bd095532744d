#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "tgs/errors.hpp"

namespace tgs {

/// Pre-activation per-frame scores (unbounded logits).
struct RawScoreCurve {
  std::vector<double> values;

  explicit RawScoreCurve(std::vector<double> v) : values(std::move(v)) {
    if (values.empty())
      throw ValidationError("RawScoreCurve: length must be positive");
    for (double x : values)
      if (!std::isfinite(x))
        throw ValidationError("RawScoreCurve: values must be finite");
  }

  std::size_t length() const { return values.size(); }
};

/// Per-frame relevance scores, each in [0, 1].
struct SimilarityCurve {
  std::vector<double> values;

  explicit SimilarityCurve(std::vector<double> v) : values(std::move(v)) {
    if (values.empty())
      throw ValidationError("SimilarityCurve: length must be positive");
    for (double x : values)
      if (!std::isfinite(x) || x < 0.0 || x > 1.0)
        throw ValidationError("SimilarityCurve: values must lie in [0, 1]");
  }

  std::size_t length() const { return values.size(); }
};

inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

/// Maps raw logits to [0, 1] scores via the logistic function.
inline SimilarityCurve activate(const RawScoreCurve& raw) {
  std::vector<double> out(raw.values.size());
  std::transform(raw.values.begin(), raw.values.end(), out.begin(), sigmoid);
  return SimilarityCurve(std::move(out));
}

/// Smooths with a normalized discrete Gaussian kernel of half-width `radius`.
///
/// Boundaries use half-sample symmetric reflection; a constant curve passes
/// through unchanged and outputs never leave [min(input), max(input)].
inline SimilarityCurve gaussian_smooth(const SimilarityCurve& curve,
                                       double sigma = 1.0,
                                       std::size_t radius = 3) {
  const std::size_t n = curve.length();
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ValidationError("gaussian_smooth: sigma must be positive");
  if (radius == 0)
    throw ValidationError("gaussian_smooth: radius must be positive");
  if (radius >= n)
    throw ValidationError("gaussian_smooth: radius must be smaller than the curve length");

  std::vector<double> kernel(2 * radius + 1);
  double kernel_sum = 0.0;
  for (std::size_t t = 0; t < kernel.size(); ++t) {
    const double k = static_cast<double>(t) - static_cast<double>(radius);
    kernel[t] = std::exp(-(k * k) / (2.0 * sigma * sigma));
    kernel_sum += kernel[t];
  }
  for (double& w : kernel) w /= kernel_sum;

  const auto [mn_it, mx_it] =
      std::minmax_element(curve.values.begin(), curve.values.end());
  const double lo = *mn_it;
  const double hi = *mx_it;

  // radius < n guarantees a single reflection stays in range.
  const auto reflect = [n](std::ptrdiff_t i) -> std::size_t {
    if (i < 0) return static_cast<std::size_t>(-i - 1);
    if (i >= static_cast<std::ptrdiff_t>(n))
      return 2 * n - static_cast<std::size_t>(i) - 1;
    return static_cast<std::size_t>(i);
  };

  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < kernel.size(); ++t) {
      const std::ptrdiff_t src = static_cast<std::ptrdiff_t>(i) +
                                 static_cast<std::ptrdiff_t>(t) -
                                 static_cast<std::ptrdiff_t>(radius);
      acc += kernel[t] * curve.values[reflect(src)];
    }
    out[i] = std::clamp(acc, lo, hi);
  }
  return SimilarityCurve(std::move(out));
}

/// Align-corners linear resampling of a value sequence.
///
/// Output position j maps to source coordinate j*(L-1)/(target_len-1);
/// endpoints are preserved exactly and a target length of 1 takes the
/// source midpoint by index.
inline std::vector<double> resample_values(const std::vector<double>& src,
                                           std::size_t target_len) {
  if (src.empty())
    throw ValidationError("resample_values: source must be non-empty");
  if (target_len == 0)
    throw ValidationError("resample_values: target length must be positive");
  if (target_len == 1) return {src[(src.size() - 1) / 2]};
  if (src.size() == 1) return std::vector<double>(target_len, src[0]);

  const std::size_t last = src.size() - 1;
  std::vector<double> out(target_len);
  out.front() = src.front();
  out.back() = src.back();
  for (std::size_t j = 1; j + 1 < target_len; ++j) {
    const double x = static_cast<double>(j) * static_cast<double>(last) /
                     static_cast<double>(target_len - 1);
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= last) i = last - 1;
    out[j] = std::lerp(src[i], src[i + 1], x - static_cast<double>(i));
  }
  return out;
}

inline RawScoreCurve resample_linear(const RawScoreCurve& curve,
                                     std::size_t target_len) {
  return RawScoreCurve(resample_values(curve.values, target_len));
}

inline SimilarityCurve resample_linear(const SimilarityCurve& curve,
                                       std::size_t target_len) {
  return SimilarityCurve(resample_values(curve.values, target_len));
}

/// Normalizes non-negative weights into a probability vector p_i = v_i / sum.
///
/// Throws DegenerateWeightsError on an all-zero input so the caller can pick
/// its own fallback.
inline std::vector<double> normalize_weights(const std::vector<double>& values) {
  if (values.empty())
    throw ValidationError("normalize_weights: input must be non-empty");
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0)
      throw ValidationError("normalize_weights: weights must be finite and non-negative");
    sum += v;
  }
  if (sum <= 0.0)
    throw DegenerateWeightsError("normalize_weights: all weights are zero");
  std::vector<double> out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] / sum;
  return out;
}

}  // namespace tgs
