#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tgs/curve.hpp"
#include "tgs/errors.hpp"

namespace tgs {

/// Query/frame token bundle for the similarity-matching loss.
///
/// find_tokens is N_f x C, frame_tokens is L_t x C, labels is N_f x L_t with
/// entries in {0, 1}. valid_pairs restricts the loss to a subset of the grid;
/// nullopt means every (i, j) pair counts.
struct TokenMatrix {
  std::vector<std::vector<double>> find_tokens;
  std::vector<std::vector<double>> frame_tokens;
  std::vector<std::vector<int>> labels;
  std::optional<std::vector<std::pair<std::size_t, std::size_t>>> valid_pairs;
  double temperature = 0.07;
  double positive_weight = 2.0;

  std::size_t num_find() const { return find_tokens.size(); }
  std::size_t num_frames() const { return frame_tokens.size(); }
};

namespace detail {

inline double row_norm(const std::vector<double>& row) {
  double s = 0.0;
  for (double x : row) s += x * x;
  return std::sqrt(s);
}

inline void check_token_rows(const std::vector<std::vector<double>>& rows,
                             std::size_t dim, const char* what) {
  for (const auto& row : rows) {
    if (row.size() != dim)
      throw ValidationError(std::string(what) + ": inconsistent token dimension");
    for (double x : row)
      if (!std::isfinite(x))
        throw ValidationError(std::string(what) + ": non-finite token entry");
    if (!(row_norm(row) > 0.0))
      throw ValidationError(std::string(what) + ": zero-norm token row");
  }
}

}  // namespace detail

inline void validate_token_matrix(const TokenMatrix& tm) {
  if (tm.find_tokens.empty() || tm.frame_tokens.empty())
    throw ValidationError("TokenMatrix: token matrices must be non-empty");
  const std::size_t dim = tm.find_tokens.front().size();
  if (dim == 0) throw ValidationError("TokenMatrix: token dimension must be positive");
  detail::check_token_rows(tm.find_tokens, dim, "TokenMatrix find tokens");
  detail::check_token_rows(tm.frame_tokens, dim, "TokenMatrix frame tokens");
  if (!(tm.temperature > 0.0))
    throw ValidationError("TokenMatrix: temperature must be positive");
  if (tm.positive_weight < 0.0)
    throw ValidationError("TokenMatrix: positive weight must be non-negative");
  if (tm.labels.size() != tm.num_find())
    throw ValidationError("TokenMatrix: labels must have one row per find token");
  for (const auto& row : tm.labels) {
    if (row.size() != tm.num_frames())
      throw ValidationError("TokenMatrix: labels must have one column per frame");
    for (int y : row)
      if (y != 0 && y != 1)
        throw ValidationError("TokenMatrix: labels must be 0 or 1");
  }
  if (tm.valid_pairs) {
    if (tm.valid_pairs->empty())
      throw ValidationError("TokenMatrix: valid-pair set must be non-empty");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (const auto& [i, j] : *tm.valid_pairs) {
      if (i >= tm.num_find() || j >= tm.num_frames())
        throw ValidationError("TokenMatrix: valid pair out of range");
      if (!seen.insert({i, j}).second)
        throw ValidationError("TokenMatrix: duplicate valid pair");
    }
  }
}

/// Per-frame token groups averaged into one row per frame.
inline std::vector<std::vector<double>> pool_frame_tokens(
    const std::vector<std::vector<std::vector<double>>>& groups) {
  if (groups.empty())
    throw ValidationError("pool_frame_tokens: group list must be non-empty");
  std::vector<std::vector<double>> out;
  out.reserve(groups.size());
  std::size_t dim = 0;
  for (const auto& group : groups) {
    if (group.empty())
      throw ValidationError("pool_frame_tokens: every group must be non-empty");
    if (dim == 0) dim = group.front().size();
    std::vector<double> mean(dim, 0.0);
    for (const auto& vec : group) {
      if (vec.size() != dim)
        throw ValidationError("pool_frame_tokens: inconsistent vector dimension");
      for (std::size_t c = 0; c < dim; ++c) mean[c] += vec[c];
    }
    for (double& x : mean) x /= static_cast<double>(group.size());
    out.push_back(std::move(mean));
  }
  return out;
}

/// Temperature-scaled cosine similarities between every find token and every
/// frame token: l_ij = cos(f_i, v_j) / tau.
inline std::vector<std::vector<double>> similarity_matrix(const TokenMatrix& tm) {
  validate_token_matrix(tm);
  std::vector<double> find_norms(tm.num_find());
  std::vector<double> frame_norms(tm.num_frames());
  for (std::size_t i = 0; i < tm.num_find(); ++i)
    find_norms[i] = detail::row_norm(tm.find_tokens[i]);
  for (std::size_t j = 0; j < tm.num_frames(); ++j)
    frame_norms[j] = detail::row_norm(tm.frame_tokens[j]);

  std::vector<std::vector<double>> logits(
      tm.num_find(), std::vector<double>(tm.num_frames(), 0.0));
  for (std::size_t i = 0; i < tm.num_find(); ++i) {
    for (std::size_t j = 0; j < tm.num_frames(); ++j) {
      double dot = 0.0;
      for (std::size_t c = 0; c < tm.find_tokens[i].size(); ++c)
        dot += tm.find_tokens[i][c] * tm.frame_tokens[j][c];
      logits[i][j] = dot / (find_norms[i] * frame_norms[j] * tm.temperature);
    }
  }
  return logits;
}

namespace detail {

inline void for_each_valid_pair(const TokenMatrix& tm, auto&& fn) {
  if (tm.valid_pairs) {
    for (const auto& [i, j] : *tm.valid_pairs) fn(i, j);
  } else {
    for (std::size_t i = 0; i < tm.num_find(); ++i)
      for (std::size_t j = 0; j < tm.num_frames(); ++j) fn(i, j);
  }
}

inline std::size_t valid_pair_count(const TokenMatrix& tm) {
  return tm.valid_pairs ? tm.valid_pairs->size()
                        : tm.num_find() * tm.num_frames();
}

inline void check_logit_shape(const std::vector<std::vector<double>>& logits,
                              const TokenMatrix& tm) {
  if (logits.size() != tm.num_find())
    throw ValidationError("find_loss: logit row count mismatch");
  for (const auto& row : logits)
    if (row.size() != tm.num_frames())
      throw ValidationError("find_loss: logit column count mismatch");
}

inline constexpr double kLogFloor = 1e-12;

}  // namespace detail

/// Weighted binary cross-entropy over the valid pairs:
/// mean of [-lambda_p * y * log(sigmoid(l)) - (1-y) * log(1 - sigmoid(l))],
/// with log arguments floored at 1e-12.
inline double find_loss(const std::vector<std::vector<double>>& logits,
                        const TokenMatrix& tm) {
  validate_token_matrix(tm);
  detail::check_logit_shape(logits, tm);
  double total = 0.0;
  detail::for_each_valid_pair(tm, [&](std::size_t i, std::size_t j) {
    const double s = sigmoid(logits[i][j]);
    if (tm.labels[i][j] == 1)
      total += -tm.positive_weight * std::log(std::max(s, detail::kLogFloor));
    else
      total += -std::log(std::max(1.0 - s, detail::kLogFloor));
  });
  return total / static_cast<double>(detail::valid_pair_count(tm));
}

/// Analytic dL/dl for find_loss; zero outside the valid-pair set.
inline std::vector<std::vector<double>> find_loss_grad(
    const std::vector<std::vector<double>>& logits, const TokenMatrix& tm) {
  validate_token_matrix(tm);
  detail::check_logit_shape(logits, tm);
  const double count = static_cast<double>(detail::valid_pair_count(tm));
  std::vector<std::vector<double>> grad(
      tm.num_find(), std::vector<double>(tm.num_frames(), 0.0));
  detail::for_each_valid_pair(tm, [&](std::size_t i, std::size_t j) {
    const double s = sigmoid(logits[i][j]);
    const double y = static_cast<double>(tm.labels[i][j]);
    grad[i][j] = (tm.positive_weight * y * (s - 1.0) + (1.0 - y) * s) / count;
  });
  return grad;
}

/// Similarity row for a single find token, as the raw score curve consumed by
/// the curve module (resample to T, activate, smooth).
inline RawScoreCurve inference_scores(const TokenMatrix& tm,
                                      std::size_t find_row) {
  if (find_row >= tm.num_find())
    throw ValidationError("inference_scores: find row out of range");
  return RawScoreCurve(similarity_matrix(tm)[find_row]);
}

}  // namespace tgs
