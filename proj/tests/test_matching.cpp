#include <doctest.h>

#include <cmath>
#include <vector>

#include "tgs/matching.hpp"
#include "tgs/rng.hpp"

using namespace tgs;

namespace {

TokenMatrix single_pair_matrix(int label, double lambda_p) {
  TokenMatrix tm;
  tm.find_tokens = {{1.0, 0.0}};
  tm.frame_tokens = {{1.0, 0.0}};
  tm.labels = {{label}};
  tm.temperature = 1.0;
  tm.positive_weight = lambda_p;
  return tm;
}

// Random instance away from sigmoid saturation so finite differences stay
// well-conditioned.
TokenMatrix random_matrix(RngStream& rng) {
  TokenMatrix tm;
  const std::size_t n_find = 1 + rng.next_below(4);
  const std::size_t n_frames = 1 + rng.next_below(16);
  const std::size_t dim = 1 + rng.next_below(8);
  const auto token = [&] {
    std::vector<double> v(dim);
    double norm = 0.0;
    for (double& x : v) {
      x = rng.next_unit() * 2.0 - 1.0;
      norm += x * x;
    }
    if (norm < 1e-3) v[0] += 1.0;
    return v;
  };
  for (std::size_t i = 0; i < n_find; ++i) tm.find_tokens.push_back(token());
  for (std::size_t j = 0; j < n_frames; ++j) tm.frame_tokens.push_back(token());
  tm.labels.assign(n_find, std::vector<int>(n_frames, 0));
  for (auto& row : tm.labels)
    for (int& y : row) y = rng.next_unit() < 0.4 ? 1 : 0;
  tm.temperature = 0.2 + 1.3 * rng.next_unit();
  tm.positive_weight = 3.0 * rng.next_unit();
  if (rng.next_unit() < 0.5) {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n_find; ++i)
      for (std::size_t j = 0; j < n_frames; ++j)
        if (rng.next_unit() < 0.6) pairs.emplace_back(i, j);
    if (!pairs.empty()) tm.valid_pairs = std::move(pairs);
  }
  return tm;
}

double finite_difference(const std::vector<std::vector<double>>& logits,
                         const TokenMatrix& tm, std::size_t i, std::size_t j,
                         double step) {
  auto bumped = logits;
  bumped[i][j] = logits[i][j] + step;
  const double hi = find_loss(bumped, tm);
  bumped[i][j] = logits[i][j] - step;
  const double lo = find_loss(bumped, tm);
  return (hi - lo) / (2.0 * step);
}

}  // namespace

TEST_CASE("pool_frame_tokens averages each group") {
  const auto single = pool_frame_tokens({{{3.0, -1.0}}});
  CHECK(single == std::vector<std::vector<double>>{{3.0, -1.0}});

  const auto mean = pool_frame_tokens({{{0.0, 2.0}, {2.0, 0.0}}});
  CHECK(mean == std::vector<std::vector<double>>{{1.0, 1.0}});

  CHECK_THROWS_AS(pool_frame_tokens({{{1.0}}, {}}), ValidationError);
}

TEST_CASE("pool_frame_tokens matches a naive summation oracle") {
  RngStream rng(73, "matching-pool");
  std::vector<std::vector<std::vector<double>>> groups;
  for (int g = 0; g < 5; ++g) {
    std::vector<std::vector<double>> group;
    for (std::size_t v = 0; v < 1 + rng.next_below(6); ++v) {
      std::vector<double> vec(4);
      for (double& x : vec) x = rng.next_unit() * 10.0 - 5.0;
      group.push_back(std::move(vec));
    }
    groups.push_back(std::move(group));
  }
  const auto pooled = pool_frame_tokens(groups);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (std::size_t c = 0; c < 4; ++c) {
      double sum = 0.0;
      for (const auto& vec : groups[g]) sum += vec[c];
      CHECK(pooled[g][c] ==
            doctest::Approx(sum / static_cast<double>(groups[g].size()))
                .epsilon(1e-12));
    }
  }
}

TEST_CASE("similarity_matrix computes scaled cosines") {
  TokenMatrix tm;
  tm.find_tokens = {{2.0, 0.0}};
  tm.frame_tokens = {{2.0, 0.0}, {0.0, 5.0}};
  tm.labels = {{1, 0}};
  tm.temperature = 1.0;
  const auto logits = similarity_matrix(tm);
  CHECK(logits[0][0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(logits[0][1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("similarity_matrix matches the hand-computed worked value") {
  TokenMatrix tm;
  tm.find_tokens = {{1.0, 0.0}};
  tm.frame_tokens = {{1.0, 1.0}};
  tm.labels = {{1}};
  tm.temperature = 0.07;
  const auto logits = similarity_matrix(tm);
  CHECK(logits[0][0] ==
        doctest::Approx((1.0 / std::sqrt(2.0)) / 0.07).epsilon(1e-9));
}

TEST_CASE("similarity_matrix rejects zero-norm rows and bounds the logits") {
  TokenMatrix tm;
  tm.find_tokens = {{0.0, 0.0}};
  tm.frame_tokens = {{1.0, 0.0}};
  tm.labels = {{1}};
  CHECK_THROWS_AS(similarity_matrix(tm), ValidationError);

  RngStream rng(79, "matching-bounds");
  const auto random = random_matrix(rng);
  const auto logits = similarity_matrix(random);
  for (const auto& row : logits)
    for (double l : row) CHECK(std::abs(l) <= 1.0 / random.temperature + 1e-9);
}

TEST_CASE("cosine similarities are scale invariant") {
  RngStream rng(83, "matching-scale");
  TokenMatrix tm = random_matrix(rng);
  const auto before = similarity_matrix(tm);
  for (double& x : tm.find_tokens[0]) x *= 37.5;
  for (double& x : tm.frame_tokens[0]) x *= 0.004;
  const auto after = similarity_matrix(tm);
  for (std::size_t i = 0; i < before.size(); ++i)
    for (std::size_t j = 0; j < before[i].size(); ++j)
      CHECK(after[i][j] == doctest::Approx(before[i][j]).epsilon(1e-9));
}

TEST_CASE("find_loss closed forms at zero logit") {
  const auto positive = single_pair_matrix(1, 2.0);
  CHECK(find_loss({{0.0}}, positive) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));

  const auto negative = single_pair_matrix(0, 2.0);
  CHECK(find_loss({{0.0}}, negative) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("find_loss vanishes for perfectly separated logits") {
  TokenMatrix tm;
  tm.find_tokens = {{1.0}};
  tm.frame_tokens = {{1.0}, {1.0}};
  tm.labels = {{1, 0}};
  tm.positive_weight = 2.0;
  CHECK(find_loss({{40.0, -40.0}}, tm) < 1e-10);
}

TEST_CASE("find_loss is non-negative and respects omega") {
  RngStream rng(89, "matching-loss");
  for (int trial = 0; trial < 50; ++trial) {
    const auto tm = random_matrix(rng);
    const auto logits = similarity_matrix(tm);
    CHECK(find_loss(logits, tm) >= 0.0);
  }

  TokenMatrix tm = single_pair_matrix(1, 2.0);
  tm.valid_pairs = std::vector<std::pair<std::size_t, std::size_t>>{};
  CHECK_THROWS_AS(find_loss({{0.0}}, tm), ValidationError);
}

TEST_CASE("loss moves the right way when a logit moves") {
  TokenMatrix tm;
  tm.find_tokens = {{1.0}};
  tm.frame_tokens = {{1.0}, {1.0}};
  tm.labels = {{1, 0}};
  for (double delta : {0.1, 0.5, 2.0}) {
    // Raising a positive-pair logit cannot increase the loss.
    CHECK(find_loss({{1.0 + delta, 0.0}}, tm) <= find_loss({{1.0, 0.0}}, tm));
    // Raising a negative-pair logit cannot decrease it.
    CHECK(find_loss({{1.0, 0.0 + delta}}, tm) >= find_loss({{1.0, 0.0}}, tm));
  }
}

TEST_CASE("find_loss_grad closed forms at zero logit") {
  const auto positive = single_pair_matrix(1, 2.0);
  CHECK(find_loss_grad({{0.0}}, positive)[0][0] ==
        doctest::Approx(-1.0).epsilon(1e-12));

  const auto negative = single_pair_matrix(0, 2.0);
  CHECK(find_loss_grad({{0.0}}, negative)[0][0] ==
        doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("find_loss_grad is zero outside omega") {
  TokenMatrix tm;
  tm.find_tokens = {{1.0}};
  tm.frame_tokens = {{1.0}, {2.0}};
  tm.labels = {{1, 1}};
  tm.valid_pairs = std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}};
  const auto grad = find_loss_grad({{0.3, 0.7}}, tm);
  CHECK(grad[0][0] != 0.0);
  CHECK(grad[0][1] == 0.0);
}

TEST_CASE("analytic gradient matches central finite differences") {
  RngStream rng(97, "matching-grad");
  for (int trial = 0; trial < 20; ++trial) {
    const auto tm = random_matrix(rng);
    const auto logits = similarity_matrix(tm);
    const auto grad = find_loss_grad(logits, tm);
    for (std::size_t i = 0; i < tm.num_find(); ++i) {
      for (std::size_t j = 0; j < tm.num_frames(); ++j) {
        const double fd = finite_difference(logits, tm, i, j, 1e-5);
        const double denom = std::max({std::abs(fd), std::abs(grad[i][j]), 1e-10});
        CHECK(std::abs(fd - grad[i][j]) / denom < 1e-4);
      }
    }
  }
}

TEST_CASE("inference_scores returns the requested similarity row") {
  TokenMatrix tm;
  tm.find_tokens = {{0.5, 0.5}};
  tm.frame_tokens = {{0.5, 0.5}};
  tm.labels = {{1}};
  tm.temperature = 0.07;
  const auto row = inference_scores(tm, 0);
  REQUIRE(row.length() == 1);
  CHECK(row.values[0] == doctest::Approx(1.0 / 0.07).epsilon(1e-12));
}

TEST_CASE("inference_scores matches a naive dot-product oracle") {
  RngStream rng(101, "matching-scores");
  TokenMatrix tm;
  tm.find_tokens = {{0.3, -0.7, 0.2}};
  for (int j = 0; j < 4; ++j) {
    std::vector<double> v(3);
    for (double& x : v) x = rng.next_unit() * 2.0 - 1.0;
    v[0] += 1.5;
    tm.frame_tokens.push_back(v);
  }
  tm.labels = {{0, 0, 0, 0}};
  tm.temperature = 0.07;

  const auto row = inference_scores(tm, 0);
  const auto matrix = similarity_matrix(tm);
  for (std::size_t j = 0; j < 4; ++j) {
    CHECK(row.values[j] == matrix[0][j]);
    double dot = 0.0;
    double nf = 0.0;
    double nv = 0.0;
    for (std::size_t c = 0; c < 3; ++c) {
      dot += tm.find_tokens[0][c] * tm.frame_tokens[j][c];
      nf += tm.find_tokens[0][c] * tm.find_tokens[0][c];
      nv += tm.frame_tokens[j][c] * tm.frame_tokens[j][c];
    }
    const double expected = dot / (std::sqrt(nf) * std::sqrt(nv) * 0.07);
    CHECK(row.values[j] == doctest::Approx(expected).epsilon(1e-10));
  }

  CHECK_THROWS_AS(inference_scores(tm, 1), ValidationError);
}
