#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "tgs/sampling.hpp"

using namespace tgs;

namespace {

void check_sample_set(const SampleSet& s, std::int64_t horizon, std::int64_t k) {
  CHECK(std::is_sorted(s.indices.begin(), s.indices.end()));
  CHECK(std::adjacent_find(s.indices.begin(), s.indices.end()) == s.indices.end());
  CHECK(static_cast<std::int64_t>(s.indices.size()) == std::min(k, horizon));
  for (std::int64_t i : s.indices) {
    CHECK(i >= 0);
    CHECK(i < horizon);
  }
  if (s.center) CHECK(s.contains(*s.center));
}

SimilarityCurve random_curve(RngStream& rng, std::size_t len) {
  std::vector<double> v(len);
  for (double& x : v) x = rng.next_unit();
  return SimilarityCurve(std::move(v));
}

}  // namespace

TEST_CASE("sample_first_k takes the leading frames") {
  CHECK(sample_first_k(10, 3).indices == std::vector<std::int64_t>{0, 1, 2});
  CHECK(sample_first_k(2, 5).indices == std::vector<std::int64_t>{0, 1});
  CHECK(sample_first_k(1, 1).indices == std::vector<std::int64_t>{0});
}

TEST_CASE("sample_uniform spaces frames with half-up rounding") {
  CHECK(sample_uniform(10, 5).indices == std::vector<std::int64_t>{0, 2, 5, 7, 9});
  CHECK(sample_uniform(6, 6).indices == std::vector<std::int64_t>{0, 1, 2, 3, 4, 5});
  CHECK(sample_uniform(9, 1).indices == std::vector<std::int64_t>{4});
}

TEST_CASE("sample_uniform includes both endpoints for 2 <= K <= T") {
  for (std::int64_t horizon : {2, 3, 7, 50}) {
    for (std::int64_t k = 2; k <= horizon; ++k) {
      const auto s = sample_uniform(horizon, k);
      CHECK(s.indices.front() == 0);
      CHECK(s.indices.back() == horizon - 1);
      check_sample_set(s, horizon, k);
    }
  }
}

TEST_CASE("sample_random is deterministic per stream and exhaustive for K >= T") {
  RngStream a(7, "x");
  RngStream b(7, "x");
  CHECK(sample_random(20, 6, a).indices == sample_random(20, 6, b).indices);

  RngStream c(9, "y");
  const auto all = sample_random(5, 11, c);
  CHECK(all.indices == std::vector<std::int64_t>{0, 1, 2, 3, 4});
}

TEST_CASE("sample_random index frequencies match the binomial rate") {
  const std::int64_t horizon = 10;
  const std::int64_t k = 3;
  const int trials = 100000;
  std::vector<int> counts(horizon, 0);
  for (int t = 0; t < trials; ++t) {
    RngStream rng(static_cast<std::uint64_t>(t), "random-freq");
    for (std::int64_t i : sample_random(horizon, k, rng).indices)
      counts[static_cast<std::size_t>(i)]++;
  }
  const double p = static_cast<double>(k) / static_cast<double>(horizon);
  const double mean = trials * p;
  const double sigma = std::sqrt(trials * p * (1.0 - p));
  for (int c : counts) {
    CHECK(std::abs(c - mean) <= 3.0 * sigma);
  }
}

TEST_CASE("sample_top_k keeps the largest values with index tie-break") {
  const SimilarityCurve c({0.1, 0.9, 0.3, 0.9});
  CHECK(sample_top_k(c, 2).indices == std::vector<std::int64_t>{1, 3});

  const SimilarityCurve flat(std::vector<double>(6, 0.5));
  CHECK(sample_top_k(flat, 3).indices == std::vector<std::int64_t>{0, 1, 2});
  CHECK(sample_top_k(c, 9).indices == std::vector<std::int64_t>{0, 1, 2, 3});
}

TEST_CASE("sample_nearby_k centers a block and clips at the boundary") {
  const SimilarityCurve c(std::vector<double>(10, 0.5));
  CHECK(sample_nearby_k(c, 3, 5).indices == std::vector<std::int64_t>{4, 5, 6});
  CHECK(sample_nearby_k(c, 3, 0).indices == std::vector<std::int64_t>{0, 1, 2});
  CHECK(sample_nearby_k(c, 4, 5).indices == std::vector<std::int64_t>{3, 4, 5, 6});
  CHECK(sample_nearby_k(c, 12, 5).indices.size() == 10);
  CHECK(sample_nearby_k(c, 3, 9).indices == std::vector<std::int64_t>{7, 8, 9});
}

TEST_CASE("index_from_cdf picks the first index reaching u") {
  const std::vector<double> cdf{0.25, 0.5, 0.75, 1.0};
  CHECK(index_from_cdf(cdf, 0.1) == 0);
  CHECK(index_from_cdf(cdf, 0.6) == 2);
  CHECK(index_from_cdf(cdf, 1.0) == 3);
}

TEST_CASE("inverse_cdf_sample lands every draw on a single positive bin") {
  RngStream rng(13, "icdf-single");
  const auto idx = inverse_cdf_sample({0.0, 0.0, 3.0, 0.0}, 10, 50, rng);
  REQUIRE(idx.size() == 50);
  for (std::int64_t i : idx) CHECK(i == 12);
}

TEST_CASE("inverse_cdf_sample with k = range and uniform weights hits each index once") {
  for (std::int64_t n : {1, 2, 5, 16, 97}) {
    RngStream rng(static_cast<std::uint64_t>(n), "icdf-strata");
    const auto idx =
        inverse_cdf_sample(std::vector<double>(static_cast<std::size_t>(n), 1.0),
                           0, n, rng);
    REQUIRE(static_cast<std::int64_t>(idx.size()) == n);
    for (std::int64_t m = 0; m < n; ++m) CHECK(idx[static_cast<std::size_t>(m)] == m);
  }
}

TEST_CASE("inverse_cdf_sample rejects all-zero weights and never draws them") {
  RngStream rng(17, "icdf-zero");
  CHECK_THROWS_AS(inverse_cdf_sample({0.0, 0.0}, 0, 3, rng), DegenerateWeightsError);

  const auto idx = inverse_cdf_sample({0.25, 0.0, 0.75}, 0, 20000, rng);
  std::map<std::int64_t, int> counts;
  for (std::int64_t i : idx) counts[i]++;
  CHECK(counts.count(1) == 0);
  CHECK(counts[0] + counts[2] == 20000);
  // Stratified draws track the target split tightly.
  CHECK(std::abs(counts[0] - 5000) < 100);
}

TEST_CASE("moment_centric_sample allocates proportionally around the center") {
  const SimilarityCurve c({1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0});
  // Symmetric mass: 4 on each side of c* = 4.
  const auto r = moment_centric_sample(c, 5, 4, 99);
  CHECK(r.k_left == 2);
  CHECK(r.k_right == 2);
  CHECK(r.weight_left == doctest::Approx(4.0));
  CHECK(r.weight_right == doctest::Approx(4.0));
  check_sample_set(r.samples, 9, 5);
  CHECK(r.samples.contains(4));
  int left = 0;
  int right = 0;
  for (std::int64_t i : r.samples.indices) {
    left += i < 4 ? 1 : 0;
    right += i > 4 ? 1 : 0;
  }
  CHECK(left == 2);
  CHECK(right == 2);
}

TEST_CASE("moment_centric_sample with K = 1 returns only the center") {
  const SimilarityCurve c({0.2, 0.4, 0.9, 0.4, 0.2});
  const auto r = moment_centric_sample(c, 1, 2, 5);
  CHECK(r.samples.indices == std::vector<std::int64_t>{2});
}

TEST_CASE("moment_centric_sample falls back to uniform on a delta curve") {
  std::vector<double> v(9, 0.0);
  v[4] = 1.0;
  const auto r = moment_centric_sample(SimilarityCurve(v), 4, 4, 3);
  CHECK(r.degenerate_fallback);
  CHECK(r.samples.contains(4));
  check_sample_set(r.samples, 9, 4);
}

TEST_CASE("moment_centric_sample is deterministic in (curve, K, c*, seed)") {
  RngStream rng(61, "mcs-det");
  const auto c = random_curve(rng, 50);
  const auto a = moment_centric_sample(c, 9, 23, 42);
  const auto b = moment_centric_sample(c, 9, 23, 42);
  CHECK(a.samples.indices == b.samples.indices);
  const auto other = moment_centric_sample(c, 9, 23, 43);
  CHECK(a.samples.indices.size() == other.samples.indices.size());
}

TEST_CASE("moment_centric_sample structural fuzz") {
  RngStream rng(67, "mcs-fuzz");
  for (int trial = 0; trial < 1000; ++trial) {
    const auto horizon = static_cast<std::int64_t>(1 + rng.next_below(120));
    const auto k = static_cast<std::int64_t>(1 + rng.next_below(
        static_cast<std::uint64_t>(2 * horizon)));
    const auto center = static_cast<std::int64_t>(rng.next_below(
        static_cast<std::uint64_t>(horizon)));
    std::vector<double> v(static_cast<std::size_t>(horizon));
    for (double& x : v) x = rng.next_unit() < 0.2 ? 0.0 : rng.next_unit();
    const auto r = moment_centric_sample(SimilarityCurve(v), k, center,
                                         rng.next_u64());
    check_sample_set(r.samples, horizon, k);
    CHECK(r.samples.contains(center));
    if (!r.degenerate_fallback) {
      CHECK(r.k_left + r.k_right == k - 1);
      const double share = static_cast<double>(k - 1) * r.weight_left /
                           (r.weight_left + r.weight_right);
      CHECK(std::abs(static_cast<double>(r.k_left) - share) <= 0.5);
    }
  }
}

TEST_CASE("moment_centric_sample draws heavier frames more often") {
  // Two clearly separated weights on the same side of the center.
  std::vector<double> v(12, 0.05);
  v[2] = 0.8;   // heavy left index
  v[5] = 0.1;   // light left index
  v[11] = 0.6;  // some right mass
  const SimilarityCurve c(v);
  int heavy = 0;
  int light = 0;
  for (int rep = 0; rep < 10000; ++rep) {
    const auto r = moment_centric_sample(c, 4, 8, static_cast<std::uint64_t>(rep));
    heavy += r.samples.contains(2) ? 1 : 0;
    light += r.samples.contains(5) ? 1 : 0;
  }
  CHECK(heavy > light);
}

TEST_CASE("every strategy satisfies the sample-set contract under fuzz") {
  RngStream rng(71, "strategy-fuzz");
  for (int trial = 0; trial < 300; ++trial) {
    const auto horizon = static_cast<std::int64_t>(1 + rng.next_below(60));
    const auto k = static_cast<std::int64_t>(
        1 + rng.next_below(static_cast<std::uint64_t>(2 * horizon)));
    const auto c = random_curve(rng, static_cast<std::size_t>(horizon));
    const auto center =
        static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(horizon)));

    check_sample_set(sample_first_k(horizon, k), horizon, k);
    check_sample_set(sample_uniform(horizon, k), horizon, k);
    RngStream draw(rng.next_u64(), "fuzz-random");
    check_sample_set(sample_random(horizon, k, draw), horizon, k);
    check_sample_set(sample_top_k(c, k), horizon, k);
    check_sample_set(sample_nearby_k(c, k, center), horizon, k);
  }
}

TEST_CASE("sampling validates its inputs") {
  CHECK_THROWS_AS(sample_first_k(0, 1), ValidationError);
  CHECK_THROWS_AS(sample_uniform(5, 0), ValidationError);
  const SimilarityCurve c({0.5, 0.5});
  CHECK_THROWS_AS(sample_nearby_k(c, 1, 2), ValidationError);
  CHECK_THROWS_AS(moment_centric_sample(c, 1, -1, 0), ValidationError);
}
