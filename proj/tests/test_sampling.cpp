#include <doctest.h>

#include <cmath>
#include <vector>

#include "drofa/sampling.hpp"

using namespace drofa;

TEST_CASE("weighted sampling from a point mass") {
  MixtureWeights e1 = validate_mixture({1.0, 0.0, 0.0});
  RngStream rng(1, StreamPurpose::device_select, 0);
  for (std::size_t id : sample_clients_weighted(e1, 20, rng)) CHECK(id == 0);

  MixtureWeights single = validate_mixture({1.0});
  RngStream rng2(1, StreamPurpose::device_select, 1);
  for (std::size_t id : sample_clients_weighted(single, 5, rng2)) CHECK(id == 0);
}

TEST_CASE("weighted sampling frequencies, uniform N=4") {
  const std::size_t trials = 1000000;
  MixtureWeights lam = uniform_mixture(4);
  RngStream rng(7, StreamPurpose::device_select, 0);
  auto draws = sample_clients_weighted(lam, trials, rng);
  std::vector<long> counts(4, 0);
  for (auto id : draws) counts[id]++;
  double sigma = std::sqrt(trials * 0.25 * 0.75);
  for (int i = 0; i < 4; ++i)
    CHECK(std::abs(counts[i] - trials * 0.25) < 3.0 * sigma);
}

TEST_CASE("uniform sampling frequencies and N=1") {
  RngStream rng1(3, StreamPurpose::uniform_select, 0);
  for (auto id : sample_clients_uniform(1, 10, rng1)) CHECK(id == 0);

  const std::size_t trials = 1000000;
  RngStream rng(5, StreamPurpose::uniform_select, 1);
  auto draws = sample_clients_uniform(5, trials, rng);
  std::vector<long> counts(5, 0);
  for (auto id : draws) counts[id]++;
  double p = 0.2, sigma = std::sqrt(trials * p * (1 - p));
  for (int i = 0; i < 5; ++i)
    CHECK(std::abs(counts[i] - trials * p) < 3.0 * sigma);
}

TEST_CASE("snapshot step distribution") {
  RngStream r1(9, StreamPurpose::snapshot, 0);
  for (int t = 0; t < 50; ++t) CHECK(sample_snapshot_step(1, r1) == 1);

  const int trials = 1000000;
  RngStream rng(9, StreamPurpose::snapshot, 1);
  std::vector<long> counts(5, 0);
  for (int t = 0; t < trials; ++t) {
    std::size_t k = sample_snapshot_step(4, rng);
    CHECK(k >= 1);
    CHECK(k <= 4);
    counts[k]++;
  }
  double sigma = std::sqrt(trials * 0.25 * 0.75);
  for (int k = 1; k <= 4; ++k)
    CHECK(std::abs(counts[k] - trials * 0.25) < 3.0 * sigma);
}

TEST_CASE("minibatch draws") {
  ClientShard one;
  one.features = {{1.0}};
  one.labels = {0.0};
  RngStream rng(2, StreamPurpose::minibatch, 0, 0);
  for (auto idx : draw_minibatch(one, 7, rng)) CHECK(idx == 0);

  // determinism: identical stream state => identical batch
  ClientShard shard;
  for (int i = 0; i < 50; ++i) {
    shard.features.push_back({double(i)});
    shard.labels.push_back(0.0);
  }
  RngStream a(4, StreamPurpose::minibatch, 3, 2);
  RngStream b(4, StreamPurpose::minibatch, 3, 2);
  CHECK(draw_minibatch(shard, 16, a) == draw_minibatch(shard, 16, b));
}

TEST_CASE("expected distinct count for b = n with replacement") {
  ClientShard shard;
  const std::size_t n = 20;
  for (std::size_t i = 0; i < n; ++i) {
    shard.features.push_back({0.0});
    shard.labels.push_back(0.0);
  }
  const int trials = 20000;
  double total_distinct = 0.0;
  for (int t = 0; t < trials; ++t) {
    RngStream rng(13, StreamPurpose::minibatch, t, 0);
    auto batch = draw_minibatch(shard, n, rng);
    std::vector<bool> seen(n, false);
    int distinct = 0;
    for (auto idx : batch)
      if (!seen[idx]) {
        seen[idx] = true;
        distinct++;
      }
    total_distinct += distinct;
  }
  double expected = n * (1.0 - std::pow(1.0 - 1.0 / n, double(n)));
  CHECK(std::abs(total_distinct / trials - expected) < 0.1);
}

TEST_CASE("weighted selection is unbiased for a fixed gradient table") {
  // MC mean of (1/m) sum_{i in D} g_i approaches sum_i lambda_i g_i
  MixtureWeights lam = validate_mixture({0.5, 0.2, 0.2, 0.1});
  Vec g = {3.0, -1.0, 0.5, 10.0};
  const int resamples = 200000;
  const std::size_t m = 4;
  double mc_sum = 0.0, mc_sq = 0.0;
  for (int t = 0; t < resamples; ++t) {
    RngStream rng(21, StreamPurpose::device_select, t);
    auto ids = sample_clients_weighted(lam, m, rng);
    double est = 0.0;
    for (auto id : ids) est += g[id];
    est /= double(m);
    mc_sum += est;
    mc_sq += est * est;
  }
  double mean = mc_sum / resamples;
  double var = mc_sq / resamples - mean * mean;
  double se = std::sqrt(var / resamples);
  double truth = 0.5 * 3.0 + 0.2 * -1.0 + 0.2 * 0.5 + 0.1 * 10.0;
  CHECK(std::abs(mean - truth) < 3.0 * se + 1e-12);
}

TEST_CASE("streams keyed by client are order independent") {
  std::vector<std::vector<std::size_t>> forward, backward;
  ClientShard shard;
  for (int i = 0; i < 10; ++i) {
    shard.features.push_back({0.0});
    shard.labels.push_back(0.0);
  }
  for (int c = 0; c < 6; ++c) {
    RngStream rng(77, StreamPurpose::minibatch, 5, c);
    forward.push_back(draw_minibatch(shard, 8, rng));
  }
  for (int c = 5; c >= 0; --c) {
    RngStream rng(77, StreamPurpose::minibatch, 5, c);
    backward.insert(backward.begin(), draw_minibatch(shard, 8, rng));
  }
  CHECK(forward == backward);
}

TEST_CASE("distinct stream keys decorrelate purposes and rounds") {
  RngStream a(42, StreamPurpose::device_select, 0);
  RngStream b(42, StreamPurpose::uniform_select, 0);
  RngStream c(42, StreamPurpose::device_select, 1);
  CHECK(a.key() != b.key());
  CHECK(a.key() != c.key());
  CHECK(a.next_u64() != b.next_u64());
}
