// Copyright 2026 The seqrec Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "seqrec/sampling.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>

#include "doctest.h"
#include "seqrec/error.h"
#include "test_util.h"

namespace seqrec {
namespace {

UserSequence Iota(size_t n, UserIndex user = 0) {
  UserSequence s{user, std::vector<ItemIndex>(n)};
  std::iota(s.items.begin(), s.items.end(), 0);
  return s;
}

std::vector<double> ExponentialProbabilities(double alpha, size_t n) {
  auto f = ExponentialRecency(alpha);
  std::vector<double> logw(n);
  for (size_t k = 0; k < n; ++k) logw[k] = f(n, k);
  return ProbabilitiesFromLogWeights(logw);
}

TEST_CASE("recency weights") {
  CHECK(RecencyWeight(1.0, 7, 0) == 1.0);
  CHECK(RecencyWeight(1.0, 7, 6) == 1.0);
  CHECK(RecencyWeight(0.5, 4, 3) == doctest::Approx(0.5));
  CHECK(RecencyWeight(0.5, 4, 0) == doctest::Approx(0.0625));
  CHECK_THROWS_AS(RecencyWeight(0.0, 4, 0), Error);
  CHECK_THROWS_AS(RecencyWeight(1.5, 4, 0), Error);
  CHECK_THROWS_AS(RecencyWeight(0.5, 4, 4), Error);
  auto lin = LinearRecency();
  CHECK(std::exp(lin(5, 0)) == doctest::Approx(1.0));
  CHECK(std::exp(lin(5, 4)) == doctest::Approx(5.0));
}

TEST_CASE("target probabilities") {
  const std::vector<double> five(5, 1.0);
  for (double p : TargetProbabilities(five)) CHECK(p == doctest::Approx(0.2));
  std::vector<double> w;
  for (size_t k = 0; k < 4; ++k) w.push_back(RecencyWeight(0.5, 4, k));
  const auto p = TargetProbabilities(w);
  const double expect[] = {1.0 / 15, 2.0 / 15, 4.0 / 15, 8.0 / 15};
  for (size_t k = 0; k < 4; ++k) CHECK(p[k] == doctest::Approx(expect[k]).epsilon(1e-12));
  CHECK(TargetProbabilities(std::vector<double>{3.0}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(TargetProbabilities(std::vector<double>{1.0, -1.0}), Error);
  CHECK_THROWS_AS(TargetProbabilities(std::vector<double>{}), Error);
}

TEST_CASE("probabilities normalize and increase with position") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double alpha = trial == 0 ? 1.0 : 0.01 + 0.99 * UniformUnit(rng);
    const size_t n = 1 + UniformIndex(rng, 10000);
    const auto p = ExponentialProbabilities(alpha, n);
    const double sum = std::accumulate(p.begin(), p.end(), 0.0);
    CHECK(std::abs(sum - 1.0) <= 1e-9);
    bool ordered = true;
    for (size_t k = 0; k + 1 < n; ++k) {
      ordered = ordered && (alpha < 1.0 ? p[k] <= p[k + 1] : p[k] == p[k + 1]);
    }
    CHECK(ordered);
  }
  // Strict increase where nothing underflows.
  const auto q = ExponentialProbabilities(0.8, 30);
  for (size_t k = 0; k + 1 < q.size(); ++k) CHECK(q[k] < q[k + 1]);
}

TEST_CASE("closed form for small alpha at length 50") {
  const double alpha = 0.2;
  const size_t n = 50;
  const auto p = ExponentialProbabilities(alpha, n);
  for (size_t k = 0; k < n; ++k) {
    const double closed = (1.0 - alpha) * std::pow(alpha, double(n - 1 - k)) /
                          (1.0 - std::pow(alpha, double(n)));
    REQUIRE(std::isfinite(p[k]));
    CHECK(p[k] == doctest::Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("target count") {
  CHECK(TargetCount(5, 0.2) == 1);
  CHECK(TargetCount(50, 0.2) == 10);
  CHECK(TargetCount(3, 0.1) == 1);
  CHECK(TargetCount(10, 0.3) == 3);
  CHECK(TargetCount(10, 1.0) == 10);
}

TEST_CASE("rss sample shape") {
  Rng rng(1);
  const UserSequence s = Iota(5);
  const auto sample = RssSample(s, 0.2, ExponentialRecency(0.8), rng);
  CHECK(sample.targets.size() == 1);
  CHECK(sample.input.size() == 4);
  const auto limit = RssSample(s, 0.2, ExponentialRecency(1e-9), rng);
  CHECK(limit.targets == std::vector<ItemIndex>{4});
  CHECK(limit.input == std::vector<ItemIndex>{0, 1, 2, 3});
  CHECK_THROWS_AS(RssSample(Iota(1), 0.2, ExponentialRecency(0.8), rng), Error);
}

TEST_CASE("rss conserves items and input order") {
  Rng rng(21);
  for (int trial = 0; trial < 2000; ++trial) {
    const size_t n = 2 + UniformIndex(rng, 49);
    const double tau = 0.05 + 0.95 * UniformUnit(rng);
    const double alpha = 0.05 + 0.95 * UniformUnit(rng);
    const auto s = RssSample(Iota(n), tau, ExponentialRecency(alpha), rng);
    REQUIRE_FALSE(s.input.empty());
    REQUIRE_FALSE(s.targets.empty());
    CHECK(s.targets.size() <= TargetCount(n, tau));
    CHECK(std::is_sorted(s.input.begin(), s.input.end()));
    std::vector<ItemIndex> all = s.input;
    all.insert(all.end(), s.targets.begin(), s.targets.end());
    std::sort(all.begin(), all.end());
    CHECK(all == Iota(n).items);
  }
}

TEST_CASE("single-draw frequencies follow the recency distribution") {
  const size_t n = 10;
  const int draws = 100000;
  const auto p = ExponentialProbabilities(0.8, n);
  std::vector<double> counts(n, 0.0);
  Rng rng(2024);
  const UserSequence s = Iota(n);
  for (int d = 0; d < draws; ++d) {
    const auto sample = RssSample(s, 0.1, ExponentialRecency(0.8), rng);
    REQUIRE(sample.targets.size() == 1);
    counts[sample.targets[0]] += 1.0;
  }
  double chi2 = 0.0;
  for (size_t k = 0; k < n; ++k) {
    CHECK(std::abs(counts[k] / draws - p[k]) <= 0.01);
    const double expected = p[k] * draws;
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  const double critical =
      boost::math::quantile(boost::math::chi_squared(double(n - 1)), 0.999);
  CHECK(critical == doctest::Approx(27.877).epsilon(1e-4));
  CHECK(chi2 < critical);
}

TEST_CASE("alpha limits") {
  Rng rng(99);
  int equal = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + UniformIndex(rng, 49);
    UserSequence s{0, std::vector<ItemIndex>(n)};
    for (auto& x : s.items) x = static_cast<ItemIndex>(UniformIndex(rng, 30));
    equal += RssSample(s, 0.2, ExponentialRecency(1e-6), rng) == ContinuationSample(s, 1);
  }
  CHECK(equal >= 999);

  std::vector<double> counts(10, 0.0);
  for (int d = 0; d < 100000; ++d) {
    counts[RssSample(Iota(10), 0.1, ExponentialRecency(1.0), rng).targets[0]] += 1.0;
  }
  for (double c : counts) CHECK(std::abs(c / 100000 - 0.1) <= 0.01);
}

TEST_CASE("continuation samples") {
  const UserSequence s = Iota(4);
  auto one = ContinuationSample(s, 1);
  CHECK(one.input == std::vector<ItemIndex>{0, 1, 2});
  CHECK(one.targets == std::vector<ItemIndex>{3});
  auto two = ContinuationSample(s, 2);
  CHECK(two.input == std::vector<ItemIndex>{0, 1});
  CHECK(two.targets == std::vector<ItemIndex>{2, 3});
  CHECK_THROWS_AS(ContinuationSample(Iota(2), 2), Error);
  CHECK_THROWS_AS(ContinuationSample(Iota(3), 0), Error);
}

TEST_CASE("sliding windows") {
  const auto w = SlidingWindowSamples(Iota(4), 3, 1);
  REQUIRE(w.size() == 2);
  CHECK(w[0].input == std::vector<ItemIndex>{0, 1});
  CHECK(w[0].targets == std::vector<ItemIndex>{2});
  CHECK(w[1].input == std::vector<ItemIndex>{1, 2});
  CHECK(w[1].targets == std::vector<ItemIndex>{3});
  CHECK(SlidingWindowSamples(Iota(10), 10, 1).size() == 1);
  CHECK(SlidingWindowSamples(Iota(50), 5, 1).size() == 46);
  CHECK(SlidingWindowSamples(Iota(4), 5, 1).empty());
}

TEST_CASE("shifted targets") {
  const auto t = ShiftedTargets(Iota(3));
  REQUIRE(t.size() == 2);
  CHECK(t[0].input == std::vector<ItemIndex>{0});
  CHECK(t[0].targets == std::vector<ItemIndex>{1});
  CHECK(t[1].input == std::vector<ItemIndex>{0, 1});
  CHECK(t[1].targets == std::vector<ItemIndex>{2});
  CHECK(ShiftedTargets(Iota(2)).size() == 1);
  CHECK(ShiftedTargets(Iota(50)).size() == 49);
  CHECK(ShiftedTargets(Iota(1)).empty());
}

TEST_CASE("sampler streams are reproducible") {
  for (auto strategy : {SamplingStrategy::kRss, SamplingStrategy::kContinuation,
                        SamplingStrategy::kSlidingWindow,
                        SamplingStrategy::kShiftedSequence}) {
    SamplerConfig c;
    c.strategy = strategy;
    c.window = 5;
    c.seed = 17;
    const Sampler a(c), b(c);
    bool varies = false;
    for (UserIndex u = 0; u < 20; ++u) {
      const UserSequence s = Iota(30, u);
      for (uint64_t epoch = 0; epoch < 5; ++epoch) {
        const auto x = a.Sample(s, epoch);
        CHECK(x == b.Sample(s, epoch));
        CHECK(x.source_user == u);
        varies = varies || !(x == a.Sample(s, epoch + 1));
      }
    }
    CHECK(varies == (strategy != SamplingStrategy::kContinuation));
  }
  CHECK(ParseSamplingStrategy("rss") == SamplingStrategy::kRss);
  CHECK(ToString(SamplingStrategy::kSlidingWindow) == "sliding_window");
  CHECK_THROWS_AS(ParseSamplingStrategy("bert"), Error);
  SamplerConfig bad;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(Validate(bad), Error);
}

}  // namespace
}  // namespace seqrec
