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


#include "seqrec/losses.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "seqrec/error.h"
#include "oracles.h"
#include "test_util.h"

namespace seqrec {
namespace {

using testing::CentralDifference;
using testing::RandomVector;
using testing::RelativeError;
using testing::BruteLambda;
using testing::LambdaOracle;
using testing::OracleDelta;
using testing::Positives;
using testing::RandomPositives;

TEST_CASE("stable scalar helpers") {
  CHECK(Softplus(0.0) == doctest::Approx(std::log(2.0)));
  CHECK(Softplus(800.0) == doctest::Approx(800.0));
  CHECK(Softplus(-800.0) >= 0.0);
  CHECK(std::isfinite(Softplus(1e6)));
  CHECK(Logistic(0.0) == 0.5);
  CHECK(Logistic(-800.0) >= 0.0);
  CHECK(Logistic(800.0) == doctest::Approx(1.0));
}

TEST_CASE("bce at zero scores") {
  const size_t n = 8;
  std::vector<double> s(n, 0.0);
  std::vector<ItemIndex> pos = {3};
  const auto r = BceLossAndGradient(s, pos);
  CHECK(r.loss == doctest::Approx(std::log(2.0)));
  for (size_t i = 0; i < n; ++i) {
    CHECK(r.grad[i] == doctest::Approx(i == 3 ? -0.5 / n : 0.5 / n));
  }
  std::vector<double> sat = {60.0, -60.0, -60.0};
  std::vector<ItemIndex> first = {0};
  CHECK(BceLossAndGradient(sat, first).loss < 1e-20);
}

TEST_CASE("bce and bpr gradients match central differences") {
  Rng rng(7);
  double worst_bce = 0.0, worst_bpr = 0.0;
  for (int fixture = 0; fixture < 100; ++fixture) {
    const size_t n = 2 + UniformIndex(rng, 30);
    std::vector<double> s = RandomVector(rng, n, 4.0);
    const std::set<int> pos = RandomPositives(rng, n);
    const auto positives = Positives(pos);
    const auto r = BceLossAndGradient(s, positives);
    auto f = [&](const std::vector<double>& x) {
      return BceLossAndGradient(x, positives).loss;
    };
    for (size_t i = 0; i < n; ++i) {
      worst_bce = std::max(worst_bce,
                           RelativeError(r.grad[i], CentralDifference(f, s, i, 1e-5), 1e-10));
    }

    const double a = (2.0 * UniformUnit(rng) - 1.0) * 6.0;
    const double b = (2.0 * UniformUnit(rng) - 1.0) * 6.0;
    const auto bpr = BprLossAndGradient(a, b);
    auto g = [](const std::vector<double>& x) { return BprLossAndGradient(x[0], x[1]).loss; };
    worst_bpr = std::max(worst_bpr, RelativeError(bpr.grad_pos,
                                                  CentralDifference(g, {a, b}, 0, 1e-5)));
    worst_bpr = std::max(worst_bpr, RelativeError(bpr.grad_neg,
                                                  CentralDifference(g, {a, b}, 1, 1e-5)));
  }
  CHECK(worst_bce < 1e-6);
  CHECK(worst_bpr < 1e-6);
}

TEST_CASE("bce decreases along the negative gradient") {
  Rng rng(31);
  for (int probe = 0; probe < 3; ++probe) {
    std::vector<double> s = RandomVector(rng, 20, 3.0);
    const std::vector<ItemIndex> pos = {2, 11};
    const auto r = BceLossAndGradient(s, pos);
    std::vector<double> step = s;
    for (size_t i = 0; i < s.size(); ++i) step[i] -= 1e-3 * r.grad[i];
    CHECK(BceLossAndGradient(step, pos).loss <= r.loss);
  }
}

TEST_CASE("bpr examples") {
  const auto even = BprLossAndGradient(1.5, 1.5);
  CHECK(even.loss == doctest::Approx(std::log(2.0)));
  CHECK(even.grad_pos == doctest::Approx(-0.5));
  CHECK(even.grad_neg == doctest::Approx(0.5));
  const auto far = BprLossAndGradient(20.0, 0.0);
  CHECK(far.loss < 1e-8);
  CHECK(std::abs(far.grad_pos) < 1e-8);
}

TEST_CASE("ndcg delta") {
  std::vector<double> s = {0.9, 0.8, 0.1, 0.0};
  std::vector<ItemIndex> pos = {0};
  CHECK(NdcgDelta(s, pos, 0, 1, 10) ==
        doctest::Approx(1.0 / std::log2(3.0) - 1.0).epsilon(1e-12));
  CHECK(NdcgDelta(s, pos, 0, 1, 10) == doctest::Approx(-0.369).epsilon(1e-3));
  CHECK(NdcgDelta(s, pos, 2, 3, 10) == 0.0);

  std::vector<double> wide(30);
  for (int i = 0; i < 30; ++i) wide[i] = 30.0 - i;
  std::vector<ItemIndex> top = {0};
  CHECK(NdcgDelta(wide, top, 20, 25, 10) == 0.0);

  Rng rng(4);
  for (int trial = 0; trial < 300; ++trial) {
    const size_t n = 2 + UniformIndex(rng, 40);
    std::vector<double> x = RandomVector(rng, n, 1.0);
    const std::set<int> p = RandomPositives(rng, n);
    const auto pv = Positives(p);
    const int i = static_cast<int>(UniformIndex(rng, n));
    int j = static_cast<int>(UniformIndex(rng, n - 1));
    if (j >= i) ++j;
    const double d = NdcgDelta(x, pv, i, j, 10);
    CHECK(d == doctest::Approx(OracleDelta(x, p, i, j, 10)).epsilon(1e-12));
    std::swap(x[i], x[j]);
    CHECK(NdcgDelta(x, pv, j, i, 10) == doctest::Approx(-d).epsilon(1e-12));
  }
}

TEST_CASE("lambda gradients equal brute-force pair sums") {
  Rng rng(12);
  LambdaConfig exact;
  exact.candidate_truncation = 0;
  double worst = 0.0;
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const size_t n = 2 + UniformIndex(rng, 49);
    std::vector<double> s = RandomVector(rng, n, 2.0);
    if (fixture % 5 == 0) {
      for (auto& x : s) x = std::round(x);  // ties
    }
    const std::set<int> pos = RandomPositives(rng, n);
    exact.sigma = 0.5 + UniformUnit(rng);
    const auto r = LambdaGradients(s, Positives(pos), exact);
    const LambdaOracle o = BruteLambda(s, pos, exact.sigma, exact.ndcg_cutoff);
    for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(r.grad[i] - o.grad[i]));
    worst = std::max(worst, std::abs(r.loss - o.loss));
    const double total = std::accumulate(r.grad.begin(), r.grad.end(), 0.0);
    CHECK(std::abs(total) < 1e-12);
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("lambda pair properties") {
  LambdaConfig c;
  c.candidate_truncation = 0;
  // One pair with equal scores: factor |delta| * sigma / 2.
  std::vector<double> s = {0.0, 0.0, -5.0};
  std::vector<ItemIndex> pos = {1};
  const auto r = LambdaGradients(s, pos, c);
  const double d01 = std::abs(NdcgDelta(s, pos, 1, 0, 10));
  const double d12 = std::abs(NdcgDelta(s, pos, 1, 2, 10));
  CHECK(d01 > 0.0);
  CHECK(r.grad[0] == doctest::Approx(d01 * c.sigma / 2.0));
  CHECK(r.grad[1] < 0.0);
  CHECK(r.grad[2] == doctest::Approx(d12 * c.sigma * Logistic(-5.0)));

  Rng rng(8);
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const size_t n = 2 + UniformIndex(rng, 49);
    std::vector<double> x = RandomVector(rng, n, 2.0);
    const int i = static_cast<int>(UniformIndex(rng, n));
    std::vector<ItemIndex> one = {i};
    int j = static_cast<int>(UniformIndex(rng, n - 1));
    if (j >= i) ++j;
    // Antisymmetry and direction on the single pair (i, j).
    std::vector<double> pair = {x[i], x[j]};
    std::vector<ItemIndex> first = {0};
    const auto g = LambdaGradients(pair, first, c);
    CHECK(g.grad[0] == -g.grad[1]);
    CHECK(g.grad[0] < 0.0);
    // Zero-delta nullity: no positive-negative pair changes NDCG.
    std::vector<ItemIndex> every(n);
    std::iota(every.begin(), every.end(), 0);
    const auto null = LambdaGradients(x, every, c);
    CHECK(std::all_of(null.grad.begin(), null.grad.end(), [](double v) { return v == 0.0; }));
  }
  // Pairs whose swap stays below the cutoff contribute nothing.
  std::vector<double> wide(40);
  for (int i = 0; i < 40; ++i) wide[i] = 40.0 - i;
  std::vector<ItemIndex> low = {30};
  c.ndcg_cutoff = 10;
  const auto z = LambdaGradients(wide, low, c);
  for (int j = 10; j < 40; ++j) {
    if (j != 30) CHECK(z.grad[j] == 0.0);
  }
  CHECK(z.grad[30] < 0.0);
  CHECK(z.grad[0] > 0.0);
}

TEST_CASE("candidate truncation keeps the top negatives") {
  Rng rng(44);
  for (int fixture = 0; fixture < 100; ++fixture) {
    const size_t n = 60 + UniformIndex(rng, 100);
    std::vector<double> s = RandomVector(rng, n, 2.0);
    const std::set<int> pos = RandomPositives(rng, n);
    LambdaConfig full, cut;
    full.candidate_truncation = 0;
    cut.candidate_truncation = static_cast<int>(n);
    const auto a = LambdaGradients(s, Positives(pos), full);
    const auto b = LambdaGradients(s, Positives(pos), cut);
    for (size_t i = 0; i < n; ++i) CHECK(a.grad[i] == doctest::Approx(b.grad[i]).epsilon(1e-12));

    cut.candidate_truncation = 20;
    const auto t = LambdaGradients(s, Positives(pos), cut);
    std::vector<int> negs;
    for (int i = 0; i < static_cast<int>(n); ++i) {
      if (!pos.count(i)) negs.push_back(i);
    }
    std::stable_sort(negs.begin(), negs.end(), [&](int x, int y) { return s[x] > s[y]; });
    std::set<int> kept(negs.begin(), negs.begin() + 20);
    for (int j : negs) {
      if (!kept.count(j)) CHECK(t.grad[j] == 0.0);
    }
    const double total = std::accumulate(t.grad.begin(), t.grad.end(), 0.0);
    CHECK(std::abs(total) < 1e-12);
  }
}

TEST_CASE("loss selection and validation") {
  std::vector<double> s = {0.3, -0.2, 0.1};
  std::vector<ItemIndex> pos = {1};
  LossConfig bce;
  bce.kind = LossKind::kBce;
  CHECK(ComputeLoss(bce, s, pos).loss == doctest::Approx(BceLossAndGradient(s, pos).loss));
  LossConfig lambda;
  CHECK(ComputeLoss(lambda, s, pos).grad == LambdaGradients(s, pos, lambda.lambda).grad);
  CHECK(ParseLossKind("bce") == LossKind::kBce);
  CHECK(ParseLossKind("lambdarank") == LossKind::kLambdaRank);
  CHECK_THROWS_AS(ParseLossKind("hinge"), Error);
  LambdaConfig bad;
  bad.sigma = 0.0;
  CHECK_THROWS_AS(Validate(bad), Error);
  std::vector<ItemIndex> out_of_range = {3};
  CHECK_THROWS_AS(ComputeLoss(lambda, s, out_of_range), Error);
}

}  // namespace
}  // namespace seqrec
