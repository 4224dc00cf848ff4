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


// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero
// when any criterion fails.
//
// SEQREC_ML20M may point at the MovieLens-20M ratings.csv to add the
// ingestion count check to criterion 6.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "oracles.h"
#include "seqrec/baselines.h"
#include "seqrec/commands.h"
#include "seqrec/dataset.h"
#include "seqrec/evaluation.h"
#include "seqrec/io.h"
#include "seqrec/losses.h"
#include "seqrec/sampling.h"
#include "seqrec/synthetic.h"
#include "seqrec/training.h"

namespace seqrec {
namespace {

using testing::CentralDifference;
using testing::RandomVector;
using testing::RelativeError;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string Fmt(double x, int precision = 4) {
  std::ostringstream os;
  os.precision(precision);
  os << x;
  return os.str();
}

UserSequence Iota(size_t n) {
  UserSequence s;
  for (size_t i = 0; i < n; ++i) s.items.push_back(static_cast<ItemIndex>(i));
  return s;
}

// Closed form alpha^(n-k) / sum_j alpha^(n-j), computed directly.
std::vector<double> RecencyOracle(double alpha, size_t n) {
  std::vector<double> p(n);
  double total = 0.0;
  for (size_t k = 0; k < n; ++k) total += p[k] = std::pow(alpha, double(n - k));
  for (double& x : p) x /= total;
  return p;
}

Verdict SamplerDistribution() {
  const size_t n = 10;
  const int draws = 100000;
  const auto p = RecencyOracle(0.8, n);
  std::vector<double> counts(n, 0.0);
  Rng rng(2024);
  const UserSequence s = Iota(n);
  const auto recency = ExponentialRecency(0.8);
  for (int d = 0; d < draws; ++d) {
    const auto sample = RssSample(s, 0.1, recency, rng);
    if (sample.targets.size() != 1) return {false, "expected a single target"};
    counts[sample.targets[0]] += 1.0;
  }
  double worst = 0.0, chi2 = 0.0;
  for (size_t k = 0; k < n; ++k) {
    worst = std::max(worst, std::abs(counts[k] / draws - p[k]));
    const double expected = p[k] * draws;
    chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
  }
  const double critical = boost::math::quantile(boost::math::chi_squared(double(n - 1)), 0.999);
  return {worst <= 0.01 && chi2 < critical,
          "max |freq - p| = " + Fmt(worst) + ", chi2 = " + Fmt(chi2) + " < " + Fmt(critical)};
}

Verdict LimitEquivalence() {
  Rng rng(99);
  int equal = 0;
  const auto tiny = ExponentialRecency(1e-6);
  for (int trial = 0; trial < 1000; ++trial) {
    const size_t n = 2 + UniformIndex(rng, 49);
    UserSequence s{0, std::vector<ItemIndex>(n)};
    for (auto& x : s.items) x = static_cast<ItemIndex>(UniformIndex(rng, 30));
    equal += RssSample(s, 0.2, tiny, rng) == ContinuationSample(s, 1);
  }
  std::vector<double> counts(10, 0.0);
  const auto flat = ExponentialRecency(1.0);
  for (int d = 0; d < 100000; ++d) {
    counts[RssSample(Iota(10), 0.1, flat, rng).targets[0]] += 1.0;
  }
  double worst = 0.0;
  for (double c : counts) worst = std::max(worst, std::abs(c / 100000 - 0.1));
  return {equal >= 999 && worst <= 0.01,
          std::to_string(equal) + "/1000 equal to continuation, uniform max dev = " + Fmt(worst)};
}

Verdict GradientCorrectness() {
  Rng rng(7);
  double bce = 0.0, bpr = 0.0;
  for (int fixture = 0; fixture < 100; ++fixture) {
    const size_t n = 2 + UniformIndex(rng, 30);
    const std::vector<double> s = RandomVector(rng, n, 4.0);
    const auto positives = testing::Positives(testing::RandomPositives(rng, n));
    const auto r = BceLossAndGradient(s, positives);
    auto f = [&](const std::vector<double>& x) { return BceLossAndGradient(x, positives).loss; };
    for (size_t i = 0; i < n; ++i) {
      bce = std::max(bce, RelativeError(r.grad[i], CentralDifference(f, s, i, 1e-5), 1e-10));
    }
    const double a = (2.0 * UniformUnit(rng) - 1.0) * 6.0;
    const double b = (2.0 * UniformUnit(rng) - 1.0) * 6.0;
    const auto g = BprLossAndGradient(a, b);
    auto h = [](const std::vector<double>& x) { return BprLossAndGradient(x[0], x[1]).loss; };
    bpr = std::max(bpr, RelativeError(g.grad_pos, CentralDifference(h, {a, b}, 0, 1e-5)));
    bpr = std::max(bpr, RelativeError(g.grad_neg, CentralDifference(h, {a, b}, 1, 1e-5)));
  }
  double model = 0.0;
  Rng inputs(31);
  for (auto kind : {EncoderKind::kCausalSelfAttention, EncoderKind::kRecurrent,
                    EncoderKind::kConvolutional}) {
    for (int fixture = 0; fixture < 3; ++fixture) {
      EncoderConfig c = testing::SmallEncoder(kind);
      c.use_bias = fixture == 1;
      const ModelParams params = testing::PerturbedParams(20, c, 100 + fixture);
      std::vector<ItemIndex> input(1 + UniformIndex(inputs, c.max_len));
      for (auto& x : input) x = static_cast<ItemIndex>(UniformIndex(inputs, 20));
      Vector w(20);
      for (Eigen::Index i = 0; i < 20; ++i) w(i) = 2.0 * UniformUnit(inputs) - 1.0;
      for (double e : testing::ScoreGradientErrors(params, input, w)) model = std::max(model, e);
    }
  }
  return {bce < 1e-6 && bpr < 1e-6 && model < 1e-4,
          "bce " + Fmt(bce) + ", bpr " + Fmt(bpr) + ", model blocks " + Fmt(model)};
}

Verdict LambdaOracle() {
  Rng rng(12);
  LambdaConfig exact;
  exact.candidate_truncation = 0;
  double worst = 0.0;
  bool antisymmetric = true, null = true;
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const size_t n = 2 + UniformIndex(rng, 49);
    std::vector<double> s = RandomVector(rng, n, 2.0);
    if (fixture % 5 == 0) {
      for (auto& x : s) x = std::round(x);
    }
    const std::set<int> pos = testing::RandomPositives(rng, n);
    exact.sigma = 0.5 + UniformUnit(rng);
    const auto r = LambdaGradients(s, testing::Positives(pos), exact);
    const auto o = testing::BruteLambda(s, pos, exact.sigma, exact.ndcg_cutoff);
    for (size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(r.grad[i] - o.grad[i]));
    worst = std::max(worst, std::abs(r.loss - o.loss));

    // A negative whose swap with every positive leaves NDCG unchanged gets
    // no gradient at all.
    for (int j = 0; j < static_cast<int>(n); ++j) {
      if (pos.count(j)) continue;
      bool all_zero = true;
      for (int i : pos) all_zero = all_zero && testing::OracleDelta(s, pos, i, j, 10) == 0.0;
      if (all_zero) null = null && r.grad[j] == 0.0;
    }
    // Each pair on its own: equal and opposite.
    const int i = *pos.begin();
    int j = static_cast<int>(UniformIndex(rng, n));
    if (pos.count(j)) continue;
    std::vector<double> pair = {s[i], s[j]};
    std::vector<ItemIndex> first = {0};
    const auto g = LambdaGradients(pair, first, exact);
    antisymmetric = antisymmetric && g.grad[0] == -g.grad[1] && g.grad[0] < 0.0;
  }
  return {worst <= 1e-9 && antisymmetric && null,
          "max |diff| = " + Fmt(worst) + (antisymmetric ? ", antisymmetric" : ", NOT antisymmetric") +
              (null ? ", zero-delta pairs inert" : ", zero-delta pairs move")};
}

Verdict MetricOracle() {
  Rng rng(10);
  int agree = 0;
  for (int fixture = 0; fixture < 1000; ++fixture) {
    const size_t n = 1 + UniformIndex(rng, 1000);
    std::vector<double> s(n);
    const bool coarse = fixture % 3 == 0;
    for (auto& x : s) x = coarse ? double(UniformIndex(rng, 5)) : UniformUnit(rng);
    const int h = static_cast<int>(UniformIndex(rng, n));
    const size_t rank = RankOfHoldout(s, h);
    const size_t oracle = testing::SortRank(s, h);
    const RankMetrics m = MetricsForRank(rank, 10);
    const int recall = oracle <= 10 ? 1 : 0;
    const double ndcg = oracle <= 10 ? 1.0 / std::log2(oracle + 1.0) : 0.0;
    agree += rank == oracle && m.recall == recall && std::abs(m.ndcg - ndcg) < 1e-15;
  }
  const RankMetrics three = MetricsForRank(3, 10);
  const bool exact = three.recall == 1 && three.ndcg == 0.5;
  return {agree == 1000 && exact,
          std::to_string(agree) + "/1000 fixtures agree, metrics_for_rank(3,10) = (" +
              std::to_string(three.recall) + ", " + Fmt(three.ndcg, 17) + ")"};
}

Verdict SplitCorrectness() {
  MarkovConfig mc;
  mc.users = 10000;
  mc.items = 300;
  mc.min_length = 5;
  mc.max_length = 60;
  mc.communities = 30;
  const InteractionLog log = MakeLog(GenerateMarkovInteractions(mc));
  auto seqs = FilterMinLength(BuildUserSequences(log), 5);
  for (auto& s : seqs) s = TruncateRecent(std::move(s), 50);
  const auto split = LeaveOneOutSplit(seqs, log.num_items(), 1024, 77);
  bool ok = split.users.size() == 10000 && seqs.size() == 10000;
  for (size_t k = 0; ok && k < seqs.size(); ++k) {
    std::vector<ItemIndex> rebuilt = TestInput(split.users[k]);
    rebuilt.push_back(split.users[k].test);
    ok = rebuilt == seqs[k].items && split.users[k].user == seqs[k].user;
  }
  std::string detail = std::to_string(seqs.size()) + " users reconstructed";

  const char* ml = std::getenv("SEQREC_ML20M");
  if (ml == nullptr || !std::filesystem::exists(ml)) {
    return {ok, detail + "; MovieLens-20M not available, ingestion count not checked"};
  }
  ColumnSpec spec;
  spec.has_header = true;
  spec.user_column = 0;
  spec.item_column = 1;
  spec.timestamp_column = 3;
  spec.num_columns = 4;
  const InteractionLog ml20 = IngestInteractions(ml, spec);
  const bool counts = ml20.num_users() == 138493 && ml20.num_items() == 26744 &&
                      ml20.size() == 20000263;
  return {ok && counts, detail + "; MovieLens-20M " + std::to_string(ml20.num_users()) +
                            " users / " + std::to_string(ml20.num_items()) + " items / " +
                            std::to_string(ml20.size()) + " interactions"};
}

// Shared experiment for the directional criteria: a fixed-seed Markov log and
// a fixed step budget of 10 epochs for every objective.
struct Experiment {
  SplitDataset split;

  Experiment() {
    const MarkovConfig mc;  // 2000 users, 500 items, lengths 10-50, seed 1
    const InteractionLog log = MakeLog(GenerateMarkovInteractions(mc));
    auto seqs = FilterMinLength(BuildUserSequences(log), 5);
    for (auto& s : seqs) s = TruncateRecent(std::move(s), 50);
    split = LeaveOneOutSplit(seqs, log.num_items(), 1024, 11);
  }

  std::vector<double> Run(SamplingStrategy strategy, double alpha, MetricSummary& summary) const {
    EncoderConfig ec;
    SamplerConfig sc;
    sc.strategy = strategy;
    sc.alpha = alpha;
    sc.seed = 5;
    LossConfig lc;
    lc.kind = LossKind::kLambdaRank;
    TrainConfig tc;
    tc.max_epochs = 10;
    tc.budget_seconds = 1e9;
    tc.seed = 3;
    const TrainResult result = Train(split, ec, sc, lc, tc);
    ModelScorer scorer(result.params);
    return Collect(Evaluate(split, scorer, Holdout::kTest, 10, ec.max_len), summary);
  }

  std::vector<double> Score(const Scorer& scorer, MetricSummary& summary) const {
    return Collect(Evaluate(split, scorer, Holdout::kTest, 10, 50), summary);
  }

  static std::vector<double> Collect(const std::vector<UserMetric>& metrics,
                                     MetricSummary& summary) {
    summary = Summarize(metrics);
    std::vector<double> ndcg;
    for (const auto& m : metrics) ndcg.push_back(m.ndcg_at_k);
    return ndcg;
  }
};

Verdict Reproducibility() {
  testing::TempDir dir;
  MarkovConfig mc;
  mc.users = 200;
  mc.items = 80;
  mc.communities = 8;
  mc.max_length = 30;
  WriteInteractionsCsv(GenerateMarkovInteractions(mc), dir / "data.csv");
  ExperimentConfig config;
  config.seed = 17;
  config.dataset.path = (dir / "data.csv").string();
  config.dataset.validation_users = 64;
  config.model.encoder.dim = 16;
  config.training.max_epochs = 3;
  config.training.threads = 1;
  ResolveSeeds(config);
  for (const char* run : {"a", "b"}) {
    CmdPrepare(config, dir / run);
    CmdTrain(config, dir / run);
  }
  const std::string a = ReadFile(dir / "a" / "history.jsonl");
  const std::string b = ReadFile(dir / "b" / "history.jsonl");
  return {!a.empty() && a == b, std::to_string(a.size()) + " bytes, " +
                                    (a == b ? "identical" : "different")};
}

}  // namespace
}  // namespace seqrec

int main() {
  using namespace seqrec;
  int failures = 0;
  auto report = [&](int id, const std::string& name, const std::function<Verdict()>& check) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !v.pass;
    std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << " [" << name
              << "] " << v.detail << " (" << Fmt(seconds, 3) << " s)" << std::endl;
  };

  report(1, "sampler distribution", SamplerDistribution);
  report(2, "limit equivalence", LimitEquivalence);
  report(3, "gradient correctness", GradientCorrectness);
  report(4, "lambda oracle", LambdaOracle);
  report(5, "metric oracle", MetricOracle);
  report(6, "split correctness", SplitCorrectness);

  const Experiment exp;
  MetricSummary rss, cont, flat, tiny, pop, rnd;
  std::vector<double> rss_u, cont_u, flat_u, tiny_u, pop_u, rnd_u;
  double train_seconds = 0.0;
  try {
    const auto start = std::chrono::steady_clock::now();
    rss_u = exp.Run(SamplingStrategy::kRss, 0.8, rss);
    cont_u = exp.Run(SamplingStrategy::kContinuation, 0.8, cont);
    flat_u = exp.Run(SamplingStrategy::kRss, 1.0, flat);
    tiny_u = exp.Run(SamplingStrategy::kRss, 1e-6, tiny);
    train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    pop_u = exp.Score(PopularityScorer(PopularityScores(exp.split)), pop);
    rnd_u = exp.Score(RandomScorer(99), rnd);
  } catch (const std::exception& e) {
    std::cout << "synthetic experiment threw: " << e.what() << std::endl;
  }
  std::cout << "synthetic experiment: " << exp.split.users.size() << " users, "
            << exp.split.catalog_size << " items, 4 training runs in " << Fmt(train_seconds, 3)
            << " s" << std::endl;

  report(7, "directional rss benefit", [&]() -> Verdict {
    if (rss_u.empty() || rss_u.size() != cont_u.size()) return {false, "no results"};
    const TTestResult t = PairedTTest(rss_u, cont_u);
    const std::vector<double> raw = {t.p_value};
    const bool significant = Bonferroni(raw, 0.05)[0];
    return {rss.ndcg > cont.ndcg && significant,
            "ndcg rss(0.8) " + Fmt(rss.ndcg) + " vs continuation " + Fmt(cont.ndcg) +
                ", t = " + Fmt(t.t) + ", corrected p = " + Fmt(t.p_value) + " (m = 1)"};
  });
  report(8, "alpha sweep shape", [&]() -> Verdict {
    if (rss_u.empty()) return {false, "no results"};
    return {rss.ndcg > flat.ndcg && rss.ndcg > tiny.ndcg,
            "ndcg alpha=0.8 " + Fmt(rss.ndcg) + ", alpha=1 " + Fmt(flat.ndcg) + ", alpha=1e-6 " +
                Fmt(tiny.ndcg)};
  });
  report(9, "baseline ordering", [&]() -> Verdict {
    if (rss_u.empty()) return {false, "no results"};
    const double weakest = std::min({rss.ndcg, cont.ndcg, flat.ndcg, tiny.ndcg});
    return {weakest > pop.ndcg && pop.ndcg > rnd.ndcg,
            "weakest trained " + Fmt(weakest) + " > popularity " + Fmt(pop.ndcg) + " > random " +
                Fmt(rnd.ndcg)};
  });
  report(10, "reproducibility", Reproducibility);

  std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " failing")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
