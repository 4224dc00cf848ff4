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

#include "seqrec/error.h"

namespace seqrec {

namespace {

void CheckScores(std::span<const double> scores) {
  for (double s : scores) {
    if (!std::isfinite(s)) throw RuntimeError("non-finite score");
  }
}

// Sorted unique positives, validated against the catalog.
std::vector<ItemIndex> CheckPositives(std::span<const ItemIndex> positives,
                                      size_t catalog_size) {
  if (positives.empty()) throw DataError("no positive items");
  std::vector<ItemIndex> sorted(positives.begin(), positives.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  if (sorted.front() < 0 || static_cast<size_t>(sorted.back()) >= catalog_size) {
    throw DataError("positive item outside catalog");
  }
  return sorted;
}

// Ranking order: score descending, index ascending.
bool RanksBefore(std::span<const double> scores, ItemIndex a, ItemIndex b) {
  return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
}

double Gain(size_t rank, int cutoff) {
  return rank <= static_cast<size_t>(cutoff)
             ? 1.0 / std::log2(static_cast<double>(rank) + 1.0)
             : 0.0;
}

double IdealDcg(size_t num_positives, int cutoff) {
  double idcg = 0.0;
  for (size_t r = 1; r <= num_positives && r <= static_cast<size_t>(cutoff); ++r) {
    idcg += Gain(r, cutoff);
  }
  return idcg;
}

// 1-based rank of `item` under RanksBefore.
size_t RankOf(std::span<const double> scores, ItemIndex item) {
  size_t rank = 1;
  for (size_t j = 0; j < scores.size(); ++j) {
    if (RanksBefore(scores, static_cast<ItemIndex>(j), item)) ++rank;
  }
  return rank;
}

}  // namespace

double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double Logistic(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

LossAndGradient BceLossAndGradient(std::span<const double> scores,
                                   std::span<const ItemIndex> positives) {
  CheckScores(scores);
  const auto pos = CheckPositives(positives, scores.size());
  const double n = static_cast<double>(scores.size());
  LossAndGradient out;
  out.grad.resize(scores.size());
  double total = 0.0;
  for (size_t i = 0; i < scores.size(); ++i) {
    total += Softplus(scores[i]);  // label-0 term
    out.grad[i] = Logistic(scores[i]) / n;
  }
  for (ItemIndex p : pos) {
    // Swap the label-0 term for the label-1 term: softplus(-s) = softplus(s) - s.
    total -= scores[p];
    out.grad[p] -= 1.0 / n;
  }
  out.loss = total / n;
  return out;
}

void Validate(const LambdaConfig& config) {
  if (!(config.sigma > 0.0)) throw ConfigError("loss.sigma must be > 0");
  if (config.ndcg_cutoff < 1) throw ConfigError("loss.ndcg_cutoff must be >= 1");
  if (config.candidate_truncation < 0) {
    throw ConfigError("loss.candidate_truncation must be >= 0");
  }
}

double NdcgDelta(std::span<const double> scores,
                 std::span<const ItemIndex> positives, ItemIndex i, ItemIndex j,
                 int cutoff) {
  const auto n = static_cast<ItemIndex>(scores.size());
  if (i < 0 || j < 0 || i >= n || j >= n) throw DataError("index outside catalog");
  if (i == j) throw DataError("ndcg delta needs two distinct items");
  if (cutoff < 1) throw ConfigError("cutoff must be >= 1");
  const auto pos = CheckPositives(positives, scores.size());
  auto relevant = [&](ItemIndex x) {
    return std::binary_search(pos.begin(), pos.end(), x) ? 1.0 : 0.0;
  };
  const double rel_i = relevant(i);
  const double rel_j = relevant(j);
  if (rel_i == rel_j) return 0.0;
  const size_t rank_i = RankOf(scores, i);
  const size_t rank_j = RankOf(scores, j);
  // After the swap, i's label sits at rank_j and j's at rank_i.
  const double before = rel_i * Gain(rank_i, cutoff) + rel_j * Gain(rank_j, cutoff);
  const double after = rel_i * Gain(rank_j, cutoff) + rel_j * Gain(rank_i, cutoff);
  return (after - before) / IdealDcg(pos.size(), cutoff);
}

LossAndGradient LambdaGradients(std::span<const double> scores,
                                std::span<const ItemIndex> positives,
                                const LambdaConfig& config) {
  Validate(config);
  CheckScores(scores);
  const auto pos = CheckPositives(positives, scores.size());
  const size_t n = scores.size();
  if (pos.size() >= n) return {0.0, std::vector<double>(n, 0.0)};

  std::vector<bool> is_positive(n, false);
  for (ItemIndex p : pos) is_positive[p] = true;

  // Only ranks within the cutoff carry gain, so the top `cutoff` items and
  // the positives' ranks determine every |dNDCG|.
  const size_t top_k = std::min<size_t>(static_cast<size_t>(config.ndcg_cutoff), n);
  std::vector<ItemIndex> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto before = [&](ItemIndex a, ItemIndex b) { return RanksBefore(scores, a, b); };

  std::vector<ItemIndex> negatives;
  if (config.candidate_truncation > 0 &&
      static_cast<size_t>(config.candidate_truncation) < n - pos.size()) {
    const auto r = static_cast<size_t>(config.candidate_truncation);
    std::vector<ItemIndex> all_neg;
    all_neg.reserve(n - pos.size());
    for (ItemIndex x = 0; x < static_cast<ItemIndex>(n); ++x) {
      if (!is_positive[x]) all_neg.push_back(x);
    }
    std::partial_sort(all_neg.begin(), all_neg.begin() + static_cast<std::ptrdiff_t>(r),
                      all_neg.end(), before);
    negatives.assign(all_neg.begin(), all_neg.begin() + static_cast<std::ptrdiff_t>(r));
  } else {
    negatives.reserve(n - pos.size());
    for (ItemIndex x = 0; x < static_cast<ItemIndex>(n); ++x) {
      if (!is_positive[x]) negatives.push_back(x);
    }
  }

  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(top_k),
                    order.end(), before);
  // rank_gain[x] is non-zero only for items ranked within the cutoff.
  std::vector<std::pair<ItemIndex, double>> top_gain;
  top_gain.reserve(top_k);
  for (size_t r = 0; r < top_k; ++r) {
    top_gain.emplace_back(order[r], Gain(r + 1, config.ndcg_cutoff));
  }
  auto gain_of = [&](ItemIndex x) {
    for (const auto& [item, g] : top_gain) {
      if (item == x) return g;
    }
    return 0.0;
  };

  const double idcg = IdealDcg(pos.size(), config.ndcg_cutoff);
  const double sigma = config.sigma;
  LossAndGradient out;
  out.grad.assign(n, 0.0);
  auto add_pair = [&](ItemIndex i, ItemIndex j, double delta) {
    if (delta == 0.0) return;
    const double diff = sigma * (scores[i] - scores[j]);
    const double rho = sigma * Logistic(-diff);
    out.grad[i] -= delta * rho;
    out.grad[j] += delta * rho;
    out.loss += delta * Softplus(-diff);
  };

  for (ItemIndex i : pos) {
    const double gain_i = gain_of(i);
    if (gain_i > 0.0) {
      // Positive inside the cutoff: every candidate negative may swap with it.
      for (ItemIndex j : negatives) {
        add_pair(i, j, std::abs(gain_of(j) - gain_i) / idcg);
      }
    } else {
      // Positive outside the cutoff: only negatives inside it matter.
      for (const auto& [j, gain_j] : top_gain) {
        if (is_positive[j]) continue;
        if (config.candidate_truncation > 0 &&
            std::find(negatives.begin(), negatives.end(), j) == negatives.end()) {
          continue;
        }
        add_pair(i, j, gain_j / idcg);
      }
    }
  }
  return out;
}

BprResult BprLossAndGradient(double pos_score, double neg_score) {
  const double x = pos_score - neg_score;
  BprResult r;
  r.loss = Softplus(-x);
  r.grad_pos = -Logistic(-x);
  r.grad_neg = Logistic(-x);
  return r;
}

std::string ToString(LossKind kind) {
  return kind == LossKind::kBce ? "bce" : "lambdarank";
}

LossKind ParseLossKind(const std::string& name) {
  if (name == "bce") return LossKind::kBce;
  if (name == "lambdarank" || name == "lambda_rank") return LossKind::kLambdaRank;
  throw ConfigError("unknown loss '" + name + "'");
}

LossAndGradient ComputeLoss(const LossConfig& config,
                            std::span<const double> scores,
                            std::span<const ItemIndex> positives) {
  switch (config.kind) {
    case LossKind::kBce:
      return BceLossAndGradient(scores, positives);
    case LossKind::kLambdaRank:
      return LambdaGradients(scores, positives, config.lambda);
  }
  throw RuntimeError("unhandled loss kind");
}

}  // namespace seqrec
