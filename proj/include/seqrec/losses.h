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

#ifndef SEQREC_LOSSES_H_
#define SEQREC_LOSSES_H_

#include <span>
#include <string>
#include <vector>

#include "seqrec/dataset.h"

namespace seqrec {

// Numerically stable log(1 + e^x).
double Softplus(double x);
double Logistic(double x);

struct LossAndGradient {
  double loss = 0.0;
  std::vector<double> grad;
};

// Mean binary cross-entropy over the whole catalog with `positives` labelled
// one. grad[i] = (sigmoid(s_i) - y_i) / |I|.
LossAndGradient BceLossAndGradient(std::span<const double> scores,
                                   std::span<const ItemIndex> positives);

struct LambdaConfig {
  double sigma = 1.0;
  int ndcg_cutoff = 10;
  // Only the top-R scored negatives are paired with positives; 0 disables.
  int candidate_truncation = 200;
};

void Validate(const LambdaConfig& config);

// NDCG@cutoff after swapping the ranking positions of items i and j, minus
// NDCG@cutoff of the current ranking. Ranking is by score descending, ties by
// item index ascending; the ideal DCG is that of |positives| relevant items.
double NdcgDelta(std::span<const double> scores,
                 std::span<const ItemIndex> positives, ItemIndex i, ItemIndex j,
                 int cutoff);

// Lambda gradients over (positive, negative) pairs, returned as a descent
// direction: a pair adds -|dNDCG| * sigma / (1 + e^(sigma (s_i - s_j))) to
// the positive and the negation to the negative. `loss` is the matching
// surrogate sum |dNDCG| * log(1 + e^(-sigma (s_i - s_j))).
LossAndGradient LambdaGradients(std::span<const double> scores,
                                std::span<const ItemIndex> positives,
                                const LambdaConfig& config);

struct BprResult {
  double loss = 0.0;
  double grad_pos = 0.0;
  double grad_neg = 0.0;
};

// loss = -log sigmoid(pos - neg).
BprResult BprLossAndGradient(double pos_score, double neg_score);

enum class LossKind { kBce, kLambdaRank };

std::string ToString(LossKind kind);
LossKind ParseLossKind(const std::string& name);

struct LossConfig {
  LossKind kind = LossKind::kLambdaRank;
  LambdaConfig lambda;
};

LossAndGradient ComputeLoss(const LossConfig& config,
                            std::span<const double> scores,
                            std::span<const ItemIndex> positives);

}  // namespace seqrec

#endif  // SEQREC_LOSSES_H_
