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

#ifndef SEQREC_BASELINES_H_
#define SEQREC_BASELINES_H_

#include <cstdint>
#include <vector>

#include "seqrec/dataset.h"
#include "seqrec/evaluation.h"
#include "seqrec/models.h"

namespace seqrec {

// Occurrence count of every item across the training sequences.
std::vector<double> PopularityScores(const std::vector<UserSequence>& train,
                                     size_t catalog_size);
std::vector<double> PopularityScores(const SplitDataset& split);

class PopularityScorer : public Scorer {
 public:
  explicit PopularityScorer(std::vector<double> counts) : counts_(std::move(counts)) {}
  void Score(UserIndex user, std::span<const ItemIndex> input,
             std::span<double> scores) const override;

 private:
  std::vector<double> counts_;
};

// Uniform random scores, a pure function of (seed, user).
class RandomScorer : public Scorer {
 public:
  explicit RandomScorer(uint64_t seed) : seed_(seed) {}
  void Score(UserIndex user, std::span<const ItemIndex> input,
             std::span<double> scores) const override;

 private:
  uint64_t seed_;
};

struct MfBprModel {
  Matrix user_embeddings;  // |U| x d
  Matrix item_embeddings;  // |I| x d

  double Score(UserIndex user, ItemIndex item) const {
    return user_embeddings.row(user).dot(item_embeddings.row(item));
  }
};

MfBprModel InitMfBpr(size_t num_users, size_t catalog_size, int dim,
                     double init_scale, uint64_t seed);

// One SGD step on -log sigmoid(x_up - x_un) (plus optional L2 on the three
// touched rows). Returns the BPR loss before the step.
double MfBprUpdate(MfBprModel& model, UserIndex user, ItemIndex pos_item,
                   ItemIndex neg_item, double learning_rate,
                   double regularization = 0.0);

struct MfBprConfig {
  int dim = 64;
  int epochs = 20;
  double learning_rate = 0.05;
  double regularization = 1e-4;
  double init_scale = 0.1;
  uint64_t seed = 0;
};

// Each epoch draws one (positive, negative) triple per training interaction;
// negatives are uniform over items outside the user's training set.
MfBprModel TrainMfBpr(const SplitDataset& split, const MfBprConfig& config,
                      std::vector<double>* epoch_losses = nullptr);

class MfBprScorer : public Scorer {
 public:
  explicit MfBprScorer(const MfBprModel& model) : model_(model) {}
  void Score(UserIndex user, std::span<const ItemIndex> input,
             std::span<double> scores) const override;

 private:
  const MfBprModel& model_;
};

}  // namespace seqrec

#endif  // SEQREC_BASELINES_H_
