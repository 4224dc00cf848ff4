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

#ifndef SEQREC_TRAINING_H_
#define SEQREC_TRAINING_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "seqrec/dataset.h"
#include "seqrec/evaluation.h"
#include "seqrec/losses.h"
#include "seqrec/models.h"
#include "seqrec/optimizer.h"
#include "seqrec/sampling.h"

namespace seqrec {

struct TrainConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-8;
  double clip_norm = 0.0;  // 0 disables clipping
  int batch_size = 128;
  double budget_seconds = 3600.0;
  int max_epochs = 0;  // 0 means no epoch limit
  int validation_every = 1;
  uint64_t seed = 0;
  int threads = 1;
  // Reuse the epoch-1 sample stream every epoch.
  bool fixed_epoch_samples = false;

  AdamConfig adam() const {
    return {learning_rate, beta1, beta2, epsilon, clip_norm};
  }
};

void Validate(const TrainConfig& config);

struct EpochRecord {
  int epoch = 0;  // 1-based
  double elapsed_seconds = 0.0;
  double mean_loss = 0.0;
  std::optional<double> validation_ndcg;
  std::optional<double> validation_recall;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
  int best_epoch = 0;
  // The first epoch alone overran the budget.
  bool budget_shorter_than_epoch = false;
};

// Epoch with the highest validation NDCG (earliest on ties); the last epoch
// when nothing was validated; 0 for an empty history.
int SelectBestEpoch(const std::vector<EpochRecord>& epochs);

struct TrainResult {
  ModelParams params;  // at the best epoch
  TrainingHistory history;
};

using EpochCallback = std::function<void(const EpochRecord&)>;
// Monotonic seconds.
using Clock = std::function<double()>;

// Epochs run until the wall-clock budget (checked between epochs) or
// `max_epochs` is reached. Each epoch draws one sample per training sequence
// with at least two items, in a freshly shuffled order.
TrainResult Train(const SplitDataset& split, const EncoderConfig& model_config,
                  const SamplerConfig& sampler_config,
                  const LossConfig& loss_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch = {}, Clock clock = {});

// Scores with a trained sequence model. Not safe for concurrent use; give
// each thread its own instance.
class ModelScorer : public Scorer {
 public:
  explicit ModelScorer(const ModelParams& params);
  ~ModelScorer() override;
  void Score(UserIndex user, std::span<const ItemIndex> input,
             std::span<double> scores) const override;

 private:
  const ModelParams& params_;
  std::unique_ptr<Encoder> encoder_;
  std::unique_ptr<Encoder::Cache> cache_;
};

// Validation metrics of a trained model, with inputs cut to max_len.
MetricSummary ValidationMetrics(const SplitDataset& split, const ModelParams& params);

}  // namespace seqrec

#endif  // SEQREC_TRAINING_H_
