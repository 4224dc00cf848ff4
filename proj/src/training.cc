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

#include "seqrec/training.h"

#include <algorithm>
#include <chrono>
#include <numeric>

#include "seqrec/error.h"
#include "seqrec/random.h"

#ifdef SEQREC_HAVE_OPENMP
#include <omp.h>
#endif

namespace seqrec {

namespace {

// Fixed partition of each batch; per-slice gradients are summed in slice
// order, so results do not depend on the thread count.
constexpr size_t kSlices = 4;

double SteadySeconds() {
  using namespace std::chrono;
  return duration<double>(steady_clock::now().time_since_epoch()).count();
}

class BatchTrainer {
 public:
  BatchTrainer(ModelParams& params, const LossConfig& loss, int batch_size,
               int threads)
      : params_(params),
        loss_(loss),
        encoder_(MakeEncoder(params.config)),
        threads_(threads) {
    for (int b = 0; b < batch_size; ++b) caches_.push_back(encoder_->NewCache());
    for (size_t s = 0; s < kSlices; ++s) slice_grads_.push_back(ZerosLike(params));
    grads_ = ZerosLike(params);
  }

  // Returns the summed loss of the batch and leaves the mean gradient in
  // grads().
  double Run(const std::vector<const TrainingSample*>& batch,
             const std::vector<uint64_t>& dropout_seeds) {
    const auto size = static_cast<Eigen::Index>(batch.size());
    const Eigen::Index d = params_.config.dim;
    const auto n = static_cast<Eigen::Index>(params_.catalog_size);
    hidden_.resize(size, d);

    ParallelSlices(batch.size(), [&](size_t, size_t b) {
      Rng rng(dropout_seeds[b]);
      Vector h;
      encoder_->Forward(params_, batch[b]->input, *caches_[b], &rng, h);
      hidden_.row(static_cast<Eigen::Index>(b)) = h.transpose();
    });

    scores_.noalias() = hidden_ * params_.item_embeddings().transpose();
    if (params_.has_bias()) scores_.rowwise() += params_.item_bias().row(0);

    d_scores_.resize(size, n);
    std::vector<double> losses(batch.size(), 0.0);
    const double inv = 1.0 / static_cast<double>(batch.size());
    ParallelSlices(batch.size(), [&](size_t, size_t b) {
      const auto row = static_cast<Eigen::Index>(b);
      LossAndGradient lg = ComputeLoss(
          loss_, std::span<const double>(scores_.row(row).data(), static_cast<size_t>(n)),
          batch[b]->targets);
      losses[b] = lg.loss;
      d_scores_.row(row) = Eigen::Map<const RowVector>(lg.grad.data(), n) * inv;
    });

    for (auto& g : grads_) g.setZero();
    grads_[0].noalias() = d_scores_.transpose() * hidden_;
    if (params_.has_bias()) grads_[1] = d_scores_.colwise().sum();
    d_hidden_.noalias() = d_scores_ * params_.item_embeddings();

    for (auto& slice : slice_grads_) {
      for (auto& g : slice) g.setZero();
    }
    ParallelSlices(batch.size(), [&](size_t slice, size_t b) {
      Vector dh = d_hidden_.row(static_cast<Eigen::Index>(b)).transpose();
      encoder_->Backward(params_, *caches_[b], dh, slice_grads_[slice]);
    });
    for (const auto& slice : slice_grads_) {
      for (size_t k = 0; k < grads_.size(); ++k) grads_[k] += slice[k];
    }
    return std::accumulate(losses.begin(), losses.end(), 0.0);
  }

  const std::vector<Matrix>& grads() const { return grads_; }

 private:
  template <typename Fn>
  void ParallelSlices(size_t count, Fn&& fn) {
    const size_t per = (count + kSlices - 1) / kSlices;
    const auto slices = static_cast<int>(kSlices);
#ifdef SEQREC_HAVE_OPENMP
#pragma omp parallel for schedule(static) num_threads(threads_) if (threads_ > 1)
#endif
    for (int s = 0; s < slices; ++s) {
      const size_t begin = static_cast<size_t>(s) * per;
      const size_t end = std::min(count, begin + per);
      for (size_t b = begin; b < end; ++b) fn(static_cast<size_t>(s), b);
    }
  }

  ModelParams& params_;
  const LossConfig& loss_;
  std::unique_ptr<Encoder> encoder_;
  int threads_;
  std::vector<std::unique_ptr<Encoder::Cache>> caches_;
  std::vector<std::vector<Matrix>> slice_grads_;
  std::vector<Matrix> grads_;
  Matrix hidden_, scores_, d_scores_, d_hidden_;
};

}  // namespace

void Validate(const TrainConfig& config) {
  Validate(config.adam());
  if (config.batch_size < 1) throw ConfigError("training.batch_size must be >= 1");
  if (!(config.budget_seconds > 0.0)) throw ConfigError("training.budget must be > 0");
  if (config.max_epochs < 0) throw ConfigError("training.max_epochs must be >= 0");
  if (config.validation_every < 1) {
    throw ConfigError("training.validation_every must be >= 1");
  }
  if (config.threads < 1) throw ConfigError("training.threads must be >= 1");
}

int SelectBestEpoch(const std::vector<EpochRecord>& epochs) {
  int best = 0;
  double best_ndcg = -1.0;
  for (const auto& e : epochs) {
    if (e.validation_ndcg && *e.validation_ndcg > best_ndcg) {
      best_ndcg = *e.validation_ndcg;
      best = e.epoch;
    }
  }
  if (best == 0 && !epochs.empty()) best = epochs.back().epoch;
  return best;
}

ModelScorer::ModelScorer(const ModelParams& params)
    : params_(params),
      encoder_(MakeEncoder(params.config)),
      cache_(encoder_->NewCache()) {}

ModelScorer::~ModelScorer() = default;

void ModelScorer::Score(UserIndex, std::span<const ItemIndex> input,
                        std::span<double> scores) const {
  CheckInput(input, params_.catalog_size, params_.config.max_len);
  Vector h;
  encoder_->Forward(params_, input, *cache_, nullptr, h);
  Eigen::Map<Vector> out(scores.data(), static_cast<Eigen::Index>(scores.size()));
  out.noalias() = params_.item_embeddings() * h;
  if (params_.has_bias()) out += params_.item_bias().row(0).transpose();
}

MetricSummary ValidationMetrics(const SplitDataset& split, const ModelParams& params) {
  ModelScorer scorer(params);
  return Summarize(
      Evaluate(split, scorer, Holdout::kValidation, 10, params.config.max_len));
}

TrainResult Train(const SplitDataset& split, const EncoderConfig& model_config,
                  const SamplerConfig& sampler_config,
                  const LossConfig& loss_config, const TrainConfig& train_config,
                  const EpochCallback& on_epoch, Clock clock) {
  Validate(train_config);
  Validate(model_config);
  Validate(loss_config.lambda);
  if (!clock) clock = SteadySeconds;
  if (split.users.empty()) throw DataError("training split is empty");

  std::vector<UserSequence> sequences;
  for (const auto& u : split.users) {
    if (u.train.size() >= 2) sequences.push_back({u.user, u.train});
  }
  if (sequences.empty()) throw DataError("no training sequence has two items");

  const Sampler sampler(sampler_config);
  ModelParams params = InitParameters(split.catalog_size, model_config,
                                      DeriveSeed(train_config.seed, "init"));
  Adam adam(train_config.adam(), params.blocks);
  LossConfig loss = loss_config;
  BatchTrainer trainer(params, loss, train_config.batch_size, train_config.threads);
  const uint64_t shuffle_seed = DeriveSeed(train_config.seed, "shuffle");
  const uint64_t dropout_seed = DeriveSeed(train_config.seed, "dropout");

  TrainResult result;
  result.params = params;
  double best_ndcg = -1.0;
  const double start = clock();
  std::vector<TrainingSample> samples(sequences.size());
  std::vector<size_t> order(sequences.size());

  for (int epoch = 1;; ++epoch) {
    if (train_config.max_epochs > 0 && epoch > train_config.max_epochs) break;
    if (epoch > 1 && clock() - start >= train_config.budget_seconds) break;

    const uint64_t sample_epoch =
        train_config.fixed_epoch_samples ? 1 : static_cast<uint64_t>(epoch);
    for (size_t s = 0; s < sequences.size(); ++s) {
      samples[s] = sampler.Sample(sequences[s], sample_epoch);
      auto& input = samples[s].input;
      if (input.size() > static_cast<size_t>(model_config.max_len)) {
        input.erase(input.begin(), input.end() - model_config.max_len);
      }
    }
    std::iota(order.begin(), order.end(), 0);
    Rng shuffle_rng(DeriveSeed(shuffle_seed, sample_epoch));
    for (size_t s = order.size(); s > 1; --s) {
      std::swap(order[s - 1], order[UniformIndex(shuffle_rng, s)]);
    }

    const uint64_t epoch_dropout = DeriveSeed(dropout_seed, static_cast<uint64_t>(epoch));
    double total_loss = 0.0;
    std::vector<const TrainingSample*> batch;
    std::vector<uint64_t> seeds;
    for (size_t begin = 0; begin < order.size();
         begin += static_cast<size_t>(train_config.batch_size)) {
      const size_t end =
          std::min(order.size(), begin + static_cast<size_t>(train_config.batch_size));
      batch.clear();
      seeds.clear();
      for (size_t k = begin; k < end; ++k) {
        batch.push_back(&samples[order[k]]);
        seeds.push_back(DeriveSeed(epoch_dropout, static_cast<uint64_t>(k)));
      }
      total_loss += trainer.Run(batch, seeds);
      adam.Step(params.blocks, trainer.grads(), params.names);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.mean_loss = total_loss / static_cast<double>(order.size());
    if (epoch % train_config.validation_every == 0 && !split.validation_users.empty()) {
      MetricSummary v = ValidationMetrics(split, params);
      record.validation_ndcg = v.ndcg;
      record.validation_recall = v.recall;
      if (v.ndcg > best_ndcg) {
        best_ndcg = v.ndcg;
        result.params = params;
      }
    }
    record.elapsed_seconds = clock() - start;
    result.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record);
  }

  result.history.best_epoch = SelectBestEpoch(result.history.epochs);
  if (best_ndcg < 0.0) result.params = params;
  const auto& epochs = result.history.epochs;
  result.history.budget_shorter_than_epoch =
      epochs.size() == 1 && epochs.front().elapsed_seconds > train_config.budget_seconds;
  return result;
}

}  // namespace seqrec
