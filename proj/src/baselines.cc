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

#include "seqrec/baselines.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_set>

#include "seqrec/error.h"
#include "seqrec/losses.h"
#include "seqrec/random.h"

namespace seqrec {

std::vector<double> PopularityScores(const std::vector<UserSequence>& train,
                                     size_t catalog_size) {
  std::vector<double> counts(catalog_size, 0.0);
  for (const auto& seq : train) {
    for (ItemIndex i : seq.items) counts.at(static_cast<size_t>(i)) += 1.0;
  }
  return counts;
}

std::vector<double> PopularityScores(const SplitDataset& split) {
  std::vector<double> counts(split.catalog_size, 0.0);
  for (const auto& u : split.users) {
    for (ItemIndex i : u.train) counts.at(static_cast<size_t>(i)) += 1.0;
  }
  return counts;
}

void PopularityScorer::Score(UserIndex, std::span<const ItemIndex>,
                             std::span<double> scores) const {
  std::copy(counts_.begin(), counts_.end(), scores.begin());
}

void RandomScorer::Score(UserIndex user, std::span<const ItemIndex>,
                         std::span<double> scores) const {
  Rng rng(DeriveSeed(seed_, static_cast<uint64_t>(user)));
  for (double& s : scores) s = UniformUnit(rng);
}

MfBprModel InitMfBpr(size_t num_users, size_t catalog_size, int dim,
                     double init_scale, uint64_t seed) {
  MfBprModel model;
  model.user_embeddings.resize(static_cast<Eigen::Index>(num_users), dim);
  model.item_embeddings.resize(static_cast<Eigen::Index>(catalog_size), dim);
  Rng rng(seed);
  for (Matrix* m : {&model.user_embeddings, &model.item_embeddings}) {
    for (Eigen::Index i = 0; i < m->size(); ++i) {
      m->data()[i] = (2.0 * UniformUnit(rng) - 1.0) * init_scale;
    }
  }
  return model;
}

double MfBprUpdate(MfBprModel& model, UserIndex user, ItemIndex pos_item,
                   ItemIndex neg_item, double learning_rate,
                   double regularization) {
  if (pos_item == neg_item) throw DataError("BPR needs distinct items");
  const BprResult r =
      BprLossAndGradient(model.Score(user, pos_item), model.Score(user, neg_item));
  const RowVector u = model.user_embeddings.row(user);
  const RowVector p = model.item_embeddings.row(pos_item);
  const RowVector q = model.item_embeddings.row(neg_item);
  // d(loss)/du = g_pos * p + g_neg * q; d/dp = g_pos * u; d/dq = g_neg * u.
  model.user_embeddings.row(user) -=
      learning_rate * (r.grad_pos * p + r.grad_neg * q + regularization * u);
  model.item_embeddings.row(pos_item) -=
      learning_rate * (r.grad_pos * u + regularization * p);
  model.item_embeddings.row(neg_item) -=
      learning_rate * (r.grad_neg * u + regularization * q);
  return r.loss;
}

MfBprModel TrainMfBpr(const SplitDataset& split, const MfBprConfig& config,
                      std::vector<double>* epoch_losses) {
  UserIndex max_user = 0;
  for (const auto& u : split.users) max_user = std::max(max_user, u.user);
  MfBprModel model = InitMfBpr(static_cast<size_t>(max_user) + 1, split.catalog_size,
                               config.dim, config.init_scale, config.seed);
  std::vector<std::pair<UserIndex, ItemIndex>> events;
  std::vector<std::unordered_set<ItemIndex>> seen(split.users.size());
  std::vector<size_t> slot(static_cast<size_t>(max_user) + 1, 0);
  for (size_t k = 0; k < split.users.size(); ++k) {
    slot[split.users[k].user] = k;
    for (ItemIndex i : split.users[k].train) {
      events.emplace_back(split.users[k].user, i);
      seen[k].insert(i);
    }
  }
  Rng rng(DeriveSeed(config.seed, "mf_bpr.sgd"));
  const uint64_t n_items = split.catalog_size;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double total = 0.0;
    for (size_t step = 0; step < events.size(); ++step) {
      const auto [user, pos] = events[UniformIndex(rng, events.size())];
      const auto& user_seen = seen[slot[user]];
      if (user_seen.size() >= n_items) continue;
      ItemIndex neg = static_cast<ItemIndex>(UniformIndex(rng, n_items));
      while (user_seen.contains(neg)) {
        neg = static_cast<ItemIndex>(UniformIndex(rng, n_items));
      }
      total += MfBprUpdate(model, user, pos, neg, config.learning_rate,
                           config.regularization);
    }
    if (epoch_losses != nullptr) {
      epoch_losses->push_back(events.empty() ? 0.0
                                             : total / static_cast<double>(events.size()));
    }
  }
  return model;
}

void MfBprScorer::Score(UserIndex user, std::span<const ItemIndex>,
                        std::span<double> scores) const {
  Eigen::Map<Vector> out(scores.data(), static_cast<Eigen::Index>(scores.size()));
  out.noalias() = model_.item_embeddings * model_.user_embeddings.row(user).transpose();
}

}  // namespace seqrec
