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

#include "seqrec/synthetic.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <numeric>
#include <string>

#include "seqrec/error.h"
#include "seqrec/io.h"
#include "seqrec/random.h"
#include "seqrec/sampling.h"

namespace seqrec {

std::vector<Interaction> GenerateMarkovInteractions(const MarkovConfig& config) {
  if (config.items < 2 || config.users < 1) {
    throw ConfigError("synthetic data needs >= 2 items and >= 1 user");
  }
  if (config.min_length < 1 || config.max_length < config.min_length) {
    throw ConfigError("synthetic lengths must satisfy 1 <= min <= max");
  }
  if (config.communities == 0 &&
      (config.successors < 1 || config.successors >= config.items)) {
    throw ConfigError("successor count must lie in [1, items)");
  }
  Rng rng(config.seed);

  std::vector<double> popularity(config.items);
  for (size_t i = 0; i < config.items; ++i) {
    popularity[i] = 1.0 / std::pow(static_cast<double>(i + 1), config.zipf_exponent);
  }
  popularity = TargetProbabilities(popularity);

  std::vector<double> successor_probs(config.successors);
  for (size_t s = 0; s < config.successors; ++s) {
    successor_probs[s] = std::pow(config.successor_decay, static_cast<double>(s));
  }
  successor_probs = TargetProbabilities(successor_probs);

  std::vector<std::vector<size_t>> successors(config.items);
  if (config.communities > 0) {
    if (config.items / config.communities < 2) {
      throw ConfigError("communities need at least two items each");
    }
    // Random balanced assignment of items to groups.
    std::vector<size_t> perm(config.items);
    std::iota(perm.begin(), perm.end(), 0);
    for (size_t k = perm.size(); k > 1; --k) {
      std::swap(perm[k - 1], perm[UniformIndex(rng, k)]);
    }
    std::vector<std::vector<size_t>> groups(config.communities);
    for (size_t k = 0; k < perm.size(); ++k) {
      groups[k % config.communities].push_back(perm[k]);
    }
    for (const auto& g : groups) {
      for (size_t i : g) {
        for (size_t j : g) {
          if (j != i) successors[i].push_back(j);
        }
      }
    }
    successor_probs.clear();
  }
  for (size_t i = 0; i < config.items && config.communities == 0; ++i) {
    while (successors[i].size() < config.successors) {
      const size_t next = UniformIndex(rng, config.items);
      if (next == i) continue;
      if (std::find(successors[i].begin(), successors[i].end(), next) !=
          successors[i].end()) {
        continue;
      }
      successors[i].push_back(next);
    }
  }

  std::vector<Interaction> out;
  for (size_t u = 0; u < config.users; ++u) {
    const size_t length =
        config.min_length + UniformIndex(rng, config.max_length - config.min_length + 1);
    size_t item = DrawPositions(popularity, 1, rng)[0];
    const std::string user = "u" + std::to_string(u);
    for (size_t t = 0; t < length; ++t) {
      out.push_back({user, "i" + std::to_string(item), static_cast<double>(t)});
      if (UniformUnit(rng) < config.teleport) {
        item = DrawPositions(popularity, 1, rng)[0];
      } else {
        const auto& next = successors[item];
        item = successor_probs.empty()
                   ? next[UniformIndex(rng, next.size())]
                   : next[DrawPositions(successor_probs, 1, rng)[0]];
      }
    }
  }
  return out;
}

InteractionLog MakeLog(const std::vector<Interaction>& interactions) {
  InteractionLog log;
  for (const auto& i : interactions) log.Add(i);
  return log;
}

void WriteInteractionsCsv(const std::vector<Interaction>& interactions,
                          const std::filesystem::path& path) {
  std::ostringstream out;
  for (const auto& i : interactions) {
    out << i.user_id << "," << i.item_id << "," << static_cast<long long>(i.timestamp)
        << "\n";
  }
  WriteFileAtomic(path, out.str());
}

}  // namespace seqrec
