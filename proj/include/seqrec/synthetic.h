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

#ifndef SEQREC_SYNTHETIC_H_
#define SEQREC_SYNTHETIC_H_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "seqrec/dataset.h"

namespace seqrec {

// First-order Markov interaction generator. With `communities` > 0, items are
// split into that many equal groups and the next item is uniform over the
// current item's group (itself excluded). Otherwise every item has a fixed
// list of `successors` with geometrically decaying probabilities. With
// probability `teleport` the next item is instead drawn from a Zipf
// popularity distribution, which also supplies start items.
struct MarkovConfig {
  size_t users = 2000;
  size_t items = 500;
  size_t min_length = 10;
  size_t max_length = 50;
  size_t communities = 50;
  size_t successors = 4;
  double successor_decay = 0.6;
  double teleport = 0.1;
  double zipf_exponent = 1.0;
  uint64_t seed = 1;
};

// Users "u<k>", items "i<k>", timestamps increasing per user.
std::vector<Interaction> GenerateMarkovInteractions(const MarkovConfig& config);

InteractionLog MakeLog(const std::vector<Interaction>& interactions);

void WriteInteractionsCsv(const std::vector<Interaction>& interactions,
                          const std::filesystem::path& path);

}  // namespace seqrec

#endif  // SEQREC_SYNTHETIC_H_
