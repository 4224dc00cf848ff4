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


#ifndef SEQREC_CHECKPOINT_H_
#define SEQREC_CHECKPOINT_H_

#include <filesystem>
#include <string>
#include <vector>

#include "seqrec/baselines.h"
#include "seqrec/config.h"
#include "seqrec/models.h"

namespace seqrec {

// On disk: the 8 bytes "SEQRECK1", a little-endian uint64 header length, a
// JSON header, then every block's values as little-endian doubles in
// row-major order.
struct Checkpoint {
  Json header;  // "blocks" (names and shapes) is filled in on write
  std::vector<std::string> names;
  std::vector<Matrix> blocks;
};

std::string SerializeCheckpoint(const Checkpoint& checkpoint);
Checkpoint DeserializeCheckpoint(const std::string& bytes);

void WriteCheckpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
// Throws DataError for a missing, truncated or malformed file.
Checkpoint ReadCheckpoint(const std::filesystem::path& path);

// Header keys: kind, catalog_size, seed, encoder, config_hash.
Checkpoint ToCheckpoint(const ModelParams& params, uint64_t config_hash = 0);
ModelParams ModelFromCheckpoint(const Checkpoint& checkpoint);

Checkpoint PopularityCheckpoint(const std::vector<double>& counts);
std::vector<double> PopularityFromCheckpoint(const Checkpoint& checkpoint);

Checkpoint MfBprCheckpoint(const MfBprModel& model);
MfBprModel MfBprFromCheckpoint(const Checkpoint& checkpoint);

}  // namespace seqrec

#endif  // SEQREC_CHECKPOINT_H_
