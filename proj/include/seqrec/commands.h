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


#ifndef SEQREC_COMMANDS_H_
#define SEQREC_COMMANDS_H_

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "seqrec/config.h"
#include "seqrec/dataset.h"
#include "seqrec/evaluation.h"
#include "seqrec/synthetic.h"
#include "seqrec/training.h"

namespace seqrec {

namespace fs = std::filesystem;

// A split plus the original identifiers behind its dense indices.
struct PreparedSplit {
  SplitDataset split;
  std::vector<std::string> user_ids;
  std::vector<std::string> item_ids;
  DatasetStats stats;
};

// Ingest, filter, truncate, split. Writes nothing.
PreparedSplit PrepareSplit(const ExperimentConfig& config);

Json SplitToJson(const PreparedSplit& prepared);
PreparedSplit SplitFromJson(const Json& json);
PreparedSplit LoadSplit(const fs::path& out_dir);

// Writes split.json, split_manifest.jsonl, stats.csv and config.resolved.
PreparedSplit CmdPrepare(const ExperimentConfig& config, const fs::path& out_dir);

struct TrainSummary {
  std::string kind;
  int epochs = 0;
  int best_epoch = 0;
  std::optional<MetricSummary> validation;
};

// Needs split.json in `out_dir`. Writes checkpoint.bin, history.jsonl (no
// wall-clock fields), timing.jsonl and config.resolved.
TrainSummary CmdTrain(const ExperimentConfig& config, const fs::path& out_dir,
                      Clock clock = {});

// Scores test holdouts with the checkpoint (default: out_dir/checkpoint.bin)
// and writes report.csv, report.md and per_user.csv.
EvalReport CmdEval(const ExperimentConfig& config, const fs::path& out_dir,
                   const std::optional<fs::path>& checkpoint = std::nullopt);

// Reads per_user.csv and config.resolved from each run directory. Pairs name
// systems; empty means every pair. Writes report.csv and report.md.
EvalReport CmdCompare(const std::vector<fs::path>& run_dirs,
                      std::vector<std::pair<std::string, std::string>> pairs,
                      double alpha, const fs::path& out_dir);

struct SweepRow {
  double alpha = 0.0;
  MetricSummary test;
  int best_epoch = 0;
  int epochs = 0;
};

// One RSS model per alpha, sequentially, same seed and budget. Each point
// lives in out_dir/alpha_<i>; sweep.csv collects the rows.
std::vector<SweepRow> CmdSweepAlpha(const ExperimentConfig& config,
                                    const std::vector<double>& alphas,
                                    const fs::path& out_dir);

void CmdSynth(const MarkovConfig& config, const fs::path& path);

}  // namespace seqrec

#endif  // SEQREC_COMMANDS_H_
