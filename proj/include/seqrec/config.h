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


#ifndef SEQREC_CONFIG_H_
#define SEQREC_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

#include "seqrec/baselines.h"
#include "seqrec/dataset.h"
#include "seqrec/losses.h"
#include "seqrec/models.h"
#include "seqrec/sampling.h"
#include "seqrec/training.h"

namespace seqrec {

using Json = nlohmann::ordered_json;

struct DatasetConfig {
  std::string path;
  ColumnSpec columns;
  size_t min_len = 5;
  size_t max_len = 50;
  size_t validation_users = 1024;
};

// Model kinds: the three encoders plus the popularity, mf_bpr and random
// baselines.
enum class ModelKind { kEncoder, kPopularity, kMfBpr, kRandom };

struct ModelConfig {
  ModelKind kind = ModelKind::kEncoder;
  EncoderConfig encoder;
  MfBprConfig mf_bpr;
};

std::string ModelKindName(const ModelConfig& config);

struct EvaluationConfig {
  int k = 10;
  double alpha = 0.05;
};

struct ExperimentConfig {
  std::string name = "run";
  uint64_t seed = 0;
  std::string output_dir = "out";
  DatasetConfig dataset;
  SamplerConfig sampler;
  ModelConfig model;
  LossConfig loss;
  TrainConfig training;
  EvaluationConfig evaluation;
};

// Accepts "90", "90s", "1.5m", "15m", "1h", "250ms". Throws ConfigError.
double ParseDuration(const std::string& text);
std::string FormatDuration(double seconds);

// Strict: unknown keys and type mismatches throw ConfigError naming the key
// path (e.g. "training.budget"). Missing keys keep their defaults.
ExperimentConfig ParseConfig(const Json& json);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Fully resolved configuration; ParseConfig(ToJson(c)) reproduces c.
Json ToJson(const ExperimentConfig& config);
Json ToJson(const EncoderConfig& config);
EncoderConfig EncoderConfigFromJson(const Json& json);

// Sets sampler, training and baseline seeds from the global seed.
void ResolveSeeds(ExperimentConfig& config);
uint64_t SplitSeed(const ExperimentConfig& config);

// FNV-1a of the compact serialization.
uint64_t ConfigHash(const Json& json);

}  // namespace seqrec

#endif  // SEQREC_CONFIG_H_
