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

#include "seqrec/models.h"

#include <cmath>
#include <numbers>

#include "encoders.h"
#include "seqrec/error.h"

namespace seqrec {

namespace {

// Standard normal via Box-Muller on the portable uniform source.
double StandardNormal(Rng& rng) {
  double u1 = UniformUnit(rng);
  while (u1 <= 0.0) u1 = UniformUnit(rng);
  const double u2 = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double TruncatedNormal(Rng& rng, double scale) {
  double z = StandardNormal(rng);
  while (std::abs(z) > 2.0) z = StandardNormal(rng);
  return z * scale;
}

size_t FirstEncoderBlock(const EncoderConfig& config) {
  return config.use_bias ? 2 : 1;
}

}  // namespace

std::string ToString(EncoderKind kind) {
  switch (kind) {
    case EncoderKind::kRecurrent:
      return "recurrent";
    case EncoderKind::kCausalSelfAttention:
      return "attention";
    case EncoderKind::kConvolutional:
      return "convolutional";
  }
  return "unknown";
}

EncoderKind ParseEncoderKind(const std::string& name) {
  if (name == "recurrent" || name == "gru") return EncoderKind::kRecurrent;
  if (name == "attention" || name == "sasrec") {
    return EncoderKind::kCausalSelfAttention;
  }
  if (name == "convolutional" || name == "caser") {
    return EncoderKind::kConvolutional;
  }
  throw ConfigError("unknown encoder kind '" + name + "'");
}

void Validate(const EncoderConfig& config) {
  if (config.dim < 1) throw ConfigError("model.dim must be >= 1");
  if (config.max_len < 1) throw ConfigError("model.max_len must be >= 1");
  if (!(config.dropout >= 0.0 && config.dropout < 1.0)) {
    throw ConfigError("model.dropout must lie in [0, 1)");
  }
  if (!(config.init_scale > 0.0)) throw ConfigError("model.init_scale must be > 0");
  switch (config.kind) {
    case EncoderKind::kCausalSelfAttention:
      if (config.num_blocks < 1) throw ConfigError("model.blocks must be >= 1");
      if (config.num_heads < 1 || config.dim % config.num_heads != 0) {
        throw ConfigError("model.heads must divide model.dim");
      }
      if (config.ffn_dim < 0) throw ConfigError("model.ffn_dim must be >= 0");
      break;
    case EncoderKind::kConvolutional:
      if (config.conv_heights.empty()) {
        throw ConfigError("model.conv_heights must not be empty");
      }
      for (int h : config.conv_heights) {
        if (h < 1 || h > config.max_len) {
          throw ConfigError("model.conv_heights entries must lie in [1, max_len]");
        }
      }
      if (config.conv_horizontal_filters < 1 || config.conv_vertical_filters < 1) {
        throw ConfigError("model conv filter counts must be >= 1");
      }
      break;
    case EncoderKind::kRecurrent:
      break;
  }
}

size_t ModelParams::num_values() const {
  size_t total = 0;
  for (const auto& b : blocks) total += static_cast<size_t>(b.size());
  return total;
}

std::vector<Matrix> ZerosLike(const ModelParams& params) {
  std::vector<Matrix> grads;
  grads.reserve(params.blocks.size());
  for (const auto& b : params.blocks) grads.push_back(Matrix::Zero(b.rows(), b.cols()));
  return grads;
}

std::unique_ptr<Encoder> MakeEncoder(const EncoderConfig& config) {
  Validate(config);
  const size_t first = FirstEncoderBlock(config);
  switch (config.kind) {
    case EncoderKind::kCausalSelfAttention:
      return internal::MakeAttentionEncoder(config, first);
    case EncoderKind::kRecurrent:
      return internal::MakeRecurrentEncoder(config, first);
    case EncoderKind::kConvolutional:
      return internal::MakeConvolutionalEncoder(config, first);
  }
  throw ConfigError("unhandled encoder kind");
}

std::vector<ParamSpec> ParamLayout(const EncoderConfig& config,
                                   size_t catalog_size) {
  std::vector<ParamSpec> specs;
  specs.push_back({"item_embeddings", static_cast<Eigen::Index>(catalog_size),
                   config.dim, InitKind::kNormal});
  if (config.use_bias) {
    specs.push_back({"item_bias", 1, static_cast<Eigen::Index>(catalog_size),
                     InitKind::kZeros});
  }
  for (auto& s : MakeEncoder(config)->Layout()) specs.push_back(std::move(s));
  return specs;
}

ModelParams InitParameters(size_t catalog_size, const EncoderConfig& config,
                           uint64_t seed) {
  if (catalog_size < 1) throw ConfigError("catalog must hold at least one item");
  ModelParams params;
  params.config = config;
  params.catalog_size = catalog_size;
  params.seed = seed;
  Rng rng(seed);
  for (const auto& spec : ParamLayout(config, catalog_size)) {
    Matrix block(spec.rows, spec.cols);
    switch (spec.init) {
      case InitKind::kNormal:
        for (Eigen::Index i = 0; i < block.size(); ++i) {
          block.data()[i] = TruncatedNormal(rng, config.init_scale);
        }
        break;
      case InitKind::kZeros:
        block.setZero();
        break;
      case InitKind::kOnes:
        block.setOnes();
        break;
    }
    params.names.push_back(spec.name);
    params.blocks.push_back(std::move(block));
  }
  return params;
}

void CheckInput(std::span<const ItemIndex> input, size_t catalog_size,
                int max_len) {
  if (input.empty() || input.size() > static_cast<size_t>(max_len)) {
    throw DataError("input length " + std::to_string(input.size()) +
                    " outside [1, " + std::to_string(max_len) + "]");
  }
  for (ItemIndex i : input) {
    if (i < 0 || static_cast<size_t>(i) >= catalog_size) {
      throw DataError("item index " + std::to_string(i) + " outside catalog");
    }
  }
}

Vector EncodeSequence(const ModelParams& params, std::span<const ItemIndex> input) {
  CheckInput(input, params.catalog_size, params.config.max_len);
  auto encoder = MakeEncoder(params.config);
  auto cache = encoder->NewCache();
  Vector out;
  encoder->Forward(params, input, *cache, nullptr, out);
  return out;
}

Vector ScoreCatalog(const ModelParams& params, const Vector& embedding) {
  if (embedding.size() != params.config.dim) {
    throw DataError("embedding has " + std::to_string(embedding.size()) +
                    " entries, model dim is " + std::to_string(params.config.dim));
  }
  Vector scores = params.item_embeddings() * embedding;
  if (params.has_bias()) scores += params.item_bias().row(0).transpose();
  return scores;
}

std::vector<Matrix> ScoreGradients(const ModelParams& params,
                                   std::span<const ItemIndex> input,
                                   const Vector& d_scores) {
  CheckInput(input, params.catalog_size, params.config.max_len);
  auto encoder = MakeEncoder(params.config);
  auto cache = encoder->NewCache();
  Vector h;
  encoder->Forward(params, input, *cache, nullptr, h);
  std::vector<Matrix> grads = ZerosLike(params);
  grads[0].noalias() += d_scores * h.transpose();
  if (params.has_bias()) grads[1] += d_scores.transpose();
  Vector d_h = params.item_embeddings().transpose() * d_scores;
  encoder->Backward(params, *cache, d_h, grads);
  return grads;
}

}  // namespace seqrec
