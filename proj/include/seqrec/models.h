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

#ifndef SEQREC_MODELS_H_
#define SEQREC_MODELS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "seqrec/dataset.h"
#include "seqrec/random.h"

namespace seqrec {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;

enum class EncoderKind { kRecurrent, kCausalSelfAttention, kConvolutional };

std::string ToString(EncoderKind kind);
EncoderKind ParseEncoderKind(const std::string& name);

struct EncoderConfig {
  EncoderKind kind = EncoderKind::kCausalSelfAttention;
  int dim = 64;
  // Attention.
  int num_blocks = 2;
  int num_heads = 1;
  int ffn_dim = 0;  // 0 means `dim`
  // Convolutional: horizontal filter heights, filters per height, and the
  // number of vertical filters.
  std::vector<int> conv_heights = {1, 2, 3, 4};
  int conv_horizontal_filters = 16;
  int conv_vertical_filters = 4;

  int max_len = 50;
  double dropout = 0.2;
  bool use_bias = false;
  double init_scale = 0.02;

  bool operator==(const EncoderConfig&) const = default;
};

void Validate(const EncoderConfig& config);

enum class InitKind { kNormal, kZeros, kOnes };

struct ParamSpec {
  std::string name;
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  InitKind init = InitKind::kNormal;
};

// Parameters in a fixed block order: item embeddings first, then the optional
// item bias (1 x |I|), then the encoder's own blocks.
struct ModelParams {
  EncoderConfig config;
  size_t catalog_size = 0;
  uint64_t seed = 0;
  std::vector<std::string> names;
  std::vector<Matrix> blocks;

  const Matrix& item_embeddings() const { return blocks[0]; }
  Matrix& item_embeddings() { return blocks[0]; }
  bool has_bias() const { return config.use_bias; }
  const Matrix& item_bias() const { return blocks[1]; }
  size_t num_values() const;
};

// Zero-filled blocks shaped like `params`.
std::vector<Matrix> ZerosLike(const ModelParams& params);

// Sequence encoder with hand-written reverse mode. Implementations are
// stateless; per-call intermediates live in a Cache.
class Encoder {
 public:
  struct Cache {
    virtual ~Cache() = default;
  };

  virtual ~Encoder() = default;

  const EncoderConfig& config() const { return config_; }
  // Encoder blocks, appended after the item embedding (and bias) blocks.
  virtual std::vector<ParamSpec> Layout() const = 0;
  virtual std::unique_ptr<Cache> NewCache() const = 0;

  // Encodes `input` (1 <= size <= max_len) into a `dim` vector. Dropout is
  // applied only when `dropout_rng` is non-null.
  virtual void Forward(const ModelParams& params,
                       std::span<const ItemIndex> input, Cache& cache,
                       Rng* dropout_rng, Vector& out) const = 0;

  // Accumulates d(loss)/d(params) into `grads` given d(loss)/d(out).
  virtual void Backward(const ModelParams& params, const Cache& cache,
                        const Vector& d_out, std::vector<Matrix>& grads) const = 0;

 protected:
  Encoder(const EncoderConfig& config, size_t first_block)
      : config_(config), first_block_(first_block) {}

  const EncoderConfig config_;
  const size_t first_block_;
};

std::unique_ptr<Encoder> MakeEncoder(const EncoderConfig& config);

// Shapes of every block for a catalog of `catalog_size` items.
std::vector<ParamSpec> ParamLayout(const EncoderConfig& config,
                                   size_t catalog_size);

// Truncated normal (cut at two standard deviations) with `init_scale`; layer
// norm gains are one and biases zero. Deterministic in `seed`.
ModelParams InitParameters(size_t catalog_size, const EncoderConfig& config,
                           uint64_t seed);

// Inference-mode forward pass. Throws DataError for out-of-range items or
// input lengths outside [1, max_len].
Vector EncodeSequence(const ModelParams& params, std::span<const ItemIndex> input);

// scores[i] = dot(item_embeddings[i], embedding) + bias[i].
Vector ScoreCatalog(const ModelParams& params, const Vector& embedding);

// Gradients of sum_i d_scores[i] * score_i w.r.t. every block, for one input
// in inference mode. Used by the finite-difference checks.
std::vector<Matrix> ScoreGradients(const ModelParams& params,
                                   std::span<const ItemIndex> input,
                                   const Vector& d_scores);

void CheckInput(std::span<const ItemIndex> input, size_t catalog_size,
                int max_len);

}  // namespace seqrec

#endif  // SEQREC_MODELS_H_
