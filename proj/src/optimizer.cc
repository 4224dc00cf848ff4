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

#include "seqrec/optimizer.h"

#include <cmath>

#include "seqrec/error.h"

namespace seqrec {

void Validate(const AdamConfig& config) {
  if (!(config.learning_rate >= 0.0)) {
    throw ConfigError("training.learning_rate must be >= 0");
  }
  if (!(config.beta1 >= 0.0 && config.beta1 < 1.0)) {
    throw ConfigError("training.beta1 must lie in [0, 1)");
  }
  if (!(config.beta2 >= 0.0 && config.beta2 < 1.0)) {
    throw ConfigError("training.beta2 must lie in [0, 1)");
  }
  if (!(config.epsilon > 0.0)) throw ConfigError("training.epsilon must be > 0");
  if (!(config.clip_norm >= 0.0)) throw ConfigError("training.clip_norm must be >= 0");
}

Adam::Adam(const AdamConfig& config, const std::vector<Matrix>& blocks)
    : config_(config) {
  Validate(config_);
  for (const auto& b : blocks) {
    m_.push_back(Matrix::Zero(b.rows(), b.cols()));
    v_.push_back(Matrix::Zero(b.rows(), b.cols()));
  }
}

void Adam::Step(std::vector<Matrix>& blocks, const std::vector<Matrix>& grads,
                const std::vector<std::string>& names) {
  if (blocks.size() != m_.size() || grads.size() != m_.size()) {
    throw RuntimeError("optimizer state does not match parameter blocks");
  }
  double sq_norm = 0.0;
  for (size_t b = 0; b < grads.size(); ++b) {
    if (grads[b].rows() != m_[b].rows() || grads[b].cols() != m_[b].cols()) {
      throw RuntimeError("gradient shape mismatch in block " +
                         (b < names.size() ? names[b] : std::to_string(b)));
    }
    if (!grads[b].allFinite()) {
      throw RuntimeError("non-finite gradient in block " +
                         (b < names.size() ? names[b] : std::to_string(b)));
    }
    sq_norm += grads[b].squaredNorm();
  }
  double scale = 1.0;
  if (config_.clip_norm > 0.0) {
    const double norm = std::sqrt(sq_norm);
    if (norm > config_.clip_norm) scale = config_.clip_norm / norm;
  }

  ++step_;
  const double t = static_cast<double>(step_);
  const double correction1 = 1.0 - std::pow(config_.beta1, t);
  const double correction2 = 1.0 - std::pow(config_.beta2, t);
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  for (size_t b = 0; b < blocks.size(); ++b) {
    auto g = (grads[b].array() * scale);
    m_[b].array() = b1 * m_[b].array() + (1.0 - b1) * g;
    v_[b].array() = b2 * v_[b].array() + (1.0 - b2) * g.square();
    blocks[b].array() -= config_.learning_rate * (m_[b].array() / correction1) /
                         ((v_[b].array() / correction2).sqrt() + config_.epsilon);
  }
}

}  // namespace seqrec
