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

#ifndef SEQREC_OPTIMIZER_H_
#define SEQREC_OPTIMIZER_H_

#include <cstdint>
#include <string>
#include <vector>

#include "seqrec/models.h"

namespace seqrec {

struct AdamConfig {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.98;
  double epsilon = 1e-8;
  // Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
};

void Validate(const AdamConfig& config);

// Adam with bias correction over a list of parameter blocks.
class Adam {
 public:
  Adam(const AdamConfig& config, const std::vector<Matrix>& blocks);

  // Throws RuntimeError naming the first block with a non-finite gradient;
  // parameters are left untouched in that case.
  void Step(std::vector<Matrix>& blocks, const std::vector<Matrix>& grads,
            const std::vector<std::string>& names);

  uint64_t step() const { return step_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  AdamConfig config_;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
  uint64_t step_ = 0;
};

}  // namespace seqrec

#endif  // SEQREC_OPTIMIZER_H_
