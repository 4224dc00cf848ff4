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

#ifndef SEQREC_SRC_ENCODERS_H_
#define SEQREC_SRC_ENCODERS_H_

#include <memory>

#include "seqrec/models.h"

namespace seqrec::internal {

std::unique_ptr<Encoder> MakeAttentionEncoder(const EncoderConfig& config,
                                              size_t first_block);
std::unique_ptr<Encoder> MakeRecurrentEncoder(const EncoderConfig& config,
                                              size_t first_block);
std::unique_ptr<Encoder> MakeConvolutionalEncoder(const EncoderConfig& config,
                                                  size_t first_block);

}  // namespace seqrec::internal

#endif  // SEQREC_SRC_ENCODERS_H_
