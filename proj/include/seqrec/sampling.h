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

#ifndef SEQREC_SAMPLING_H_
#define SEQREC_SAMPLING_H_

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "seqrec/dataset.h"
#include "seqrec/random.h"

namespace seqrec {

enum class SamplingStrategy { kRss, kContinuation, kSlidingWindow, kShiftedSequence };

std::string ToString(SamplingStrategy strategy);
SamplingStrategy ParseSamplingStrategy(const std::string& name);

struct SamplerConfig {
  SamplingStrategy strategy = SamplingStrategy::kRss;
  double alpha = 0.8;  // recency base, (0, 1]
  double tau = 0.2;    // max fraction of a sequence used as targets, (0, 1]
  int k = 1;           // continuation target count
  int window = 10;     // sliding window length
  uint64_t seed = 0;
};

// Throws ConfigError when a parameter needed by the strategy is out of range.
void Validate(const SamplerConfig& config);

struct TrainingSample {
  std::vector<ItemIndex> input;
  // Sorted, unique.
  std::vector<ItemIndex> targets;
  UserIndex source_user = 0;

  bool operator==(const TrainingSample&) const = default;
};

// Position importance as a log-weight, so steep functions stay representable.
// Must be non-decreasing in `position` for a fixed length.
using RecencyFunction =
    std::function<double(size_t length, size_t position)>;

// log f(k) for f(k) = alpha^(n - k).
RecencyFunction ExponentialRecency(double alpha);
// log f(k) for f(k) = k + 1.
RecencyFunction LinearRecency();

// alpha^(n - k); throws on alpha outside (0, 1] or k outside [0, n).
double RecencyWeight(double alpha, size_t n, size_t k);

// Normalizes positive weights to sum to one.
std::vector<double> TargetProbabilities(std::span<const double> weights);

// Same as TargetProbabilities but from log-weights, shifted by their maximum
// before exponentiation.
std::vector<double> ProbabilitiesFromLogWeights(std::span<const double> log_weights);

// max(1, floor(n * tau)).
size_t TargetCount(size_t n, double tau);

// Draws `count` positions with replacement from `probabilities`.
std::vector<size_t> DrawPositions(std::span<const double> probabilities,
                                  size_t count, Rng& rng);

// Recency-based sampling: targets are the items at `TargetCount(n, tau)`
// positions drawn with replacement; the input keeps the remaining items in
// order. Requires n >= 2.
TrainingSample RssSample(const UserSequence& seq, double tau,
                         const RecencyFunction& recency, Rng& rng);
TrainingSample RssSample(const UserSequence& seq, const SamplerConfig& config,
                         Rng& rng);

// First n - k items as input, last k as targets. Requires 1 <= k < n.
TrainingSample ContinuationSample(const UserSequence& seq, size_t k);

// Continuation samples of every contiguous window; empty when n < window.
std::vector<TrainingSample> SlidingWindowSamples(const UserSequence& seq,
                                                 size_t window, size_t k);

// (items[0..j), items[j]) for j in [1, n); empty when n < 2.
std::vector<TrainingSample> ShiftedTargets(const UserSequence& seq);

// Produces one sample per sequence per epoch. The random stream is a pure
// function of (seed, epoch, user), so sample generation can be partitioned.
class Sampler {
 public:
  explicit Sampler(SamplerConfig config);

  const SamplerConfig& config() const { return config_; }

  TrainingSample Sample(const UserSequence& seq, uint64_t epoch) const;

 private:
  SamplerConfig config_;
  RecencyFunction recency_;
};

}  // namespace seqrec

#endif  // SEQREC_SAMPLING_H_
