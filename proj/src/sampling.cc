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

#include "seqrec/sampling.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "seqrec/error.h"

namespace seqrec {

std::string ToString(SamplingStrategy strategy) {
  switch (strategy) {
    case SamplingStrategy::kRss:
      return "rss";
    case SamplingStrategy::kContinuation:
      return "continuation";
    case SamplingStrategy::kSlidingWindow:
      return "sliding_window";
    case SamplingStrategy::kShiftedSequence:
      return "shifted_sequence";
  }
  return "unknown";
}

SamplingStrategy ParseSamplingStrategy(const std::string& name) {
  if (name == "rss") return SamplingStrategy::kRss;
  if (name == "continuation") return SamplingStrategy::kContinuation;
  if (name == "sliding_window") return SamplingStrategy::kSlidingWindow;
  if (name == "shifted_sequence") return SamplingStrategy::kShiftedSequence;
  throw ConfigError("unknown sampling strategy '" + name + "'");
}

void Validate(const SamplerConfig& config) {
  switch (config.strategy) {
    case SamplingStrategy::kRss:
      if (!(config.alpha > 0.0 && config.alpha <= 1.0)) {
        throw ConfigError("sampler.alpha must lie in (0, 1]");
      }
      if (!(config.tau > 0.0 && config.tau <= 1.0)) {
        throw ConfigError("sampler.tau must lie in (0, 1]");
      }
      break;
    case SamplingStrategy::kContinuation:
      if (config.k < 1) throw ConfigError("sampler.k must be >= 1");
      break;
    case SamplingStrategy::kSlidingWindow:
      if (config.k < 1) throw ConfigError("sampler.k must be >= 1");
      if (config.window < 2 || config.window < config.k + 1) {
        throw ConfigError("sampler.window must be >= max(2, k + 1)");
      }
      break;
    case SamplingStrategy::kShiftedSequence:
      break;
  }
}

RecencyFunction ExponentialRecency(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in (0, 1]");
  }
  const double log_alpha = std::log(alpha);
  return [log_alpha](size_t n, size_t k) {
    return static_cast<double>(n - k) * log_alpha;
  };
}

RecencyFunction LinearRecency() {
  return [](size_t, size_t k) { return std::log(static_cast<double>(k + 1)); };
}

double RecencyWeight(double alpha, size_t n, size_t k) {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    throw ConfigError("alpha must lie in (0, 1]");
  }
  if (k >= n) throw ConfigError("position out of range");
  return std::pow(alpha, static_cast<double>(n - k));
}

std::vector<double> TargetProbabilities(std::span<const double> weights) {
  if (weights.empty()) throw ConfigError("no weights to normalize");
  double total = 0.0;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw ConfigError("weights must be positive and finite");
    }
    total += w;
  }
  std::vector<double> probs(weights.begin(), weights.end());
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<double> ProbabilitiesFromLogWeights(
    std::span<const double> log_weights) {
  if (log_weights.empty()) throw ConfigError("no weights to normalize");
  double max_log = -std::numeric_limits<double>::infinity();
  for (double lw : log_weights) {
    if (std::isnan(lw) || lw == std::numeric_limits<double>::infinity()) {
      throw ConfigError("log-weights must be finite");
    }
    max_log = std::max(max_log, lw);
  }
  if (!std::isfinite(max_log)) throw ConfigError("all weights are zero");
  std::vector<double> probs(log_weights.size());
  double total = 0.0;
  for (size_t i = 0; i < probs.size(); ++i) {
    probs[i] = std::exp(log_weights[i] - max_log);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

size_t TargetCount(size_t n, double tau) {
  if (n < 1) throw ConfigError("sequence length must be >= 1");
  if (!(tau > 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in (0, 1]");
  // Guard against n * tau landing just below an integer, e.g. 5 * 0.2.
  const double product = static_cast<double>(n) * tau;
  auto count = static_cast<size_t>(std::floor(product + 1e-9));
  return std::clamp<size_t>(count, 1, n);
}

std::vector<size_t> DrawPositions(std::span<const double> probabilities,
                                  size_t count, Rng& rng) {
  std::vector<double> cdf(probabilities.size());
  std::partial_sum(probabilities.begin(), probabilities.end(), cdf.begin());
  std::vector<size_t> drawn;
  drawn.reserve(count);
  for (size_t c = 0; c < count; ++c) {
    const double u = UniformUnit(rng) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    size_t pos = static_cast<size_t>(it - cdf.begin());
    drawn.push_back(std::min(pos, cdf.size() - 1));
  }
  return drawn;
}

TrainingSample RssSample(const UserSequence& seq, double tau,
                         const RecencyFunction& recency, Rng& rng) {
  const size_t n = seq.size();
  if (n < 2) throw DataError("recency sampling needs at least 2 items");
  std::vector<double> log_weights(n);
  for (size_t k = 0; k < n; ++k) log_weights[k] = recency(n, k);
  const std::vector<double> probs = ProbabilitiesFromLogWeights(log_weights);
  const size_t count = TargetCount(n, tau);

  std::vector<bool> sampled(n, false);
  // Redraw in the rare case every position was drawn (tau close to 1).
  while (true) {
    std::fill(sampled.begin(), sampled.end(), false);
    for (size_t pos : DrawPositions(probs, count, rng)) sampled[pos] = true;
    if (std::find(sampled.begin(), sampled.end(), false) != sampled.end()) break;
  }

  TrainingSample sample;
  sample.source_user = seq.user;
  for (size_t k = 0; k < n; ++k) {
    if (sampled[k]) {
      sample.targets.push_back(seq.items[k]);
    } else {
      sample.input.push_back(seq.items[k]);
    }
  }
  std::sort(sample.targets.begin(), sample.targets.end());
  sample.targets.erase(std::unique(sample.targets.begin(), sample.targets.end()),
                       sample.targets.end());
  return sample;
}

TrainingSample RssSample(const UserSequence& seq, const SamplerConfig& config,
                         Rng& rng) {
  return RssSample(seq, config.tau, ExponentialRecency(config.alpha), rng);
}

TrainingSample ContinuationSample(const UserSequence& seq, size_t k) {
  const size_t n = seq.size();
  if (k < 1 || k >= n) {
    throw DataError("continuation needs 1 <= k < n (k=" + std::to_string(k) +
                    ", n=" + std::to_string(n) + ")");
  }
  TrainingSample sample;
  sample.source_user = seq.user;
  sample.input.assign(seq.items.begin(), seq.items.end() - static_cast<std::ptrdiff_t>(k));
  sample.targets.assign(seq.items.end() - static_cast<std::ptrdiff_t>(k), seq.items.end());
  std::sort(sample.targets.begin(), sample.targets.end());
  sample.targets.erase(std::unique(sample.targets.begin(), sample.targets.end()),
                       sample.targets.end());
  return sample;
}

std::vector<TrainingSample> SlidingWindowSamples(const UserSequence& seq,
                                                 size_t window, size_t k) {
  if (window < k + 1) throw ConfigError("window must be >= k + 1");
  std::vector<TrainingSample> samples;
  if (seq.size() < window) return samples;
  samples.reserve(seq.size() - window + 1);
  UserSequence sub;
  sub.user = seq.user;
  for (size_t start = 0; start + window <= seq.size(); ++start) {
    sub.items.assign(seq.items.begin() + static_cast<std::ptrdiff_t>(start),
                     seq.items.begin() + static_cast<std::ptrdiff_t>(start + window));
    samples.push_back(ContinuationSample(sub, k));
  }
  return samples;
}

std::vector<TrainingSample> ShiftedTargets(const UserSequence& seq) {
  std::vector<TrainingSample> samples;
  if (seq.size() < 2) return samples;
  samples.reserve(seq.size() - 1);
  for (size_t j = 1; j < seq.size(); ++j) {
    TrainingSample sample;
    sample.source_user = seq.user;
    sample.input.assign(seq.items.begin(), seq.items.begin() + static_cast<std::ptrdiff_t>(j));
    sample.targets = {seq.items[j]};
    samples.push_back(std::move(sample));
  }
  return samples;
}

Sampler::Sampler(SamplerConfig config) : config_(config) {
  Validate(config_);
  if (config_.strategy == SamplingStrategy::kRss) {
    recency_ = ExponentialRecency(config_.alpha);
  }
}

TrainingSample Sampler::Sample(const UserSequence& seq, uint64_t epoch) const {
  Rng rng(DeriveSeed(DeriveSeed(config_.seed, epoch),
                     static_cast<uint64_t>(seq.user)));
  switch (config_.strategy) {
    case SamplingStrategy::kRss:
      return RssSample(seq, config_.tau, recency_, rng);
    case SamplingStrategy::kContinuation: {
      // Short sequences fall back to next-item continuation.
      size_t k = std::min<size_t>(static_cast<size_t>(config_.k), seq.size() - 1);
      return ContinuationSample(seq, k);
    }
    case SamplingStrategy::kSlidingWindow: {
      size_t window = std::min<size_t>(static_cast<size_t>(config_.window), seq.size());
      size_t k = std::min<size_t>(static_cast<size_t>(config_.k), window - 1);
      auto samples = SlidingWindowSamples(seq, window, k);
      return samples[UniformIndex(rng, samples.size())];
    }
    case SamplingStrategy::kShiftedSequence: {
      auto samples = ShiftedTargets(seq);
      if (samples.empty()) throw DataError("shifted sequence needs >= 2 items");
      return samples[UniformIndex(rng, samples.size())];
    }
  }
  throw RuntimeError("unhandled sampling strategy");
}

}  // namespace seqrec
