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

#ifndef SEQREC_EVALUATION_H_
#define SEQREC_EVALUATION_H_

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "seqrec/dataset.h"

namespace seqrec {

// 1 + number of other items scoring at least as high as the holdout, i.e.
// ties count against the holdout. Throws on non-finite scores.
size_t RankOfHoldout(std::span<const double> scores, ItemIndex holdout);

struct RankMetrics {
  int recall = 0;
  double ndcg = 0.0;
};

// Single relevant item: recall = [rank <= k], ndcg = 1 / log2(rank + 1).
RankMetrics MetricsForRank(size_t rank, int k = 10);

struct UserMetric {
  UserIndex user = 0;
  size_t rank = 0;
  int recall_at_k = 0;
  double ndcg_at_k = 0.0;
};

struct TTestResult {
  double t = 0.0;
  double p_value = 1.0;
  size_t n = 0;
};

// Two-sided paired t-test on a - b with n - 1 degrees of freedom. All-zero
// differences give t = 0, p = 1; a constant non-zero shift gives t = +-inf,
// p = 0.
TTestResult PairedTTest(std::span<const double> a, std::span<const double> b);

// flags[i] = raw_p[i] < alpha / raw_p.size().
std::vector<bool> Bonferroni(std::span<const double> raw_p, double alpha = 0.05);

// Scores every catalog item for a user given the items preceding the holdout.
class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual void Score(UserIndex user, std::span<const ItemIndex> input,
                     std::span<double> scores) const = 0;
};

enum class Holdout { kValidation, kTest };

// Ranks each user's holdout against the full catalog. For validation only
// the validation users are evaluated. Inputs are cut to the `max_len` most
// recent items when `max_len` > 0.
std::vector<UserMetric> Evaluate(const SplitDataset& split, const Scorer& scorer,
                                 Holdout holdout, int k = 10, int max_len = 0);

struct MetricSummary {
  double recall = 0.0;
  double ndcg = 0.0;
  size_t n = 0;
};

MetricSummary Summarize(std::span<const UserMetric> metrics);

struct SystemResult {
  std::string name;
  std::vector<UserMetric> per_user;
  MetricSummary summary;
};

struct Comparison {
  std::string system_a;
  std::string system_b;
  std::string metric;  // "recall@K" or "ndcg@K"
  double mean_a = 0.0;
  double mean_b = 0.0;
  TTestResult test;
  size_t family_size = 1;
  double alpha = 0.05;
  bool significant = false;
};

struct EvalReport {
  int k = 10;
  std::vector<SystemResult> systems;
  std::vector<Comparison> comparisons;
};

// Paired tests for every listed pair (indices into report.systems), on both
// metrics, Bonferroni-corrected with m = number of pairs per metric. Throws
// DataError when two systems were evaluated on different users.
void AddComparisons(EvalReport& report,
                    const std::vector<std::pair<size_t, size_t>>& pairs,
                    double alpha = 0.05);

void WriteReportCsv(const EvalReport& report, std::ostream& out);
void WriteReportMarkdown(const EvalReport& report, std::ostream& out);
void WritePerUserCsv(std::span<const UserMetric> metrics, std::ostream& out);
std::vector<UserMetric> ReadPerUserCsv(std::istream& in);

}  // namespace seqrec

#endif  // SEQREC_EVALUATION_H_
