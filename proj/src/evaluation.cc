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

#include "seqrec/evaluation.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <boost/math/special_functions/beta.hpp>

#include "seqrec/error.h"

namespace seqrec {

size_t RankOfHoldout(std::span<const double> scores, ItemIndex holdout) {
  if (holdout < 0 || static_cast<size_t>(holdout) >= scores.size()) {
    throw DataError("holdout item outside catalog");
  }
  const double target = scores[holdout];
  if (!std::isfinite(target)) throw RuntimeError("non-finite score");
  size_t above = 0;
  for (size_t j = 0; j < scores.size(); ++j) {
    if (!std::isfinite(scores[j])) throw RuntimeError("non-finite score");
    if (static_cast<ItemIndex>(j) != holdout && scores[j] >= target) ++above;
  }
  return above + 1;
}

RankMetrics MetricsForRank(size_t rank, int k) {
  if (rank < 1) throw DataError("rank must be >= 1");
  if (k < 1) throw ConfigError("cutoff must be >= 1");
  RankMetrics m;
  if (rank <= static_cast<size_t>(k)) {
    m.recall = 1;
    m.ndcg = 1.0 / std::log2(static_cast<double>(rank) + 1.0);
  }
  return m;
}

TTestResult PairedTTest(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw DataError("paired t-test needs equal lengths");
  if (a.size() < 2) throw DataError("paired t-test needs at least 2 pairs");
  const size_t n = a.size();
  double mean = 0.0;
  for (size_t i = 0; i < n; ++i) mean += a[i] - b[i];
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double dev = (a[i] - b[i]) - mean;
    ss += dev * dev;
  }
  TTestResult result;
  result.n = n;
  const double var = ss / static_cast<double>(n - 1);
  if (var == 0.0) {
    if (mean == 0.0) {
      result.t = 0.0;
      result.p_value = 1.0;
    } else {
      result.t = std::copysign(std::numeric_limits<double>::infinity(), mean);
      result.p_value = 0.0;
    }
    return result;
  }
  result.t = mean / std::sqrt(var / static_cast<double>(n));
  const double dof = static_cast<double>(n - 1);
  // Two-sided tail of Student's t: I_{dof / (dof + t^2)}(dof / 2, 1 / 2).
  result.p_value =
      boost::math::ibeta(dof / 2.0, 0.5, dof / (dof + result.t * result.t));
  return result;
}

std::vector<bool> Bonferroni(std::span<const double> raw_p, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  std::vector<bool> flags(raw_p.size(), false);
  const double threshold = alpha / static_cast<double>(raw_p.size());
  for (size_t i = 0; i < raw_p.size(); ++i) flags[i] = raw_p[i] < threshold;
  return flags;
}

std::vector<UserMetric> Evaluate(const SplitDataset& split, const Scorer& scorer,
                                 Holdout holdout, int k, int max_len) {
  std::vector<UserMetric> metrics;
  std::vector<double> scores(split.catalog_size);
  for (const auto& u : split.users) {
    std::vector<ItemIndex> input;
    ItemIndex target = 0;
    if (holdout == Holdout::kValidation) {
      if (!u.validation) continue;
      input = u.train;
      target = *u.validation;
    } else {
      input = TestInput(u);
      target = u.test;
    }
    if (max_len > 0 && input.size() > static_cast<size_t>(max_len)) {
      input.erase(input.begin(), input.end() - max_len);
    }
    scorer.Score(u.user, input, scores);
    UserMetric m;
    m.user = u.user;
    m.rank = RankOfHoldout(scores, target);
    RankMetrics rm = MetricsForRank(m.rank, k);
    m.recall_at_k = rm.recall;
    m.ndcg_at_k = rm.ndcg;
    metrics.push_back(m);
  }
  return metrics;
}

MetricSummary Summarize(std::span<const UserMetric> metrics) {
  MetricSummary s;
  s.n = metrics.size();
  if (metrics.empty()) return s;
  for (const auto& m : metrics) {
    s.recall += m.recall_at_k;
    s.ndcg += m.ndcg_at_k;
  }
  s.recall /= static_cast<double>(s.n);
  s.ndcg /= static_cast<double>(s.n);
  return s;
}

void AddComparisons(EvalReport& report,
                    const std::vector<std::pair<size_t, size_t>>& pairs,
                    double alpha) {
  if (pairs.empty()) return;
  struct Pending {
    size_t a, b;
    std::string metric;
    std::vector<double> va, vb;
  };
  std::vector<Pending> pending;
  for (auto [ia, ib] : pairs) {
    const auto& sa = report.systems.at(ia);
    const auto& sb = report.systems.at(ib);
    if (sa.per_user.size() != sb.per_user.size()) {
      throw DataError("systems " + sa.name + " and " + sb.name +
                      " were evaluated on different user sets");
    }
    std::map<UserIndex, const UserMetric*> by_user;
    for (const auto& m : sb.per_user) by_user[m.user] = &m;
    Pending recall{ia, ib, "recall@" + std::to_string(report.k), {}, {}};
    Pending ndcg{ia, ib, "ndcg@" + std::to_string(report.k), {}, {}};
    for (const auto& m : sa.per_user) {
      auto it = by_user.find(m.user);
      if (it == by_user.end()) {
        throw DataError("systems " + sa.name + " and " + sb.name +
                        " were evaluated on different user sets");
      }
      recall.va.push_back(m.recall_at_k);
      recall.vb.push_back(it->second->recall_at_k);
      ndcg.va.push_back(m.ndcg_at_k);
      ndcg.vb.push_back(it->second->ndcg_at_k);
    }
    pending.push_back(std::move(recall));
    pending.push_back(std::move(ndcg));
  }
  const size_t family = pairs.size();
  for (auto& p : pending) {
    Comparison c;
    c.system_a = report.systems[p.a].name;
    c.system_b = report.systems[p.b].name;
    c.metric = p.metric;
    c.test = PairedTTest(p.va, p.vb);
    bool is_recall = p.metric.rfind("recall", 0) == 0;
    c.mean_a = is_recall ? report.systems[p.a].summary.recall
                         : report.systems[p.a].summary.ndcg;
    c.mean_b = is_recall ? report.systems[p.b].summary.recall
                         : report.systems[p.b].summary.ndcg;
    c.family_size = family;
    c.alpha = alpha;
    c.significant = c.test.p_value < alpha / static_cast<double>(family);
    report.comparisons.push_back(std::move(c));
  }
}

namespace {

std::string Fixed(double v, int digits = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

std::string Sci(double v) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(6) << v;
  return s.str();
}

}  // namespace

void WriteReportCsv(const EvalReport& report, std::ostream& out) {
  out << "system,metric,mean,n,compared_to,t,p,family_size,corrected_alpha,"
         "significant\n";
  for (const auto& s : report.systems) {
    out << s.name << ",recall@" << report.k << "," << Fixed(s.summary.recall)
        << "," << s.summary.n << ",,,,,,\n";
    out << s.name << ",ndcg@" << report.k << "," << Fixed(s.summary.ndcg) << ","
        << s.summary.n << ",,,,,,\n";
  }
  for (const auto& c : report.comparisons) {
    out << c.system_a << "," << c.metric << "," << Fixed(c.mean_a) << ","
        << c.test.n << "," << c.system_b << "," << Fixed(c.test.t) << ","
        << Sci(c.test.p_value) << "," << c.family_size << ","
        << Sci(c.alpha / static_cast<double>(c.family_size)) << ","
        << (c.significant ? "true" : "false") << "\n";
  }
}

void WriteReportMarkdown(const EvalReport& report, std::ostream& out) {
  out << "| system | users | Recall@" << report.k << " | NDCG@" << report.k
      << " |\n|---|---:|---:|---:|\n";
  for (const auto& s : report.systems) {
    out << "| " << s.name << " | " << s.summary.n << " | "
        << Fixed(s.summary.recall, 4) << " | " << Fixed(s.summary.ndcg, 4)
        << " |\n";
  }
  if (report.comparisons.empty()) return;
  out << "\nPaired t-tests, Bonferroni-corrected (m = "
      << report.comparisons.front().family_size << " per metric, alpha = "
      << report.comparisons.front().alpha << ").\n\n"
      << "| A | B | metric | mean A | mean B | t | p | significant |\n"
      << "|---|---|---|---:|---:|---:|---:|:---:|\n";
  for (const auto& c : report.comparisons) {
    out << "| " << c.system_a << " | " << c.system_b << " | " << c.metric
        << " | " << Fixed(c.mean_a, 4) << " | " << Fixed(c.mean_b, 4) << " | "
        << Fixed(c.test.t, 3) << " | " << Sci(c.test.p_value) << " | "
        << (c.significant ? "yes" : "no") << " |\n";
  }
}

void WritePerUserCsv(std::span<const UserMetric> metrics, std::ostream& out) {
  out << "user,rank,recall,ndcg\n";
  out << std::setprecision(17);
  for (const auto& m : metrics) {
    out << m.user << "," << m.rank << "," << m.recall_at_k << "," << m.ndcg_at_k
        << "\n";
  }
}

std::vector<UserMetric> ReadPerUserCsv(std::istream& in) {
  std::vector<UserMetric> metrics;
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 || line.empty()) continue;
    std::istringstream row(line);
    UserMetric m;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(row >> m.user >> c1 >> m.rank >> c2 >> m.recall_at_k >> c3 >>
          m.ndcg_at_k) ||
        c1 != ',' || c2 != ',' || c3 != ',') {
      throw DataError("malformed per-user metrics at line " +
                      std::to_string(line_no));
    }
    metrics.push_back(m);
  }
  return metrics;
}

}  // namespace seqrec
