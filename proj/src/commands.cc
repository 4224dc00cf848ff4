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


#include "seqrec/commands.h"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "seqrec/baselines.h"
#include "seqrec/checkpoint.h"
#include "seqrec/error.h"
#include "seqrec/io.h"

namespace seqrec {
namespace {

std::string JsonLines(const std::vector<Json>& rows) {
  std::string out;
  for (const Json& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

Json ItemArray(std::span<const ItemIndex> items) {
  Json a = Json::array();
  for (ItemIndex i : items) a.push_back(i);
  return a;
}

std::string StatsCsv(const DatasetStats& s) {
  std::ostringstream os;
  os.precision(17);
  os << "users,items,interactions,mean_length,median_length,sparsity\n"
     << s.users << ',' << s.items << ',' << s.interactions << ',' << s.mean_length
     << ',' << s.median_length << ',' << s.sparsity << '\n';
  return os.str();
}

void WriteResolved(const ExperimentConfig& config, const fs::path& dir) {
  WriteFileAtomic(dir / "config.resolved", ToJson(config).dump(2) + "\n");
}

// Builds a scorer for whatever the checkpoint holds. `storage` keeps the
// model alive for scorers that reference it.
struct LoadedModel {
  std::string kind;
  std::optional<ModelParams> params;
  std::optional<MfBprModel> mf;
  std::unique_ptr<Scorer> scorer;
};

LoadedModel LoadModel(const Checkpoint& c) {
  LoadedModel m;
  m.kind = c.header.value("kind", "");
  if (m.kind == "popularity") {
    m.scorer = std::make_unique<PopularityScorer>(PopularityFromCheckpoint(c));
  } else if (m.kind == "random") {
    m.scorer = std::make_unique<RandomScorer>(c.header.at("seed").get<uint64_t>());
  } else if (m.kind == "mf_bpr") {
    m.mf = MfBprFromCheckpoint(c);
    m.scorer = std::make_unique<MfBprScorer>(*m.mf);
  } else {
    m.params = ModelFromCheckpoint(c);
    m.scorer = std::make_unique<ModelScorer>(*m.params);
  }
  return m;
}

size_t CheckpointCatalog(const Checkpoint& c) {
  auto it = c.header.find("catalog_size");
  if (it == c.header.end() || !it->is_number_unsigned()) {
    throw DataError("checkpoint header lacks catalog_size");
  }
  return it->get<size_t>();
}

TrainSummary TrainOn(const ExperimentConfig& config, const PreparedSplit& prepared,
                     const fs::path& dir, Clock clock) {
  const SplitDataset& split = prepared.split;
  const int k = config.evaluation.k;
  const int max_len = static_cast<int>(config.dataset.max_len);
  TrainSummary summary;
  summary.kind = ModelKindName(config.model);
  std::vector<Json> history;
  std::vector<Json> timing;
  Checkpoint checkpoint;
  const uint64_t hash = ConfigHash(ToJson(config));

  auto validate = [&](const Scorer& scorer) -> std::optional<MetricSummary> {
    if (split.validation_users.empty()) return std::nullopt;
    return Summarize(Evaluate(split, scorer, Holdout::kValidation, k, max_len));
  };
  auto single_record = [&](std::optional<MetricSummary> v, double loss) {
    Json r{{"epoch", 1}, {"loss", loss}};
    if (v) {
      r["validation_ndcg"] = v->ndcg;
      r["validation_recall"] = v->recall;
    }
    r["best"] = true;
    history.push_back(r);
    summary.epochs = 1;
    summary.best_epoch = 1;
    summary.validation = v;
  };

  switch (config.model.kind) {
    case ModelKind::kPopularity: {
      auto counts = PopularityScores(split);
      checkpoint = PopularityCheckpoint(counts);
      single_record(validate(PopularityScorer(counts)), 0.0);
      break;
    }
    case ModelKind::kRandom: {
      const uint64_t seed = DeriveSeed(config.seed, "init");
      checkpoint.header = {{"kind", "random"}, {"seed", seed},
                           {"catalog_size", split.catalog_size}};
      single_record(validate(RandomScorer(seed)), 0.0);
      break;
    }
    case ModelKind::kMfBpr: {
      std::vector<double> losses;
      MfBprModel model = TrainMfBpr(split, config.model.mf_bpr, &losses);
      checkpoint = MfBprCheckpoint(model);
      auto v = validate(MfBprScorer(model));
      for (size_t e = 0; e < losses.size(); ++e) {
        Json r{{"epoch", e + 1}, {"loss", losses[e]}};
        if (e + 1 == losses.size() && v) {
          r["validation_ndcg"] = v->ndcg;
          r["validation_recall"] = v->recall;
        }
        r["best"] = e + 1 == losses.size();
        history.push_back(r);
      }
      summary.epochs = static_cast<int>(losses.size());
      summary.best_epoch = summary.epochs;
      summary.validation = v;
      break;
    }
    case ModelKind::kEncoder: {
      TrainResult result = Train(split, config.model.encoder, config.sampler,
                                 config.loss, config.training, {}, std::move(clock));
      summary.epochs = static_cast<int>(result.history.epochs.size());
      summary.best_epoch = result.history.best_epoch;
      for (const EpochRecord& e : result.history.epochs) {
        Json r{{"epoch", e.epoch}, {"loss", e.mean_loss}};
        if (e.validation_ndcg) r["validation_ndcg"] = *e.validation_ndcg;
        if (e.validation_recall) r["validation_recall"] = *e.validation_recall;
        r["best"] = e.epoch == summary.best_epoch;
        history.push_back(r);
        timing.push_back({{"epoch", e.epoch}, {"elapsed_seconds", e.elapsed_seconds}});
        if (e.epoch == summary.best_epoch && e.validation_ndcg) {
          summary.validation = MetricSummary{*e.validation_recall, *e.validation_ndcg,
                                             split.validation_users.size()};
        }
      }
      if (result.history.budget_shorter_than_epoch) {
        timing.push_back({{"note", "budget shorter than one epoch"}});
      }
      checkpoint = ToCheckpoint(result.params, hash);
      break;
    }
  }
  checkpoint.header["config_hash"] = hash;
  checkpoint.header["name"] = config.name;
  WriteCheckpoint(dir / "checkpoint.bin", checkpoint);
  WriteFileAtomic(dir / "history.jsonl", JsonLines(history));
  WriteFileAtomic(dir / "timing.jsonl", JsonLines(timing));
  WriteResolved(config, dir);
  return summary;
}

std::string ToCsv(const EvalReport& report) {
  std::ostringstream os;
  WriteReportCsv(report, os);
  return os.str();
}

std::string ToMarkdown(const EvalReport& report) {
  std::ostringstream os;
  WriteReportMarkdown(report, os);
  return os.str();
}

EvalReport EvalOn(const ExperimentConfig& config, const PreparedSplit& prepared,
                  const fs::path& dir, const fs::path& checkpoint_path) {
  if (!fs::exists(checkpoint_path)) {
    throw DataError("checkpoint not found: " + checkpoint_path.string());
  }
  Checkpoint c = ReadCheckpoint(checkpoint_path);
  if (CheckpointCatalog(c) != prepared.split.catalog_size) {
    throw DataError("catalog mismatch: checkpoint has " +
                    std::to_string(CheckpointCatalog(c)) + " items, split has " +
                    std::to_string(prepared.split.catalog_size));
  }
  LoadedModel model = LoadModel(c);
  EvalReport report;
  report.k = config.evaluation.k;
  SystemResult system;
  system.name = config.name;
  system.per_user = Evaluate(prepared.split, *model.scorer, Holdout::kTest, report.k,
                             static_cast<int>(config.dataset.max_len));
  system.summary = Summarize(system.per_user);
  report.systems.push_back(std::move(system));

  std::ostringstream per_user;
  WritePerUserCsv(report.systems[0].per_user, per_user);
  const std::string csv = ToCsv(report);
  const std::string md = ToMarkdown(report);
  WriteFileAtomic(dir / "per_user.csv", per_user.str());
  WriteFileAtomic(dir / "report.csv", csv);
  WriteFileAtomic(dir / "report.md", md);
  return report;
}

}  // namespace

PreparedSplit PrepareSplit(const ExperimentConfig& config) {
  const auto& d = config.dataset;
  if (d.path.empty()) throw ConfigError("dataset.path is required");
  if (!fs::exists(d.path)) throw DataError("dataset file not found: " + d.path);
  InteractionLog log = IngestInteractions(d.path, d.columns);
  auto seqs = FilterMinLength(BuildUserSequences(log), d.min_len);
  PreparedSplit p;
  p.stats = ComputeStats(seqs, log.num_items());
  for (auto& s : seqs) s = TruncateRecent(std::move(s), d.max_len);
  p.split = LeaveOneOutSplit(seqs, log.num_items(), d.validation_users, SplitSeed(config));
  p.user_ids = log.user_ids();
  p.item_ids = log.item_ids();
  return p;
}

Json SplitToJson(const PreparedSplit& p) {
  Json users = Json::array();
  for (const SplitUser& u : p.split.users) {
    Json j{{"user", u.user}, {"train", ItemArray(u.train)}};
    j["validation"] = u.validation ? Json(*u.validation) : Json(nullptr);
    j["test"] = u.test;
    users.push_back(std::move(j));
  }
  Json j;
  j["catalog_size"] = p.split.catalog_size;
  j["validation_users"] = p.split.validation_users;
  j["user_ids"] = p.user_ids;
  j["item_ids"] = p.item_ids;
  j["stats"] = {{"users", p.stats.users},
                {"items", p.stats.items},
                {"interactions", p.stats.interactions},
                {"mean_length", p.stats.mean_length},
                {"median_length", p.stats.median_length},
                {"sparsity", p.stats.sparsity}};
  j["users"] = std::move(users);
  return j;
}

PreparedSplit SplitFromJson(const Json& j) {
  PreparedSplit p;
  try {
    p.split.catalog_size = j.at("catalog_size").get<size_t>();
    p.split.validation_users = j.at("validation_users").get<std::vector<UserIndex>>();
    p.user_ids = j.at("user_ids").get<std::vector<std::string>>();
    p.item_ids = j.at("item_ids").get<std::vector<std::string>>();
    const Json& s = j.at("stats");
    p.stats = {s.at("users").get<size_t>(), s.at("items").get<size_t>(),
               s.at("interactions").get<size_t>(), s.at("mean_length").get<double>(),
               s.at("median_length").get<double>(), s.at("sparsity").get<double>()};
    for (const Json& u : j.at("users")) {
      SplitUser su;
      su.user = u.at("user").get<UserIndex>();
      su.train = u.at("train").get<std::vector<ItemIndex>>();
      if (!u.at("validation").is_null()) su.validation = u["validation"].get<ItemIndex>();
      su.test = u.at("test").get<ItemIndex>();
      p.split.users.push_back(std::move(su));
    }
  } catch (const Json::exception& e) {
    throw DataError(std::string("malformed split: ") + e.what());
  }
  const auto n = static_cast<ItemIndex>(p.split.catalog_size);
  auto bad = [n](ItemIndex i) { return i < 0 || i >= n; };
  for (const SplitUser& u : p.split.users) {
    if (std::any_of(u.train.begin(), u.train.end(), bad) || bad(u.test) ||
        (u.validation && bad(*u.validation))) {
      throw DataError("split holds an item outside the catalog");
    }
  }
  return p;
}

PreparedSplit LoadSplit(const fs::path& out_dir) {
  const fs::path path = out_dir / "split.json";
  if (!fs::exists(path)) {
    throw DataError("no prepared split at " + path.string() + "; run prepare first");
  }
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::parse_error&) {
    throw DataError("split.json is not valid JSON");
  }
  return SplitFromJson(j);
}

PreparedSplit CmdPrepare(const ExperimentConfig& config, const fs::path& out_dir) {
  PreparedSplit p = PrepareSplit(config);
  std::vector<Json> manifest;
  manifest.reserve(p.split.users.size());
  for (const SplitUser& u : p.split.users) {
    Json r{{"user", p.user_ids[u.user]}, {"train_length", u.train.size()}};
    r["validation_item"] = u.validation ? Json(p.item_ids[*u.validation]) : Json(nullptr);
    r["test_item"] = p.item_ids[u.test];
    manifest.push_back(std::move(r));
  }
  const std::string split = SplitToJson(p).dump() + "\n";
  WriteFileAtomic(out_dir / "split.json", split);
  WriteFileAtomic(out_dir / "split_manifest.jsonl", JsonLines(manifest));
  WriteFileAtomic(out_dir / "stats.csv", StatsCsv(p.stats));
  WriteResolved(config, out_dir);
  return p;
}

TrainSummary CmdTrain(const ExperimentConfig& config, const fs::path& out_dir,
                      Clock clock) {
  PreparedSplit p = LoadSplit(out_dir);
  return TrainOn(config, p, out_dir, std::move(clock));
}

EvalReport CmdEval(const ExperimentConfig& config, const fs::path& out_dir,
                   const std::optional<fs::path>& checkpoint) {
  PreparedSplit p = LoadSplit(out_dir);
  return EvalOn(config, p, out_dir, checkpoint.value_or(out_dir / "checkpoint.bin"));
}

EvalReport CmdCompare(const std::vector<fs::path>& run_dirs,
                      std::vector<std::pair<std::string, std::string>> pairs,
                      double alpha, const fs::path& out_dir) {
  if (run_dirs.size() < 2) throw ConfigError("compare needs at least two runs");
  EvalReport report;
  std::map<std::string, size_t> index;
  for (size_t r = 0; r < run_dirs.size(); ++r) {
    const fs::path& dir = run_dirs[r];
    ExperimentConfig config = LoadConfig(dir / "config.resolved");
    if (r == 0) {
      report.k = config.evaluation.k;
    } else if (report.k != config.evaluation.k) {
      throw ConfigError("runs were evaluated at different cutoffs");
    }
    if (!index.emplace(config.name, r).second) {
      throw ConfigError("duplicate system name '" + config.name + "'");
    }
    std::ifstream in(dir / "per_user.csv");
    if (!in) throw DataError("missing per_user.csv in " + dir.string() + "; run eval first");
    SystemResult s;
    s.name = config.name;
    s.per_user = ReadPerUserCsv(in);
    s.summary = Summarize(s.per_user);
    report.systems.push_back(std::move(s));
  }
  std::vector<std::pair<size_t, size_t>> idx;
  if (pairs.empty()) {
    for (size_t a = 0; a < report.systems.size(); ++a) {
      for (size_t b = a + 1; b < report.systems.size(); ++b) idx.emplace_back(a, b);
    }
  }
  for (const auto& [a, b] : pairs) {
    if (!index.count(a) || !index.count(b)) {
      throw ConfigError("unknown system in pair " + a + ":" + b);
    }
    if (a == b) throw ConfigError("pair compares '" + a + "' with itself");
    idx.emplace_back(index[a], index[b]);
  }
  AddComparisons(report, idx, alpha);
  const std::string csv = ToCsv(report);
  const std::string md = ToMarkdown(report);
  WriteFileAtomic(out_dir / "report.csv", csv);
  WriteFileAtomic(out_dir / "report.md", md);
  return report;
}

std::vector<SweepRow> CmdSweepAlpha(const ExperimentConfig& config,
                                    const std::vector<double>& alphas,
                                    const fs::path& out_dir) {
  if (alphas.empty()) throw ConfigError("alpha list is empty");
  std::set<double> seen;
  for (double a : alphas) {
    if (!seen.insert(a).second) throw ConfigError("duplicated alpha " + std::to_string(a));
    if (!(a > 0.0 && a <= 1.0)) throw ConfigError("sampler.alpha must lie in (0, 1]");
  }
  if (config.model.kind != ModelKind::kEncoder) {
    throw ConfigError("sweep-alpha needs an encoder model");
  }
  PreparedSplit p = PrepareSplit(config);
  std::vector<SweepRow> rows;
  for (size_t i = 0; i < alphas.size(); ++i) {
    ExperimentConfig point = config;
    point.sampler.strategy = SamplingStrategy::kRss;
    point.sampler.alpha = alphas[i];
    point.name = config.name + "_alpha_" + std::to_string(i);
    const fs::path dir = out_dir / ("alpha_" + std::to_string(i));
    WriteFileAtomic(dir / "split.json", SplitToJson(p).dump() + "\n");
    TrainSummary t = TrainOn(point, p, dir, {});
    EvalReport r = EvalOn(point, p, dir, dir / "checkpoint.bin");
    rows.push_back({alphas[i], r.systems[0].summary, t.best_epoch, t.epochs});
  }
  std::ostringstream os;
  os.precision(17);
  os << "alpha,recall,ndcg,n,best_epoch,epochs\n";
  for (const SweepRow& r : rows) {
    os << r.alpha << ',' << r.test.recall << ',' << r.test.ndcg << ',' << r.test.n << ','
       << r.best_epoch << ',' << r.epochs << '\n';
  }
  WriteFileAtomic(out_dir / "sweep.csv", os.str());
  WriteResolved(config, out_dir);
  return rows;
}

void CmdSynth(const MarkovConfig& config, const fs::path& path) {
  WriteInteractionsCsv(GenerateMarkovInteractions(config), path);
}

}  // namespace seqrec
