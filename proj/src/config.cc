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


#include "seqrec/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "seqrec/error.h"
#include "seqrec/random.h"

namespace seqrec {
namespace {

// Reads one JSON object, remembering which keys were consumed.
class Section {
 public:
  Section(const Json& json, std::string path) : json_(json), path_(std::move(path)) {
    if (!json_.is_object()) throw ConfigError(Where() + " must be an object");
  }

  bool Has(const char* key) const { return json_.contains(key); }

  const Json* Find(const char* key) {
    auto it = json_.find(key);
    if (it == json_.end()) return nullptr;
    used_.insert(key);
    return &*it;
  }

  std::string Key(const char* key) const {
    return path_.empty() ? std::string(key) : path_ + "." + key;
  }

  void Get(const char* key, bool& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_boolean()) throw ConfigError(Key(key) + ": expected a boolean");
      out = v->get<bool>();
    }
  }
  void Get(const char* key, double& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number()) throw ConfigError(Key(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void Get(const char* key, std::string& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_string()) throw ConfigError(Key(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  template <typename Int>
    requires std::is_integral_v<Int>
  void Get(const char* key, Int& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_number_integer()) throw ConfigError(Key(key) + ": expected an integer");
      if (std::is_unsigned_v<Int> && v->is_number_integer() && !v->is_number_unsigned()) {
        throw ConfigError(Key(key) + ": expected a non-negative integer");
      }
      out = v->get<Int>();
    }
  }
  void Get(const char* key, std::vector<int>& out) {
    if (const Json* v = Find(key)) {
      if (!v->is_array()) throw ConfigError(Key(key) + ": expected an array");
      out.clear();
      for (const auto& e : *v) {
        if (!e.is_number_integer()) {
          throw ConfigError(Key(key) + ": expected integer entries");
        }
        out.push_back(e.get<int>());
      }
    }
  }

  // Throws on the first key that was never read.
  void Finish() const {
    for (const auto& [key, value] : json_.items()) {
      if (!used_.count(key)) throw ConfigError("unknown key '" + Key(key.c_str()) + "'");
    }
  }

 private:
  std::string Where() const { return path_.empty() ? "config" : path_; }

  const Json& json_;
  std::string path_;
  std::set<std::string> used_;
};

char ParseDelimiter(const std::string& text) {
  if (text == "\\t" || text == "tab") return '\t';
  if (text.size() != 1) throw ConfigError("dataset.delimiter: expected one character");
  return text[0];
}

std::string DelimiterName(char c) { return c == '\t' ? "\\t" : std::string(1, c); }

void ReadDataset(Section s, DatasetConfig& d) {
  s.Get("path", d.path);
  std::string delim = DelimiterName(d.columns.delimiter);
  s.Get("delimiter", delim);
  d.columns.delimiter = ParseDelimiter(delim);
  s.Get("has_header", d.columns.has_header);
  s.Get("user_column", d.columns.user_column);
  s.Get("item_column", d.columns.item_column);
  s.Get("timestamp_column", d.columns.timestamp_column);
  s.Get("num_columns", d.columns.num_columns);
  s.Get("min_len", d.min_len);
  s.Get("max_len", d.max_len);
  s.Get("validation_users", d.validation_users);
  s.Finish();
}

void ReadSampler(Section s, SamplerConfig& c) {
  std::string strategy = ToString(c.strategy);
  s.Get("strategy", strategy);
  c.strategy = ParseSamplingStrategy(strategy);
  s.Get("alpha", c.alpha);
  s.Get("tau", c.tau);
  s.Get("k", c.k);
  s.Get("window", c.window);
  s.Finish();
}

void ReadEncoderKeys(Section& s, EncoderConfig& e) {
  s.Get("dim", e.dim);
  s.Get("blocks", e.num_blocks);
  s.Get("heads", e.num_heads);
  s.Get("ffn_dim", e.ffn_dim);
  s.Get("conv_heights", e.conv_heights);
  s.Get("conv_horizontal_filters", e.conv_horizontal_filters);
  s.Get("conv_vertical_filters", e.conv_vertical_filters);
  s.Get("dropout", e.dropout);
  s.Get("use_bias", e.use_bias);
  s.Get("init_scale", e.init_scale);
}

void ReadModel(Section s, ModelConfig& m) {
  std::string kind = ModelKindName(m);
  s.Get("kind", kind);
  if (kind == "popularity") {
    m.kind = ModelKind::kPopularity;
  } else if (kind == "mf_bpr") {
    m.kind = ModelKind::kMfBpr;
  } else if (kind == "random") {
    m.kind = ModelKind::kRandom;
  } else {
    m.kind = ModelKind::kEncoder;
    m.encoder.kind = ParseEncoderKind(kind);
  }
  ReadEncoderKeys(s, m.encoder);
  m.mf_bpr.dim = m.encoder.dim;
  if (const Json* mf = s.Find("mf_bpr")) {
    Section b(*mf, s.Key("mf_bpr"));
    b.Get("epochs", m.mf_bpr.epochs);
    b.Get("learning_rate", m.mf_bpr.learning_rate);
    b.Get("regularization", m.mf_bpr.regularization);
    b.Get("init_scale", m.mf_bpr.init_scale);
    b.Finish();
  }
  s.Finish();
}

void ReadLoss(Section s, LossConfig& c) {
  std::string kind = ToString(c.kind);
  s.Get("kind", kind);
  c.kind = ParseLossKind(kind);
  s.Get("sigma", c.lambda.sigma);
  s.Get("ndcg_cutoff", c.lambda.ndcg_cutoff);
  s.Get("candidate_truncation", c.lambda.candidate_truncation);
  s.Finish();
}

void ReadTraining(Section s, TrainConfig& t) {
  s.Get("learning_rate", t.learning_rate);
  s.Get("beta1", t.beta1);
  s.Get("beta2", t.beta2);
  s.Get("epsilon", t.epsilon);
  s.Get("clip_norm", t.clip_norm);
  s.Get("batch_size", t.batch_size);
  if (const Json* b = s.Find("budget")) {
    if (b->is_number()) {
      t.budget_seconds = b->get<double>();
    } else if (b->is_string()) {
      t.budget_seconds = ParseDuration(b->get<std::string>());
    } else {
      throw ConfigError("training.budget: expected a duration string or seconds");
    }
  }
  s.Get("max_epochs", t.max_epochs);
  s.Get("validation_every", t.validation_every);
  s.Get("threads", t.threads);
  s.Get("fixed_epoch_samples", t.fixed_epoch_samples);
  s.Finish();
}

void ReadEvaluation(Section s, EvaluationConfig& e) {
  s.Get("k", e.k);
  s.Get("alpha", e.alpha);
  s.Finish();
}

void Check(const ExperimentConfig& c) {
  if (c.name.empty()) throw ConfigError("name must not be empty");
  if (c.dataset.min_len < 3) throw ConfigError("dataset.min_len must be >= 3");
  if (c.dataset.max_len < 3) throw ConfigError("dataset.max_len must be >= 3");
  if (c.dataset.columns.num_columns < 1) {
    throw ConfigError("dataset.num_columns must be >= 1");
  }
  for (int col : {c.dataset.columns.user_column, c.dataset.columns.item_column,
                  c.dataset.columns.timestamp_column}) {
    if (col < 0 || col >= c.dataset.columns.num_columns) {
      throw ConfigError("dataset column indices must lie in [0, dataset.num_columns)");
    }
  }
  Validate(c.sampler);
  Validate(c.model.encoder);
  Validate(c.loss.lambda);
  Validate(c.training);
  if (c.model.mf_bpr.epochs < 1) throw ConfigError("model.mf_bpr.epochs must be >= 1");
  if (!(c.model.mf_bpr.learning_rate > 0.0)) {
    throw ConfigError("model.mf_bpr.learning_rate must be > 0");
  }
  if (c.evaluation.k < 1) throw ConfigError("evaluation.k must be >= 1");
  if (!(c.evaluation.alpha > 0.0 && c.evaluation.alpha < 1.0)) {
    throw ConfigError("evaluation.alpha must lie in (0, 1)");
  }
}

}  // namespace

std::string ModelKindName(const ModelConfig& config) {
  switch (config.kind) {
    case ModelKind::kEncoder:
      return ToString(config.encoder.kind);
    case ModelKind::kPopularity:
      return "popularity";
    case ModelKind::kMfBpr:
      return "mf_bpr";
    case ModelKind::kRandom:
      return "random";
  }
  return "";
}

double ParseDuration(const std::string& text) {
  size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw ConfigError("invalid duration '" + text + "'");
  }
  const std::string unit = text.substr(pos);
  double scale = 0.0;
  if (unit.empty() || unit == "s") {
    scale = 1.0;
  } else if (unit == "ms") {
    scale = 1e-3;
  } else if (unit == "m") {
    scale = 60.0;
  } else if (unit == "h") {
    scale = 3600.0;
  } else {
    throw ConfigError("invalid duration unit in '" + text + "'");
  }
  const double seconds = value * scale;
  if (!std::isfinite(seconds) || seconds <= 0.0) {
    throw ConfigError("duration must be positive: '" + text + "'");
  }
  return seconds;
}

std::string FormatDuration(double seconds) {
  std::ostringstream os;
  os.precision(17);
  os << seconds << "s";
  return os.str();
}

ExperimentConfig ParseConfig(const Json& json) {
  ExperimentConfig c;
  Section root(json, "");
  root.Get("name", c.name);
  root.Get("seed", c.seed);
  root.Get("output_dir", c.output_dir);
  if (const Json* v = root.Find("dataset")) ReadDataset(Section(*v, "dataset"), c.dataset);
  if (const Json* v = root.Find("sampler")) ReadSampler(Section(*v, "sampler"), c.sampler);
  if (const Json* v = root.Find("model")) ReadModel(Section(*v, "model"), c.model);
  if (const Json* v = root.Find("loss")) ReadLoss(Section(*v, "loss"), c.loss);
  if (const Json* v = root.Find("training")) {
    ReadTraining(Section(*v, "training"), c.training);
  }
  if (const Json* v = root.Find("evaluation")) {
    ReadEvaluation(Section(*v, "evaluation"), c.evaluation);
  }
  root.Finish();
  c.model.encoder.max_len = static_cast<int>(c.dataset.max_len);
  c.model.mf_bpr.dim = c.model.encoder.dim;
  Check(c);
  ResolveSeeds(c);
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json json;
  try {
    json = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("malformed config " + path.string() + ": " + e.what());
  }
  return ParseConfig(json);
}

Json ToJson(const EncoderConfig& e) {
  Json j;
  j["kind"] = ToString(e.kind);
  j["dim"] = e.dim;
  j["blocks"] = e.num_blocks;
  j["heads"] = e.num_heads;
  j["ffn_dim"] = e.ffn_dim;
  j["conv_heights"] = e.conv_heights;
  j["conv_horizontal_filters"] = e.conv_horizontal_filters;
  j["conv_vertical_filters"] = e.conv_vertical_filters;
  j["max_len"] = e.max_len;
  j["dropout"] = e.dropout;
  j["use_bias"] = e.use_bias;
  j["init_scale"] = e.init_scale;
  return j;
}

EncoderConfig EncoderConfigFromJson(const Json& json) {
  EncoderConfig e;
  Section s(json, "encoder");
  std::string kind;
  s.Get("kind", kind);
  e.kind = ParseEncoderKind(kind);
  ReadEncoderKeys(s, e);
  s.Get("max_len", e.max_len);
  s.Finish();
  Validate(e);
  return e;
}

Json ToJson(const ExperimentConfig& c) {
  Json j;
  j["name"] = c.name;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  const auto& d = c.dataset;
  j["dataset"] = {{"path", d.path},
                  {"delimiter", DelimiterName(d.columns.delimiter)},
                  {"has_header", d.columns.has_header},
                  {"user_column", d.columns.user_column},
                  {"item_column", d.columns.item_column},
                  {"timestamp_column", d.columns.timestamp_column},
                  {"num_columns", d.columns.num_columns},
                  {"min_len", d.min_len},
                  {"max_len", d.max_len},
                  {"validation_users", d.validation_users}};
  j["sampler"] = {{"strategy", ToString(c.sampler.strategy)},
                  {"alpha", c.sampler.alpha},
                  {"tau", c.sampler.tau},
                  {"k", c.sampler.k},
                  {"window", c.sampler.window}};
  Json model = ToJson(c.model.encoder);
  model.erase("max_len");
  model["kind"] = ModelKindName(c.model);
  model["mf_bpr"] = {{"epochs", c.model.mf_bpr.epochs},
                     {"learning_rate", c.model.mf_bpr.learning_rate},
                     {"regularization", c.model.mf_bpr.regularization},
                     {"init_scale", c.model.mf_bpr.init_scale}};
  j["model"] = model;
  j["loss"] = {{"kind", ToString(c.loss.kind)},
               {"sigma", c.loss.lambda.sigma},
               {"ndcg_cutoff", c.loss.lambda.ndcg_cutoff},
               {"candidate_truncation", c.loss.lambda.candidate_truncation}};
  const auto& t = c.training;
  j["training"] = {{"learning_rate", t.learning_rate},
                   {"beta1", t.beta1},
                   {"beta2", t.beta2},
                   {"epsilon", t.epsilon},
                   {"clip_norm", t.clip_norm},
                   {"batch_size", t.batch_size},
                   {"budget", FormatDuration(t.budget_seconds)},
                   {"max_epochs", t.max_epochs},
                   {"validation_every", t.validation_every},
                   {"threads", t.threads},
                   {"fixed_epoch_samples", t.fixed_epoch_samples}};
  j["evaluation"] = {{"k", c.evaluation.k}, {"alpha", c.evaluation.alpha}};
  return j;
}

void ResolveSeeds(ExperimentConfig& c) {
  c.sampler.seed = DeriveSeed(c.seed, "sampler");
  c.training.seed = DeriveSeed(c.seed, "training");
  c.model.mf_bpr.seed = DeriveSeed(c.seed, "init");
}

uint64_t SplitSeed(const ExperimentConfig& c) { return DeriveSeed(c.seed, "split"); }

uint64_t ConfigHash(const Json& json) { return HashName(json.dump()); }

}  // namespace seqrec
