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


#include "cli.h"

#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "seqrec/commands.h"
#include "seqrec/config.h"
#include "seqrec/error.h"

namespace seqrec {
namespace {

struct RunFlags {
  std::string config;
  std::optional<uint64_t> seed;
  std::optional<std::string> budget;
  std::optional<int> threads;
  bool single_threaded = false;
  std::string out;
};

void AddConfigFlags(CLI::App* cmd, RunFlags& f, bool training) {
  cmd->add_option("--config", f.config, "Experiment config (JSON)")->required();
  cmd->add_option("--seed", f.seed, "Override the global seed");
  cmd->add_option("--out", f.out, "Output directory (default: output_dir)");
  if (training) {
    cmd->add_option("--budget", f.budget, "Override training budget, e.g. 30s, 15m, 1h");
    cmd->add_option("--threads", f.threads, "Worker threads");
    cmd->add_flag("--single-threaded", f.single_threaded, "Force one thread");
  }
}

ExperimentConfig Resolve(const RunFlags& f) {
  ExperimentConfig c = LoadConfig(f.config);
  if (f.seed) {
    c.seed = *f.seed;
    ResolveSeeds(c);
  }
  if (f.budget) c.training.budget_seconds = ParseDuration(*f.budget);
  if (f.threads) {
    if (*f.threads < 1) throw ConfigError("--threads must be >= 1");
    c.training.threads = *f.threads;
  }
  if (f.single_threaded) c.training.threads = 1;
  if (!f.out.empty()) c.output_dir = f.out;
  return c;
}

void PrintSummary(std::ostream& out, const std::string& label, const MetricSummary& m,
                  int k) {
  out << label << " recall@" << k << "=" << std::fixed << std::setprecision(4) << m.recall
      << " ndcg@" << k << "=" << m.ndcg << " users=" << m.n << "\n";
  out.unsetf(std::ios::floatfield);
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sequential recommendation training with recency sampling"};
  app.require_subcommand(1);

  RunFlags prep, train, eval, sweep;
  std::string checkpoint;
  auto* c_prep = app.add_subcommand("prepare", "Split a dataset and write statistics");
  AddConfigFlags(c_prep, prep, false);
  auto* c_train = app.add_subcommand("train", "Train a model on a prepared split");
  AddConfigFlags(c_train, train, true);
  auto* c_eval = app.add_subcommand("eval", "Evaluate a checkpoint on test holdouts");
  AddConfigFlags(c_eval, eval, false);
  c_eval->add_option("--checkpoint", checkpoint, "Checkpoint (default: <out>/checkpoint.bin)");

  std::vector<std::string> runs, pairs;
  double compare_alpha = 0.05;
  std::string compare_out;
  auto* c_cmp = app.add_subcommand("compare", "Paired t-tests between evaluated runs");
  c_cmp->add_option("--runs", runs, "Run directories holding per_user.csv")->required();
  c_cmp->add_option("--pairs", pairs, "Pairs NAME_A:NAME_B (default: all)");
  c_cmp->add_option("--alpha", compare_alpha, "Family-wise significance level");
  c_cmp->add_option("--out", compare_out, "Output directory")->required();

  std::vector<double> alphas;
  auto* c_sweep = app.add_subcommand("sweep-alpha", "Train and evaluate one model per alpha");
  AddConfigFlags(c_sweep, sweep, true);
  c_sweep->add_option("--alphas", alphas, "Alpha values")->required();

  MarkovConfig synth;
  std::string synth_out;
  auto* c_synth = app.add_subcommand("synth", "Write a synthetic Markov interaction log");
  c_synth->add_option("--out", synth_out, "CSV path")->required();
  c_synth->add_option("--users", synth.users, "Number of users")->capture_default_str();
  c_synth->add_option("--items", synth.items, "Catalog size")->capture_default_str();
  c_synth->add_option("--min-length", synth.min_length, "Shortest sequence")->capture_default_str();
  c_synth->add_option("--max-length", synth.max_length, "Longest sequence")->capture_default_str();
  c_synth->add_option("--communities", synth.communities, "Item groups; 0 uses fixed successor lists")->capture_default_str();
  c_synth->add_option("--teleport", synth.teleport, "Probability of a popularity jump")->capture_default_str();
  c_synth->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (*c_prep) {
      ExperimentConfig c = Resolve(prep);
      PreparedSplit p = CmdPrepare(c, c.output_dir);
      out << "users=" << p.stats.users << " items=" << p.stats.items
          << " interactions=" << p.stats.interactions
          << " median_length=" << p.stats.median_length
          << " sparsity=" << p.stats.sparsity << "\n";
    } else if (*c_train) {
      ExperimentConfig c = Resolve(train);
      TrainSummary s = CmdTrain(c, c.output_dir);
      out << s.kind << ": " << s.epochs << " epochs, best " << s.best_epoch << "\n";
      if (s.validation) PrintSummary(out, "validation", *s.validation, c.evaluation.k);
    } else if (*c_eval) {
      ExperimentConfig c = Resolve(eval);
      std::optional<fs::path> ck;
      if (!checkpoint.empty()) ck = checkpoint;
      EvalReport r = CmdEval(c, c.output_dir, ck);
      PrintSummary(out, "test " + c.name, r.systems[0].summary, r.k);
    } else if (*c_cmp) {
      std::vector<fs::path> dirs(runs.begin(), runs.end());
      std::vector<std::pair<std::string, std::string>> named;
      for (const std::string& p : pairs) {
        auto colon = p.find(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == p.size()) {
          throw ConfigError("pair '" + p + "' is not NAME_A:NAME_B");
        }
        named.emplace_back(p.substr(0, colon), p.substr(colon + 1));
      }
      EvalReport r = CmdCompare(dirs, named, compare_alpha, compare_out);
      WriteReportMarkdown(r, out);
    } else if (*c_sweep) {
      ExperimentConfig c = Resolve(sweep);
      for (const SweepRow& row : CmdSweepAlpha(c, alphas, c.output_dir)) {
        PrintSummary(out, "alpha=" + std::to_string(row.alpha), row.test, c.evaluation.k);
      }
    } else if (*c_synth) {
      CmdSynth(synth, synth_out);
      out << "wrote " << synth_out << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::kConfig:
        return kExitConfig;
      case ErrorKind::kData:
        return kExitData;
      case ErrorKind::kRuntime:
        return kExitRuntime;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace seqrec
