// Copyright 2026 The dyncom Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command line front end: per-stage subcommands plus synth/evaluate.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "dyncom/artifact_io.h"
#include "dyncom/pipeline.h"
#include "dyncom/synth.h"

namespace {

namespace fs = std::filesystem;
using dyncom::Stage;

struct Flags {
  std::string config;
  std::string out;
  std::optional<uint64_t> seed;
  std::string stages;
  std::string truth;
};

int Fail(const absl::Status& status) {
  std::cerr << "dyncom: " << status.message() << "\n";
  return status.code() == absl::StatusCode::kInvalidArgument ? 2 : 1;
}

absl::StatusOr<dyncom::PipelineConfig> LoadConfig(const Flags& flags) {
  auto cfg = dyncom::ReadPipelineConfig(flags.config);
  if (!cfg.ok()) return cfg.status();
  if (!flags.out.empty()) cfg->out = flags.out;
  if (flags.seed.has_value()) cfg->consensus.seed = *flags.seed;
  return cfg;
}

int RunStages(const Flags& flags, std::vector<Stage> stages) {
  if (!flags.stages.empty()) {
    auto parsed = dyncom::ParseStageList(flags.stages);
    if (!parsed.ok()) return Fail(parsed.status());
    stages = *parsed;
  }
  auto cfg = LoadConfig(flags);
  if (!cfg.ok()) return Fail(cfg.status());
  auto summary = dyncom::RunPipeline(*cfg, stages, std::cerr);
  if (!summary.ok()) return Fail(summary.status());
  dyncom::PrintSummary(*summary, std::cout);
  return 0;
}

int RunSynth(const Flags& flags) {
  dyncom::ScenarioConfig sc;
  if (!flags.config.empty()) {
    auto text = dyncom::ReadFileToString(flags.config);
    if (!text.ok()) {
      return Fail(absl::NotFoundError("cannot read config " + flags.config));
    }
    auto parsed = dyncom::ParseScenarioConfig(*text);
    if (!parsed.ok()) return Fail(parsed.status());
    sc = *parsed;
  }
  if (flags.seed.has_value()) sc.seed = *flags.seed;
  if (flags.out.empty()) {
    return Fail(absl::InvalidArgumentError("synth needs --out"));
  }
  auto scenario = dyncom::GenerateScenario(sc);
  if (!scenario.ok()) return Fail(scenario.status());
  absl::Status st = dyncom::WriteScenario(sc, *scenario, flags.out);
  if (!st.ok()) return Fail(st);
  std::cout << "wrote " << scenario->log.size() << " events over "
            << sc.steps << " steps to " << flags.out << "\n";
  return 0;
}

int RunEvaluate(const Flags& flags) {
  auto cfg = LoadConfig(flags);
  if (!cfg.ok()) return Fail(cfg.status());
  fs::path truth = flags.truth.empty() ? fs::path(flags.config).parent_path()
                                       : fs::path(flags.truth);
  auto scores = dyncom::EvaluateRun(*cfg, truth);
  if (!scores.ok()) return Fail(scores.status());
  std::cout << absl::StrFormat(
      "mean_jaccard\t%.6f\nevents_recovered\t%.6f\n"
      "persistent_precision\t%.6f\npersistent_recall\t%.6f\n",
      scores->mean_jaccard, scores->events_recovered,
      scores->persistent_precision, scores->persistent_recall);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic community reconstruction, tracking and "
               "characterization."};
  app.require_subcommand(1);
  Flags flags;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", flags.config, "config file");
    if (config_required) c->required();
    sub->add_option("--out", flags.out, "output directory");
    sub->add_option("--seed", flags.seed, "random seed");
  };

  std::vector<std::pair<CLI::App*, std::vector<Stage>>> stage_cmds;
  for (Stage s : dyncom::AllStages()) {
    const std::string name(dyncom::StageName(s));
    CLI::App* sub = app.add_subcommand(name, "run the " + name + " stage");
    add_common(sub, true);
    stage_cmds.push_back({sub, {s}});
  }
  CLI::App* run_all = app.add_subcommand("run-all", "run every stage");
  add_common(run_all, true);
  run_all->add_option("--stages", flags.stages,
                      "comma-separated subset of stages");
  stage_cmds.push_back({run_all, dyncom::AllStages()});

  CLI::App* synth = app.add_subcommand("synth", "generate a scenario");
  add_common(synth, false);
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score a run against ground truth");
  add_common(evaluate, true);
  evaluate->add_option("--truth", flags.truth,
                       "scenario directory (default: the config's)");

  CLI11_PARSE(app, argc, argv);

  for (const auto& [sub, stages] : stage_cmds) {
    if (sub->parsed()) return RunStages(flags, stages);
  }
  if (synth->parsed()) return RunSynth(flags);
  if (evaluate->parsed()) return RunEvaluate(flags);
  return 2;
}
