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

#ifndef DYNCOM_PIPELINE_H_
#define DYNCOM_PIPELINE_H_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dyncom/consensus_detect.h"
#include "dyncom/dynamic_track.h"
#include "dyncom/synth.h"
#include "dyncom/window_graph.h"

namespace dyncom {

// Every knob of a run. Defaults are two-week windows advancing weekly,
// k = 2, 100 consensus runs at tau = 0.5, alpha = 0.5, threshold 0.25.
struct PipelineConfig {
  std::string events;
  std::string resolver;  // optional
  WindowSpec window;
  EdgeFilterParams edge_filter;
  ConsensusParams consensus;
  TrackingParams tracking;
  std::string out;
  std::vector<absl::Duration> activity_scales = DefaultActivityScales();
};

// Parses the flat key=value form. Keys: events resolver start end
// window_length window_stride edge_k runs tau max_iterations seed alpha
// match_threshold out activity_scales. Unknown keys and out-of-range values
// are errors naming the key.
absl::StatusOr<PipelineConfig> ParsePipelineConfig(absl::string_view text);
absl::StatusOr<PipelineConfig> ReadPipelineConfig(const std::string& path);
absl::Status ValidatePipelineConfig(const PipelineConfig& cfg);

// Canonical key=value rendering, keys sorted, `out` omitted.
std::string CanonicalConfigText(const PipelineConfig& cfg);

// Digest of the canonical config plus the contents of the input files.
absl::StatusOr<std::string> ConfigDigest(const PipelineConfig& cfg);

enum class Stage { kIngest = 0, kWindows, kDetect, kTrack, kCharacterize };

absl::string_view StageName(Stage s);
absl::StatusOr<Stage> ParseStage(absl::string_view name);
std::vector<Stage> AllStages();
// Comma-separated stage names.
absl::StatusOr<std::vector<Stage>> ParseStageList(absl::string_view text);

struct RunSummary {
  int steps = 0;
  std::vector<int> communities_per_step;
  int timelines = 0;
  int persistent = 0;
  std::vector<ManifestEntry> manifest;
};

// Runs `stages` in order against cfg.out. Each stage reads the artifacts of
// the previous one and refuses to run when they are missing or were produced
// under a different config digest. Holds a lock file in the output
// directory for the duration of the run.
absl::StatusOr<RunSummary> RunPipeline(const PipelineConfig& cfg,
                                       const std::vector<Stage>& stages,
                                       std::ostream& log);

void PrintSummary(const RunSummary& s, std::ostream& out);

// Writes a generated scenario plus a ready-to-run pipeline config
// (pipeline.cfg) into `dir`.
absl::Status WriteScenario(const ScenarioConfig& cfg, const Scenario& scenario,
                           const std::filesystem::path& dir);

// Scores the tracked timelines under cfg.out against a ground truth written
// by WriteScenario.
absl::StatusOr<TrackingScores> EvaluateRun(const PipelineConfig& cfg,
                                           const std::filesystem::path& truth_dir);

// Worker threads for parallel sections, from DYNCOM_THREADS (default 1).
int ThreadsFromEnvironment();

}  // namespace dyncom

#endif  // DYNCOM_PIPELINE_H_
