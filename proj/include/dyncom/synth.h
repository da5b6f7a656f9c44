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

#ifndef DYNCOM_SYNTH_H_
#define DYNCOM_SYNTH_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/time/civil_time.h"
#include "dyncom/artifact_io.h"
#include "dyncom/dynamic_track.h"
#include "dyncom/event_ingest.h"

namespace dyncom {

// Planted lifecycle change applied at the start of `step`.
//  kMerge: community `second` is absorbed into `first`.
//  kSplit: the second half of `first` (accounts and external entities)
//          becomes a new community.
struct ScriptDirective {
  enum class Kind { kMerge, kSplit };
  int step = 0;
  Kind kind = Kind::kMerge;
  int first = 0;
  int second = -1;

  friend bool operator==(const ScriptDirective&, const ScriptDirective&) =
      default;
};

// "merge@5:0+1;split@7:2"
absl::StatusOr<std::vector<ScriptDirective>> ParseLifecycleScript(
    absl::string_view text);
std::string FormatLifecycleScript(std::span<const ScriptDirective> script);

// Windows are two weeks long and advance by one week, so a scenario of
// `steps` steps spans steps + 1 weeks from `start`. Event rates are
// expected posts per account per window.
struct ScenarioConfig {
  int communities = 3;
  int accounts_per_community = 8;
  int external_per_community = 3;
  int steps = 10;
  double churn_rate = 0.0;
  double intra_event_rate = 8.0;
  double inter_event_rate = 0.0;
  std::vector<ScriptDirective> lifecycle_script;
  uint64_t seed = 1;
  absl::CivilDay start = absl::CivilDay(2012, 6, 1);
};

absl::Status ValidateScenarioConfig(const ScenarioConfig& cfg);
absl::StatusOr<ScenarioConfig> ParseScenarioConfig(absl::string_view text);
std::string FormatScenarioConfig(const ScenarioConfig& cfg);

struct PlantedEvent {
  int step = 0;
  LifecycleType type = LifecycleType::kMerge;
  std::vector<int> labels;

  friend bool operator==(const PlantedEvent&, const PlantedEvent&) = default;
};

struct GroundTruth {
  int steps = 0;
  // membership[t][label] = sorted members (accounts and external entities).
  std::vector<std::map<int, std::vector<EntityRef>>> membership;
  std::vector<PlantedEvent> lifecycle;
  // Labels present at every step.
  std::set<int> persistent;
};

struct Scenario {
  EventLog log;
  GroundTruth truth;
};

// Each week, members post mentions/reshares to their own community at the
// intra rate and to other communities at the inter rate, and post URLs of
// their community's external entities. Every external entity is posted by
// at least two accounts per week. At each step `churn_rate` of all accounts
// move to another community, after the script for that step is applied.
absl::StatusOr<Scenario> GenerateScenario(const ScenarioConfig& cfg);

struct TrackingScores {
  double mean_jaccard = 0.0;
  double events_recovered = 0.0;
  double persistent_precision = 0.0;
  double persistent_recall = 0.0;
};

// Per step, found and planted communities are paired greedily by decreasing
// Jaccard similarity; a step scores the summed Jaccard of its pairs divided
// by the number of planted communities. A planted merge or split counts as
// recovered when any timeline records the same event type within one step.
// Each found timeline maps to the planted label it was paired with most
// often, which defines persistent-set precision and recall.
absl::StatusOr<TrackingScores> EvaluateTracking(
    const TimelineSet& found, const GroundTruth& truth,
    std::span<const int> found_persistent);

// Ground truth that reproduces a tracked result exactly: labels are timeline
// ids, lifecycle events are its merges and splits.
GroundTruth TruthFromTimelines(const TimelineSet& found,
                               std::span<const int> persistent);

// Community table (step community_id member_kind member_id) and lifecycle
// table (step event_type labels).
std::string TruthCommunitiesTsv(const GroundTruth& truth);
std::string TruthLifecycleTsv(const GroundTruth& truth);
absl::StatusOr<GroundTruth> TruthFromTables(const TsvTable& communities,
                                            const TsvTable& lifecycle,
                                            int steps);

}  // namespace dyncom

#endif  // DYNCOM_SYNTH_H_
