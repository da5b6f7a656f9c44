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

#ifndef DYNCOM_CHARACTERIZE_H_
#define DYNCOM_CHARACTERIZE_H_

#include <cstdint>
#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/time/civil_time.h"
#include "dyncom/artifact_io.h"
#include "dyncom/dynamic_track.h"
#include "dyncom/event_ingest.h"
#include "dyncom/window_graph.h"

namespace dyncom {

enum class RankMode { kFrequency = 0, kNormalizedDegree };

absl::string_view RankModeName(RankMode mode);

struct RankingEntry {
  EntityRef entity;
  double score = 0.0;
  int rank = 0;  // 1-based
};

// Ranks the members of timeline `timeline_id`.
//  kFrequency: number of steps whose observation contains the entity.
//  kNormalizedDegree: weighted degree of the entity inside the subgraph of
//    each observed step network induced by that step's community, summed
//    over observed steps and divided by `total_steps`.
// `kinds` restricts the ranked entities (empty = all kinds). `top_k` <= 0
// keeps every entry. Ties are ordered by entity.
absl::StatusOr<std::vector<RankingEntry>> RankMembers(
    const TimelineSet& state, int timeline_id,
    std::span<const StepNetwork> networks, RankMode mode,
    const std::vector<EntityKind>& kinds, int total_steps, int top_k);

// Population z-scores; a constant series maps to zeros.
std::vector<double> ZScores(std::span<const double> values);

struct ActivitySeries {
  std::vector<absl::CivilDay> dates;
  std::vector<double> community_z;
  std::vector<double> rest_z;
};

// Daily post counts over [start, end) for the community's accounts and for
// every other author in the log, each z-scored.
ActivitySeries ActivityZScore(const EventLog& log,
                              const std::set<std::string>& community_accounts,
                              absl::CivilDay start, absl::CivilDay end);

// Accounts among the members of every observation of a timeline.
std::set<std::string> TimelineAccounts(const Timeline& tl);

// Connected components of the subgraph of `net` induced by `members`, or by
// only their Account members when `accounts_only` is set.
int CommunityComponentCount(const StepNetwork& net,
                            std::span<const EntityRef> members,
                            bool accounts_only);

struct TimelineRanking {
  int timeline_id = 0;
  RankMode mode = RankMode::kFrequency;
  std::vector<RankingEntry> entries;
};

struct TimelineActivity {
  int timeline_id = 0;
  ActivitySeries series;
};

struct Bundle {
  const TimelineSet* state = nullptr;
  std::span<const StepNetwork> networks;
  std::vector<TimelineRanking> rankings;
  std::vector<TimelineActivity> activity;
  std::vector<ActivityPoint> activity_curve;
  std::vector<int> persistent_ids;
  std::string config_text;
  std::string config_digest;
  uint64_t seed = 0;
};

// Writes the bundle tables plus manifest.json under `out_dir`. All tables are
// published together and the manifest last; an error leaves previously
// published files untouched. Returns the manifest entries (manifest.json
// itself excluded).
absl::StatusOr<std::vector<ManifestEntry>> ExportBundle(
    const Bundle& bundle, const std::filesystem::path& out_dir);

}  // namespace dyncom

#endif  // DYNCOM_CHARACTERIZE_H_
