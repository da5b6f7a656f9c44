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

#ifndef DYNCOM_DYNAMIC_TRACK_H_
#define DYNCOM_DYNAMIC_TRACK_H_

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dyncom/consensus_detect.h"
#include "dyncom/event_ingest.h"
#include "dyncom/window_graph.h"

namespace dyncom {

struct TrackingParams {
  double alpha = 0.5;
  double match_threshold = 0.25;
};

absl::Status ValidateTrackingParams(const TrackingParams& p);

enum class LifecycleType { kBirth = 0, kContinuation, kMerge, kSplit, kAbsent };

absl::string_view LifecycleName(LifecycleType t);
absl::StatusOr<LifecycleType> ParseLifecycle(absl::string_view name);

struct LifecycleEvent {
  int step = 0;
  LifecycleType type = LifecycleType::kBirth;
  // kMerge: ids of the timelines absorbed. kSplit: the parent timeline id.
  std::vector<int> related;

  friend bool operator==(const LifecycleEvent&, const LifecycleEvent&) =
      default;
};

// A dynamic community: matched step communities over time.
struct Timeline {
  int id = 0;
  std::vector<StepCommunity> observations;  // strictly increasing step
  std::vector<LifecycleEvent> events;
  // Observations of timelines merged into this one; they remain match
  // candidates.
  std::vector<StepCommunity> inherited;
  std::optional<int> merged_into;
  std::optional<int> merged_at;

  bool open() const { return !merged_into.has_value(); }
  const StepCommunity* ObservationAt(int step) const;

  friend bool operator==(const Timeline&, const Timeline&) = default;
};

struct TimelineSet {
  std::vector<Timeline> timelines;  // timelines[i].id == i
  int step_count = 0;

  const Timeline* Find(int id) const;
  friend bool operator==(const TimelineSet&, const TimelineSet&) = default;
};

// sqrt(|C n D| / |C| * |C n D| / |D|) over sorted, duplicate-free member
// lists. Both must be nonempty.
absl::StatusOr<double> Representativeness(std::span<const EntityRef> c,
                                          std::span<const EntityRef> d);

// Match candidates of a timeline, newest first: its own observations by
// decreasing step, with inherited observations interleaved by step after
// the timeline's own observation of the same step.
std::vector<const StepCommunity*> MatchCandidates(const Timeline& tl);

// Exponentially weighted mean of the representativeness of `members`
// against every candidate of `tl`. The i-th newest candidate has weight
// (1 - alpha)^i; weights are normalized to sum to one.
absl::StatusOr<double> TimelineSimilarity(std::span<const EntityRef> members,
                                          const Timeline& tl,
                                          const TrackingParams& params);

// Matches the communities of `step` against every open timeline.
//  - Several timelines matching one community merge into the most similar
//    of them; the others close.
//  - A timeline matching several communities continues with the most
//    similar one, and each remaining community opens a new timeline split
//    off from it. Merges take precedence over splits.
//  - Unmatched communities are born; unmatched open timelines record an
//    absence and stay open.
absl::StatusOr<TimelineSet> AdvanceStep(TimelineSet state, int step,
                                        std::vector<StepCommunity> communities,
                                        const TrackingParams& params);

// Tracks communities over `step_count` steps. `communities` may be in any
// order.
absl::StatusOr<TimelineSet> TrackAll(std::span<const StepCommunity> communities,
                                     int step_count,
                                     const TrackingParams& params);

// Open timelines such that, for every window, some account among the
// members of any of its observations posted inside that window.
std::vector<Timeline> ExtractPersistent(const TimelineSet& state,
                                        const EventLog& log,
                                        std::span<const Window> windows);

// Rows of: timeline_id step community_id_or_ABSENT event_type member_count
std::string TimelinesTsv(const TimelineSet& state,
                         absl::string_view config_digest);

// One row per timeline, one column per step. Cells hold the community id,
// ABSENT for unmatched steps, MERGED from the step a timeline was merged
// away, and are empty before birth.
std::string TimelineGridTsv(const TimelineSet& state,
                            absl::string_view config_digest);

// Lossless line-delimited JSON form used between pipeline stages.
std::string TimelineSetJsonl(const TimelineSet& state,
                             absl::string_view config_digest);
struct LoadedTimelines {
  TimelineSet state;
  std::string config_digest;
};
absl::StatusOr<LoadedTimelines> TimelineSetFromJsonl(absl::string_view text);

}  // namespace dyncom

#endif  // DYNCOM_DYNAMIC_TRACK_H_
