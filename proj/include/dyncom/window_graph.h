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

#ifndef DYNCOM_WINDOW_GRAPH_H_
#define DYNCOM_WINDOW_GRAPH_H_

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/time/civil_time.h"
#include "absl/time/time.h"
#include "dyncom/entity.h"
#include "dyncom/event_ingest.h"

namespace dyncom {

// Half-open time interval [start, end) of one analysis step.
struct Window {
  int index = 0;
  UnixSeconds start = 0;
  UnixSeconds end = 0;

  bool Contains(UnixSeconds t) const { return t >= start && t < end; }
  friend bool operator==(const Window&, const Window&) = default;
};

struct WindowSpec {
  absl::CivilDay start;
  absl::CivilDay end;  // exclusive
  absl::Duration length = absl::Hours(24 * 14);
  absl::Duration stride = absl::Hours(24 * 7);
};

absl::Status ValidateWindowSpec(const WindowSpec& spec);

// Windows starting at start + i * stride that lie wholly inside
// [start, end), ordered by start.
absl::StatusOr<std::vector<Window>> MakeWindows(const WindowSpec& spec);

// "YYYY-MM-DD".
absl::StatusOr<absl::CivilDay> ParseDay(absl::string_view text);
std::string FormatDay(absl::CivilDay day);
UnixSeconds DayStart(absl::CivilDay day);

// Accepts "<n>d", "<n>w" or "<n>h" with n a positive integer.
absl::StatusOr<absl::Duration> ParseDurationSpec(absl::string_view text);
std::string FormatDurationSpec(absl::Duration d);

// log(1 + p_ab / (p_a * p_b)), natural log. Requires p_a, p_b > 0.
absl::StatusOr<double> PmiWeight(double p_ab, double p_a, double p_b);

// Raw frequencies behind every PMI probability of one window.
struct InteractionCounts {
  // Pooled mention/reshare interactions. A post contributes one interaction
  // per distinct other account it mentions, reshares, or embeds media of.
  std::map<std::pair<std::string, std::string>, int64_t> pair_mr;
  std::map<std::string, int64_t> account_mr;
  int64_t total_mr = 0;

  // Posts carrying at least one external URL.
  std::map<std::pair<std::string, EntityRef>, int64_t> account_url;
  std::map<std::string, int64_t> account_url_posts;
  std::map<EntityRef, int64_t> entity_url_posts;
  std::map<EntityRef, std::set<std::string>> entity_accounts;
  std::set<std::string> accounts_with_urls;
  int64_t total_url_posts = 0;
};

InteractionCounts CountInteractions(std::span<const EventRecord> events,
                                    const Resolver& resolver);

struct EdgeFilterParams {
  double k = 2.0;
};

enum class EdgeTag { kMentionReshare = 0, kAccountExternal, kInferredExternal };

absl::string_view EdgeTagName(EdgeTag tag);
absl::StatusOr<EdgeTag> ParseEdgeTag(absl::string_view name);

// Undirected edge between node indices source < target.
struct StepEdge {
  int source = 0;
  int target = 0;
  EdgeTag tag = EdgeTag::kMentionReshare;
  double weight = 0.0;

  friend bool operator==(const StepEdge&, const StepEdge&) = default;
};

// Summary of the inferred-edge significance filter for one step.
struct InferredFilterStats {
  int64_t candidates = 0;
  int64_t removed = 0;
  double mean = 0.0;
  double stddev = 0.0;
  double threshold = 0.0;
};

// Weighted undirected homogeneous graph over heterogeneous-typed nodes.
struct StepNetwork {
  int index = 0;
  Window window;
  std::vector<EntityRef> nodes;  // sorted
  std::vector<StepEdge> edges;   // sorted by (source, target)
  InferredFilterStats filter;

  // -1 when absent.
  int NodeIndex(const EntityRef& e) const;
  bool empty() const { return nodes.empty(); }
  size_t CountEdges(EdgeTag tag) const;
};

// Builds the step network for the events of `window`:
//  - mentions and reshares are pooled into Account-Account edges;
//  - URL posts give Account-External edges;
//  - video channel and website nodes posted by a single account are dropped;
//  - external nodes sharing a posting account get inferred edges, of which
//    only those with weight >= mean + k * stddev survive;
//  - every edge is PMI weighted and isolated nodes are removed.
StepNetwork BuildStepNetwork(const EventLog& log, const Window& window,
                             const Resolver& resolver,
                             const EdgeFilterParams& filter);

// Assembles a network from an explicit node/edge list (deserialization,
// fixtures). Nodes referenced by edges are added; edges are canonicalized.
absl::StatusOr<StepNetwork> MakeStepNetwork(
    int index, Window window,
    const std::vector<std::tuple<EntityRef, EntityRef, EdgeTag, double>>&
        edges);

struct ActivityPoint {
  absl::Duration scale;
  double mean_active_fraction = 0.0;
};

std::vector<absl::Duration> DefaultActivityScales();

// Mean fraction of all log authors posting at least once per interval, for
// consecutive full intervals of each scale across [start, end).
absl::StatusOr<std::vector<ActivityPoint>> ActivityCurve(
    const EventLog& log, UnixSeconds start, UnixSeconds end,
    std::span<const absl::Duration> scales);

}  // namespace dyncom

#endif  // DYNCOM_WINDOW_GRAPH_H_
