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

#ifndef DYNCOM_CONSENSUS_DETECT_H_
#define DYNCOM_CONSENSUS_DETECT_H_

#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "dyncom/artifact_io.h"
#include "dyncom/entity.h"
#include "dyncom/label_propagation.h"
#include "dyncom/window_graph.h"

namespace dyncom {

struct ConsensusParams {
  int runs = 100;
  double tau = 0.5;
  int max_iterations = 20;
  uint64_t seed = 0;
  // Worker threads for the independent base runs; results do not depend on
  // this value.
  int threads = 1;
};

absl::Status ValidateConsensusParams(const ConsensusParams& p);

// Fraction of partitions placing each node pair in the same group, for pairs
// co-clustered at least once. Keys are (u, v) with u < v.
std::vector<std::tuple<int, int, double>> CoClusteringWeights(
    std::span<const Partition> partitions);

struct ConsensusResult {
  Partition partition;
  bool converged = false;
  // Number of consensus-graph rounds performed (0 when the base runs on the
  // input graph already agreed).
  int iterations = 0;
};

// Runs the detector `runs` times with seeds seed+0 .. seed+runs-1, then
// repeatedly re-detects on the graph of co-clustering weights >= tau until
// all runs return the same partition. Without agreement after
// `max_iterations` rounds, the most frequent partition of the last round is
// returned with converged = false.
ConsensusResult ConsensusPartition(const WeightedGraph& graph,
                                   const CommunityDetector& detector,
                                   const ConsensusParams& params);

// A community found in one step network.
struct StepCommunity {
  int step = 0;
  int id = 0;                      // unique within the step
  std::vector<EntityRef> members;  // sorted, at least two

  friend bool operator==(const StepCommunity&, const StepCommunity&) = default;
};

struct StepDetection {
  std::vector<StepCommunity> communities;
  bool converged = true;
  int iterations = 0;
};

// Single run of the base detector on a step network, as entity groups.
std::vector<std::vector<EntityRef>> BaseDetect(
    const StepNetwork& net, uint64_t seed,
    const CommunityDetector& detector = LabelPropagationDetector());

// Consensus communities of one step. Ids are assigned by decreasing size,
// then by member order.
StepDetection ConsensusCommunities(
    const StepNetwork& net, const ConsensusParams& params,
    const CommunityDetector& detector = LabelPropagationDetector());

// Rows of: step community_id member_kind member_id
const std::vector<std::string>& CommunitiesColumns();
std::string CommunitiesTsv(std::span<const StepCommunity> communities,
                           absl::string_view config_digest);
absl::StatusOr<std::vector<StepCommunity>> CommunitiesFromTable(
    const TsvTable& table);

}  // namespace dyncom

#endif  // DYNCOM_CONSENSUS_DETECT_H_
