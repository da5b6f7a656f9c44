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

#include "dyncom/consensus_detect.h"

#include <algorithm>
#include <map>
#include <thread>

#include "absl/container/flat_hash_map.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "dyncom/status_macros.h"

namespace dyncom {
namespace {

std::vector<Partition> RunAll(const WeightedGraph& graph,
                              const CommunityDetector& detector,
                              const ConsensusParams& params) {
  std::vector<Partition> out(params.runs);
  const int threads = std::clamp(params.threads, 1, params.runs);
  auto work = [&](int first) {
    for (int r = first; r < params.runs; r += threads) {
      out[r] = detector.Detect(graph, params.seed + static_cast<uint64_t>(r));
    }
  };
  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(work, t);
  }
  return out;
}

bool AllEqual(const std::vector<Partition>& ps) {
  return std::all_of(ps.begin(), ps.end(),
                     [&](const Partition& p) { return p == ps.front(); });
}

const Partition& MostFrequent(const std::vector<Partition>& ps) {
  std::map<Partition, int> counts;
  for (const Partition& p : ps) ++counts[p];
  const Partition* best = &ps.front();
  int best_count = 0;
  for (const Partition& p : ps) {
    if (counts[p] > best_count) {
      best = &p;
      best_count = counts[p];
    }
  }
  return *best;
}

}  // namespace

absl::Status ValidateConsensusParams(const ConsensusParams& p) {
  if (p.runs < 1) {
    return absl::InvalidArgumentError(
        absl::StrCat("runs must be >= 1, got ", p.runs));
  }
  if (!(p.tau >= 0.0 && p.tau <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("tau must lie in [0,1], got %g", p.tau));
  }
  if (p.max_iterations < 1) {
    return absl::InvalidArgumentError(absl::StrCat(
        "max_iterations must be >= 1, got ", p.max_iterations));
  }
  return absl::OkStatus();
}

std::vector<std::tuple<int, int, double>> CoClusteringWeights(
    std::span<const Partition> partitions) {
  absl::flat_hash_map<std::pair<int, int>, int> together;
  for (const Partition& p : partitions) {
    for (const auto& group : p) {
      for (size_t i = 0; i < group.size(); ++i) {
        for (size_t j = i + 1; j < group.size(); ++j) {
          ++together[{group[i], group[j]}];
        }
      }
    }
  }
  std::vector<std::tuple<int, int, double>> out;
  out.reserve(together.size());
  const double runs = static_cast<double>(partitions.size());
  for (const auto& [pair, count] : together) {
    out.emplace_back(pair.first, pair.second, count / runs);
  }
  std::sort(out.begin(), out.end());
  return out;
}

ConsensusResult ConsensusPartition(const WeightedGraph& graph,
                                   const CommunityDetector& detector,
                                   const ConsensusParams& params) {
  ConsensusResult result;
  std::vector<Partition> runs = RunAll(graph, detector, params);
  for (int iter = 0;; ++iter) {
    if (AllEqual(runs)) {
      result.partition = runs.front();
      result.converged = true;
      result.iterations = iter;
      return result;
    }
    if (iter == params.max_iterations) {
      result.partition = MostFrequent(runs);
      result.converged = false;
      result.iterations = iter;
      return result;
    }
    WeightedGraph consensus(graph.num_nodes());
    // A pair is kept when at least tau * runs partitions agree on it.
    const double slack = 1e-12;
    for (const auto& [u, v, w] : CoClusteringWeights(runs)) {
      if (w >= params.tau - slack) consensus.AddEdge(u, v, w);
    }
    runs = RunAll(consensus, detector, params);
  }
}

std::vector<std::vector<EntityRef>> BaseDetect(
    const StepNetwork& net, uint64_t seed, const CommunityDetector& detector) {
  std::vector<std::vector<EntityRef>> out;
  for (const auto& group :
       detector.Detect(WeightedGraph::FromNetwork(net), seed)) {
    std::vector<EntityRef>& members = out.emplace_back();
    for (int v : group) members.push_back(net.nodes[v]);
  }
  return out;
}

StepDetection ConsensusCommunities(const StepNetwork& net,
                                   const ConsensusParams& params,
                                   const CommunityDetector& detector) {
  StepDetection out;
  if (net.empty()) return out;
  ConsensusResult r =
      ConsensusPartition(WeightedGraph::FromNetwork(net), detector, params);
  out.converged = r.converged;
  out.iterations = r.iterations;
  std::stable_sort(r.partition.begin(), r.partition.end(),
                   [](const auto& a, const auto& b) {
                     return a.size() > b.size();
                   });
  for (const auto& group : r.partition) {
    StepCommunity c;
    c.step = net.index;
    c.id = static_cast<int>(out.communities.size());
    for (int v : group) c.members.push_back(net.nodes[v]);
    out.communities.push_back(std::move(c));
  }
  return out;
}

const std::vector<std::string>& CommunitiesColumns() {
  static const auto* cols = new std::vector<std::string>{
      "step", "community_id", "member_kind", "member_id"};
  return *cols;
}

std::string CommunitiesTsv(std::span<const StepCommunity> communities,
                           absl::string_view config_digest) {
  std::string out = DigestLine(config_digest);
  absl::StrAppend(&out, absl::StrJoin(CommunitiesColumns(), "\t"), "\n");
  for (const StepCommunity& c : communities) {
    for (const EntityRef& m : c.members) {
      absl::StrAppend(&out, c.step, "\t", c.id, "\t", KindName(m.kind), "\t",
                      m.id, "\n");
    }
  }
  return out;
}

absl::StatusOr<std::vector<StepCommunity>> CommunitiesFromTable(
    const TsvTable& table) {
  std::map<std::pair<int, int>, StepCommunity> by_key;
  for (const auto& row : table.rows) {
    int step, id;
    if (!absl::SimpleAtoi(row[0], &step) || !absl::SimpleAtoi(row[1], &id) ||
        step < 0 || id < 0) {
      return absl::InvalidArgumentError(absl::StrCat(
          "communities table: bad step/community_id '", row[0], "', '", row[1],
          "'"));
    }
    ASSIGN_OR_RETURN(EntityKind kind, ParseKind(row[2]));
    StepCommunity& c = by_key[{step, id}];
    c.step = step;
    c.id = id;
    c.members.push_back(
        {kind, row[3],
         !(kind == EntityKind::kVideoChannel && row[3].starts_with("video:"))});
  }
  std::vector<StepCommunity> out;
  for (auto& [key, c] : by_key) {
    std::sort(c.members.begin(), c.members.end());
    c.members.erase(std::unique(c.members.begin(), c.members.end()),
                    c.members.end());
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace dyncom
