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

#ifndef DYNCOM_LABEL_PROPAGATION_H_
#define DYNCOM_LABEL_PROPAGATION_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "dyncom/window_graph.h"

namespace dyncom {

// Compact undirected weighted graph over node ids 0..num_nodes-1.
struct WeightedGraph {
  explicit WeightedGraph(int n = 0) : adjacency(n) {}

  static WeightedGraph FromNetwork(const StepNetwork& net);

  int num_nodes() const { return static_cast<int>(adjacency.size()); }
  void AddEdge(int u, int v, double w) {
    adjacency[u].emplace_back(v, w);
    adjacency[v].emplace_back(u, w);
  }

  std::vector<std::vector<std::pair<int, double>>> adjacency;
};

// Groups of node ids. Canonical form: each group sorted ascending, groups
// sorted lexicographically.
using Partition = std::vector<std::vector<int>>;

void Canonicalize(Partition& p);

// Base community detector used inside the consensus procedure. Must be
// deterministic for a fixed seed and may leave nodes unassigned.
class CommunityDetector {
 public:
  virtual ~CommunityDetector() = default;

  // Returns a canonical partition with singleton groups removed.
  virtual Partition Detect(const WeightedGraph& graph, uint64_t seed) const = 0;
};

// Asynchronous weighted label propagation. Each sweep visits nodes in a fresh
// random order; a node keeps its label while that label carries maximal
// incident weight, otherwise it adopts one of the maximal labels uniformly at
// random. Stops after a sweep without changes or after `max_sweeps`.
class LabelPropagationDetector : public CommunityDetector {
 public:
  explicit LabelPropagationDetector(int max_sweeps = 100)
      : max_sweeps_(max_sweeps) {}

  Partition Detect(const WeightedGraph& graph, uint64_t seed) const override;

 private:
  int max_sweeps_;
};

}  // namespace dyncom

#endif  // DYNCOM_LABEL_PROPAGATION_H_
