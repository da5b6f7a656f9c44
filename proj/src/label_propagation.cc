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

#include "dyncom/label_propagation.h"

#include <algorithm>
#include <map>
#include <numeric>

#include "dyncom/rng.h"

namespace dyncom {

WeightedGraph WeightedGraph::FromNetwork(const StepNetwork& net) {
  WeightedGraph g(static_cast<int>(net.nodes.size()));
  for (const StepEdge& e : net.edges) g.AddEdge(e.source, e.target, e.weight);
  return g;
}

void Canonicalize(Partition& p) {
  for (auto& group : p) std::sort(group.begin(), group.end());
  std::sort(p.begin(), p.end());
}

Partition LabelPropagationDetector::Detect(const WeightedGraph& graph,
                                           uint64_t seed) const {
  const int n = graph.num_nodes();
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::vector<int> order(label);
  std::vector<double> acc(n, 0.0);
  std::vector<int> touched;
  std::vector<int> best;
  Rng rng(seed);

  for (int sweep = 0; sweep < max_sweeps_; ++sweep) {
    rng.Shuffle(std::span<int>(order));
    bool changed = false;
    for (int v : order) {
      const auto& nbrs = graph.adjacency[v];
      if (nbrs.empty()) continue;
      touched.clear();
      for (const auto& [u, w] : nbrs) {
        const int l = label[u];
        if (acc[l] == 0.0) touched.push_back(l);
        acc[l] += w;
      }
      double top = 0.0;
      for (int l : touched) top = std::max(top, acc[l]);
      const double cut = top * (1.0 - 1e-12);
      best.clear();
      for (int l : touched) {
        if (acc[l] >= cut) best.push_back(l);
      }
      const bool keep = acc[label[v]] >= cut && acc[label[v]] > 0.0;
      for (int l : touched) acc[l] = 0.0;
      if (keep) continue;
      std::sort(best.begin(), best.end());
      label[v] = best[rng.UniformInt(best.size())];
      changed = true;
    }
    if (!changed) break;
  }

  std::map<int, std::vector<int>> groups;
  for (int v = 0; v < n; ++v) groups[label[v]].push_back(v);
  Partition p;
  for (auto& [l, members] : groups) {
    if (members.size() >= 2) p.push_back(std::move(members));
  }
  Canonicalize(p);
  return p;
}

}  // namespace dyncom
