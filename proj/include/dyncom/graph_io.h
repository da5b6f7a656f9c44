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

#ifndef DYNCOM_GRAPH_IO_H_
#define DYNCOM_GRAPH_IO_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dyncom/artifact_io.h"
#include "dyncom/window_graph.h"

namespace dyncom {

// Edge list of one network:
//   source_kind source_id target_kind target_id tag weight
std::string EdgeListTsv(const StepNetwork& net);

// All steps in one table, prefixed with a step column.
std::string NetworksTsv(std::span<const StepNetwork> nets,
                        absl::string_view config_digest);
std::string WindowsTsv(std::span<const Window> windows,
                       absl::string_view config_digest);

absl::StatusOr<std::vector<Window>> WindowsFromTable(const TsvTable& table);
const std::vector<std::string>& WindowsColumns();

// One network per window, in window order; steps without edges are empty.
absl::StatusOr<std::vector<StepNetwork>> NetworksFromTable(
    const TsvTable& table, std::span<const Window> windows);
const std::vector<std::string>& NetworksColumns();

// GraphML document with a "kind" attribute on nodes and "tag"/"weight" on
// edges, readable by common graph visualization tools.
std::string ToGraphMl(const StepNetwork& net);

}  // namespace dyncom

#endif  // DYNCOM_GRAPH_IO_H_
