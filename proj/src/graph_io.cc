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

#include "dyncom/graph_io.h"

#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_cat.h"
#include "dyncom/status_macros.h"

namespace dyncom {
namespace {

void AppendEdgeRow(std::string* out, const StepNetwork& net,
                   const StepEdge& e) {
  const EntityRef& a = net.nodes[e.source];
  const EntityRef& b = net.nodes[e.target];
  absl::StrAppend(out, KindName(a.kind), "\t", a.id, "\t", KindName(b.kind),
                  "\t", b.id, "\t", EdgeTagName(e.tag), "\t",
                  FormatDouble(e.weight), "\n");
}

std::string XmlEscape(absl::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      case '\'':
        out += "&apos;";
        break;
      default:
        out.push_back(c);
    }
  }
  return out;
}

}  // namespace

std::string EdgeListTsv(const StepNetwork& net) {
  std::string out =
      "source_kind\tsource_id\ttarget_kind\ttarget_id\ttag\tweight\n";
  for (const StepEdge& e : net.edges) AppendEdgeRow(&out, net, e);
  return out;
}

const std::vector<std::string>& NetworksColumns() {
  static const auto* cols = new std::vector<std::string>{
      "step", "source_kind", "source_id", "target_kind",
      "target_id", "tag", "weight"};
  return *cols;
}

const std::vector<std::string>& WindowsColumns() {
  static const auto* cols =
      new std::vector<std::string>{"step", "start", "end"};
  return *cols;
}

std::string NetworksTsv(std::span<const StepNetwork> nets,
                        absl::string_view config_digest) {
  std::string out = DigestLine(config_digest);
  absl::StrAppend(&out, absl::StrJoin(NetworksColumns(), "\t"), "\n");
  for (const StepNetwork& net : nets) {
    for (const StepEdge& e : net.edges) {
      absl::StrAppend(&out, net.index, "\t");
      AppendEdgeRow(&out, net, e);
    }
  }
  return out;
}

std::string WindowsTsv(std::span<const Window> windows,
                       absl::string_view config_digest) {
  std::string out = DigestLine(config_digest);
  absl::StrAppend(&out, "step\tstart\tend\n");
  for (const Window& w : windows) {
    absl::StrAppend(&out, w.index, "\t", FormatTimestamp(w.start), "\t",
                    FormatTimestamp(w.end), "\n");
  }
  return out;
}

absl::StatusOr<std::vector<Window>> WindowsFromTable(const TsvTable& table) {
  std::vector<Window> out;
  for (const auto& row : table.rows) {
    Window w;
    if (!absl::SimpleAtoi(row[0], &w.index) ||
        w.index != static_cast<int>(out.size())) {
      return absl::InvalidArgumentError(
          absl::StrCat("windows table: bad step '", row[0], "'"));
    }
    ASSIGN_OR_RETURN(w.start, ParseTimestamp(row[1]));
    ASSIGN_OR_RETURN(w.end, ParseTimestamp(row[2]));
    out.push_back(w);
  }
  return out;
}

absl::StatusOr<std::vector<StepNetwork>> NetworksFromTable(
    const TsvTable& table, std::span<const Window> windows) {
  using EdgeSpec = std::tuple<EntityRef, EntityRef, EdgeTag, double>;
  std::vector<std::vector<EdgeSpec>> per_step(windows.size());
  for (const auto& row : table.rows) {
    int step;
    if (!absl::SimpleAtoi(row[0], &step) || step < 0 ||
        step >= static_cast<int>(windows.size())) {
      return absl::InvalidArgumentError(
          absl::StrCat("networks table: step '", row[0], "' out of range"));
    }
    ASSIGN_OR_RETURN(EntityKind ka, ParseKind(row[1]));
    ASSIGN_OR_RETURN(EntityKind kb, ParseKind(row[3]));
    ASSIGN_OR_RETURN(EdgeTag tag, ParseEdgeTag(row[5]));
    double w;
    if (!absl::SimpleAtod(row[6], &w)) {
      return absl::InvalidArgumentError(
          absl::StrCat("networks table: bad weight '", row[6], "'"));
    }
    // Only unresolved video channels carry the "video:" prefix.
    auto make = [](EntityKind k, const std::string& id) {
      return EntityRef{k, id,
                       !(k == EntityKind::kVideoChannel && id.starts_with("video:"))};
    };
    per_step[step].emplace_back(make(ka, row[2]), make(kb, row[4]), tag, w);
  }
  std::vector<StepNetwork> out;
  for (size_t t = 0; t < windows.size(); ++t) {
    ASSIGN_OR_RETURN(StepNetwork net,
                     MakeStepNetwork(static_cast<int>(t), windows[t],
                                     per_step[t]));
    out.push_back(std::move(net));
  }
  return out;
}

std::string ToGraphMl(const StepNetwork& net) {
  std::string out =
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
      "  <key id=\"kind\" for=\"node\" attr.name=\"kind\" "
      "attr.type=\"string\"/>\n"
      "  <key id=\"label\" for=\"node\" attr.name=\"label\" "
      "attr.type=\"string\"/>\n"
      "  <key id=\"tag\" for=\"edge\" attr.name=\"tag\" "
      "attr.type=\"string\"/>\n"
      "  <key id=\"weight\" for=\"edge\" attr.name=\"weight\" "
      "attr.type=\"double\"/>\n";
  absl::StrAppend(&out, "  <graph id=\"step", net.index,
                  "\" edgedefault=\"undirected\">\n");
  for (size_t i = 0; i < net.nodes.size(); ++i) {
    absl::StrAppend(&out, "    <node id=\"n", i, "\"><data key=\"kind\">",
                    KindName(net.nodes[i].kind),
                    "</data><data key=\"label\">", XmlEscape(net.nodes[i].id),
                    "</data></node>\n");
  }
  for (size_t i = 0; i < net.edges.size(); ++i) {
    const StepEdge& e = net.edges[i];
    absl::StrAppend(&out, "    <edge id=\"e", i, "\" source=\"n", e.source,
                    "\" target=\"n", e.target, "\"><data key=\"tag\">",
                    EdgeTagName(e.tag), "</data><data key=\"weight\">",
                    FormatDouble(e.weight), "</data></edge>\n");
  }
  out += "  </graph>\n</graphml>\n";
  return out;
}

}  // namespace dyncom
