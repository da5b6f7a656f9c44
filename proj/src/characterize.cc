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

#include "dyncom/characterize.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "dyncom/consensus_detect.h"
#include "dyncom/graph_io.h"
#include "dyncom/status_macros.h"
#include "json.hpp"

namespace dyncom {
namespace {

bool KindSelected(const std::vector<EntityKind>& kinds, EntityKind k) {
  return kinds.empty() || std::find(kinds.begin(), kinds.end(), k) != kinds.end();
}

const StepNetwork* NetworkForStep(std::span<const StepNetwork> networks,
                                  int step) {
  for (const StepNetwork& n : networks) {
    if (n.index == step) return &n;
  }
  return nullptr;
}

std::string RankingsTsv(const std::vector<TimelineRanking>& rankings,
                        absl::string_view digest) {
  std::string out = DigestLine(digest);
  out += "timeline_id\tmode\trank\tkind\tid\tscore\n";
  for (const TimelineRanking& r : rankings) {
    for (const RankingEntry& e : r.entries) {
      absl::StrAppend(&out, r.timeline_id, "\t", RankModeName(r.mode), "\t",
                      e.rank, "\t", KindName(e.entity.kind), "\t", e.entity.id,
                      "\t", FormatDouble(e.score), "\n");
    }
  }
  return out;
}

std::string ActivityTsv(const std::vector<TimelineActivity>& activity,
                        absl::string_view digest) {
  std::string out = DigestLine(digest);
  out += "timeline_id\tdate\tcommunity_z\trest_z\n";
  for (const TimelineActivity& a : activity) {
    for (size_t i = 0; i < a.series.dates.size(); ++i) {
      absl::StrAppend(&out, a.timeline_id, "\t",
                      absl::FormatCivilTime(a.series.dates[i]), "\t",
                      FormatDouble(a.series.community_z[i]), "\t",
                      FormatDouble(a.series.rest_z[i]), "\n");
    }
  }
  return out;
}

std::string ActivityCurveTsv(const std::vector<ActivityPoint>& curve,
                             absl::string_view digest) {
  std::string out = DigestLine(digest);
  out += "scale\tmean_active_fraction\n";
  for (const ActivityPoint& p : curve) {
    absl::StrAppend(&out, FormatDurationSpec(p.scale), "\t",
                    FormatDouble(p.mean_active_fraction), "\n");
  }
  return out;
}

std::string PersistentTsv(const std::vector<int>& ids,
                          absl::string_view digest) {
  std::string out = DigestLine(digest);
  out += "timeline_id\n";
  for (int id : ids) absl::StrAppend(&out, id, "\n");
  return out;
}

}  // namespace

absl::string_view RankModeName(RankMode mode) {
  return mode == RankMode::kFrequency ? "frequency" : "normalized_degree";
}

absl::StatusOr<std::vector<RankingEntry>> RankMembers(
    const TimelineSet& state, int timeline_id,
    std::span<const StepNetwork> networks, RankMode mode,
    const std::vector<EntityKind>& kinds, int total_steps, int top_k) {
  const Timeline* tl = state.Find(timeline_id);
  if (tl == nullptr) {
    return absl::NotFoundError(absl::StrCat("unknown timeline ", timeline_id));
  }
  if (total_steps <= 0) {
    return absl::InvalidArgumentError("total_steps must be positive");
  }
  std::map<EntityRef, double> score;
  for (const StepCommunity& c : tl->observations) {
    if (mode == RankMode::kFrequency) {
      for (const EntityRef& m : c.members) {
        if (KindSelected(kinds, m.kind)) score[m] += 1.0;
      }
      continue;
    }
    const StepNetwork* net = NetworkForStep(networks, c.step);
    if (net == nullptr) {
      return absl::NotFoundError(
          absl::StrCat("no step network for step ", c.step));
    }
    std::vector<bool> inside(net->nodes.size(), false);
    for (const EntityRef& m : c.members) {
      if (int v = net->NodeIndex(m); v >= 0) inside[v] = true;
      if (KindSelected(kinds, m.kind)) score.try_emplace(m, 0.0);
    }
    for (const StepEdge& e : net->edges) {
      if (!inside[e.source] || !inside[e.target]) continue;
      for (int v : {e.source, e.target}) {
        const EntityRef& m = net->nodes[v];
        if (KindSelected(kinds, m.kind)) score[m] += e.weight;
      }
    }
  }
  std::vector<RankingEntry> out;
  for (const auto& [entity, s] : score) {
    out.push_back({entity, mode == RankMode::kFrequency ? s : s / total_steps,
                   0});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const RankingEntry& a, const RankingEntry& b) {
                     return a.score > b.score;
                   });
  if (top_k > 0 && static_cast<int>(out.size()) > top_k) out.resize(top_k);
  for (size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
  return out;
}

std::vector<double> ZScores(std::span<const double> values) {
  std::vector<double> out(values.size(), 0.0);
  if (values.empty()) return out;
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / values.size());
  if (sd == 0.0) return out;
  for (size_t i = 0; i < values.size(); ++i) {
    out[i] = (values[i] - mean) / sd;
  }
  return out;
}

ActivitySeries ActivityZScore(const EventLog& log,
                              const std::set<std::string>& community_accounts,
                              absl::CivilDay start, absl::CivilDay end) {
  ActivitySeries s;
  const int64_t days = std::max<int64_t>(0, end - start);
  std::vector<double> community(days, 0.0), rest(days, 0.0);
  const UnixSeconds t0 = DayStart(start);
  for (const EventRecord& ev : log) {
    if (ev.timestamp < t0) continue;
    const int64_t d = (ev.timestamp - t0) / 86400;
    if (d >= days) continue;
    (community_accounts.contains(ev.author) ? community : rest)[d] += 1.0;
  }
  for (int64_t d = 0; d < days; ++d) s.dates.push_back(start + d);
  s.community_z = ZScores(community);
  s.rest_z = ZScores(rest);
  return s;
}

std::set<std::string> TimelineAccounts(const Timeline& tl) {
  std::set<std::string> out;
  for (const StepCommunity& c : tl.observations) {
    for (const EntityRef& m : c.members) {
      if (m.kind == EntityKind::kAccount) out.insert(m.id);
    }
  }
  return out;
}

int CommunityComponentCount(const StepNetwork& net,
                            std::span<const EntityRef> members,
                            bool accounts_only) {
  const int n = static_cast<int>(net.nodes.size());
  std::vector<bool> inside(n, false);
  int kept = 0;
  for (const EntityRef& m : members) {
    if (accounts_only && m.kind != EntityKind::kAccount) continue;
    if (int v = net.NodeIndex(m); v >= 0 && !inside[v]) {
      inside[v] = true;
      ++kept;
    }
  }
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int components = kept;
  for (const StepEdge& e : net.edges) {
    if (!inside[e.source] || !inside[e.target]) continue;
    const int a = find(e.source), b = find(e.target);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  return components;
}

absl::StatusOr<std::vector<ManifestEntry>> ExportBundle(
    const Bundle& bundle, const std::filesystem::path& out_dir) {
  if (bundle.state == nullptr) {
    return absl::InvalidArgumentError("bundle has no timeline set");
  }
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec || !std::filesystem::is_directory(out_dir)) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create output directory ", out_dir.string()));
  }
  const std::string& digest = bundle.config_digest;
  FileBatch batch(out_dir);
  batch.Add("networks.tsv", NetworksTsv(bundle.networks, digest));
  for (const StepNetwork& net : bundle.networks) {
    batch.Add(absl::StrFormat("graphs/step_%03d.graphml", net.index),
              ToGraphMl(net));
  }
  std::vector<StepCommunity> communities;
  for (const Timeline& tl : bundle.state->timelines) {
    communities.insert(communities.end(), tl.observations.begin(),
                       tl.observations.end());
  }
  std::sort(communities.begin(), communities.end(),
            [](const StepCommunity& a, const StepCommunity& b) {
              return std::tie(a.step, a.id) < std::tie(b.step, b.id);
            });
  batch.Add("communities.tsv", CommunitiesTsv(communities, digest));
  batch.Add("timelines.tsv", TimelinesTsv(*bundle.state, digest));
  batch.Add("timeline_grid.tsv", TimelineGridTsv(*bundle.state, digest));
  batch.Add("persistent.tsv", PersistentTsv(bundle.persistent_ids, digest));
  batch.Add("rankings.tsv", RankingsTsv(bundle.rankings, digest));
  batch.Add("activity.tsv", ActivityTsv(bundle.activity, digest));
  batch.Add("activity_curve.tsv",
            ActivityCurveTsv(bundle.activity_curve, digest));
  ASSIGN_OR_RETURN(std::vector<ManifestEntry> entries, batch.Commit());

  nlohmann::ordered_json manifest;
  manifest["config_digest"] = digest;
  manifest["seed"] = bundle.seed;
  manifest["config"] = bundle.config_text;
  manifest["artifacts"] = nlohmann::ordered_json::array();
  for (const ManifestEntry& e : entries) {
    manifest["artifacts"].push_back(
        {{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
  }
  RETURN_IF_ERROR(
      WriteFileAtomic(out_dir / "manifest.json", manifest.dump(2) + "\n"));
  return entries;
}

}  // namespace dyncom
