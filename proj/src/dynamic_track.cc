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

#include "dyncom/dynamic_track.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dyncom/status_macros.h"
#include "json.hpp"

namespace dyncom {
namespace {

using json = nlohmann::json;

// Similarities within this distance of the threshold count as matches.
constexpr double kMatchSlack = 1e-12;

// Preferred continuation among several candidate communities: higher
// similarity, then more members, then lexicographically smaller members.
bool BetterCommunity(double sim_a, const StepCommunity& a, double sim_b,
                     const StepCommunity& b) {
  if (sim_a != sim_b) return sim_a > sim_b;
  if (a.members.size() != b.members.size()) {
    return a.members.size() > b.members.size();
  }
  return a.members < b.members;
}

json CommunityToJson(const StepCommunity& c) {
  json members = json::array();
  for (const EntityRef& m : c.members) {
    members.push_back({KindName(m.kind), m.id, m.resolved});
  }
  return {{"step", c.step}, {"id", c.id}, {"members", members}};
}

absl::StatusOr<StepCommunity> CommunityFromJson(const json& j) {
  StepCommunity c;
  c.step = j.at("step").get<int>();
  c.id = j.at("id").get<int>();
  for (const json& m : j.at("members")) {
    ASSIGN_OR_RETURN(EntityKind kind, ParseKind(m.at(0).get<std::string>()));
    c.members.push_back({kind, m.at(1).get<std::string>(), m.at(2).get<bool>()});
  }
  return c;
}

}  // namespace

absl::Status ValidateTrackingParams(const TrackingParams& p) {
  if (!(p.alpha > 0.0 && p.alpha <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("alpha must lie in (0,1], got %g", p.alpha));
  }
  if (!(p.match_threshold >= 0.0 && p.match_threshold <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "match_threshold must lie in [0,1], got %g", p.match_threshold));
  }
  return absl::OkStatus();
}

absl::string_view LifecycleName(LifecycleType t) {
  switch (t) {
    case LifecycleType::kBirth:
      return "birth";
    case LifecycleType::kContinuation:
      return "continuation";
    case LifecycleType::kMerge:
      return "merge";
    case LifecycleType::kSplit:
      return "split";
    case LifecycleType::kAbsent:
      return "absent";
  }
  return "unknown";
}

absl::StatusOr<LifecycleType> ParseLifecycle(absl::string_view name) {
  for (LifecycleType t :
       {LifecycleType::kBirth, LifecycleType::kContinuation,
        LifecycleType::kMerge, LifecycleType::kSplit, LifecycleType::kAbsent}) {
    if (LifecycleName(t) == name) return t;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown lifecycle event '", name, "'"));
}

const StepCommunity* Timeline::ObservationAt(int step) const {
  for (const StepCommunity& c : observations) {
    if (c.step == step) return &c;
  }
  return nullptr;
}

const Timeline* TimelineSet::Find(int id) const {
  if (id < 0 || id >= static_cast<int>(timelines.size())) return nullptr;
  return &timelines[id];
}

absl::StatusOr<double> Representativeness(std::span<const EntityRef> c,
                                          std::span<const EntityRef> d) {
  if (c.empty() || d.empty()) {
    return absl::InvalidArgumentError(
        "representativeness is undefined for an empty community");
  }
  size_t common = 0;
  for (auto i = c.begin(), j = d.begin(); i != c.end() && j != d.end();) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  const double n = static_cast<double>(common);
  return std::sqrt((n / c.size()) * (n / d.size()));
}

std::vector<const StepCommunity*> MatchCandidates(const Timeline& tl) {
  std::vector<std::tuple<int, int, size_t, const StepCommunity*>> keyed;
  for (size_t i = 0; i < tl.observations.size(); ++i) {
    keyed.emplace_back(-tl.observations[i].step, 0, i, &tl.observations[i]);
  }
  for (size_t i = 0; i < tl.inherited.size(); ++i) {
    keyed.emplace_back(-tl.inherited[i].step, 1, i, &tl.inherited[i]);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<const StepCommunity*> out;
  for (const auto& k : keyed) out.push_back(std::get<3>(k));
  return out;
}

absl::StatusOr<double> TimelineSimilarity(std::span<const EntityRef> members,
                                          const Timeline& tl,
                                          const TrackingParams& params) {
  const std::vector<const StepCommunity*> candidates = MatchCandidates(tl);
  if (candidates.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("timeline ", tl.id, " has no observations"));
  }
  double weight = 1.0;
  double total_weight = 0.0;
  double sum = 0.0;
  for (const StepCommunity* cand : candidates) {
    ASSIGN_OR_RETURN(double sim, Representativeness(members, cand->members));
    sum += weight * sim;
    total_weight += weight;
    weight *= 1.0 - params.alpha;
  }
  return sum / total_weight;
}

absl::StatusOr<TimelineSet> AdvanceStep(TimelineSet state, int step,
                                        std::vector<StepCommunity> communities,
                                        const TrackingParams& params) {
  RETURN_IF_ERROR(ValidateTrackingParams(params));
  if (step < state.step_count) {
    return absl::InvalidArgumentError(absl::StrCat(
        "step ", step, " does not follow already tracked step ",
        state.step_count - 1));
  }
  std::set<int> ids;
  for (const StepCommunity& c : communities) {
    if (c.step != step) {
      return absl::InvalidArgumentError(absl::StrCat(
          "community ", c.id, " belongs to step ", c.step, ", not ", step));
    }
    if (c.members.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("community ", c.id, " has no members"));
    }
    if (!ids.insert(c.id).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate community id ", c.id, " in step ", step));
    }
  }
  std::sort(communities.begin(), communities.end(),
            [](const StepCommunity& a, const StepCommunity& b) {
              return a.id < b.id;
            });

  std::vector<int> open;
  for (const Timeline& tl : state.timelines) {
    if (tl.open()) open.push_back(tl.id);
  }
  const size_t n_tl = open.size();
  const size_t n_c = communities.size();
  std::vector<std::vector<double>> sim(n_tl, std::vector<double>(n_c, 0.0));
  std::vector<std::vector<bool>> match(n_tl, std::vector<bool>(n_c, false));
  for (size_t i = 0; i < n_tl; ++i) {
    for (size_t j = 0; j < n_c; ++j) {
      ASSIGN_OR_RETURN(sim[i][j],
                       TimelineSimilarity(communities[j].members,
                                          state.timelines[open[i]], params));
      match[i][j] = sim[i][j] >= params.match_threshold - kMatchSlack;
    }
  }

  std::vector<bool> consumed(n_tl, false);
  std::vector<bool> assigned(n_c, false);
  auto new_timeline = [&](size_t j) -> Timeline& {
    Timeline& tl = state.timelines.emplace_back();
    tl.id = static_cast<int>(state.timelines.size()) - 1;
    tl.observations.push_back(communities[j]);
    tl.events.push_back({step, LifecycleType::kBirth, {}});
    assigned[j] = true;
    return tl;
  };

  // Merges first.
  for (size_t j = 0; j < n_c; ++j) {
    std::vector<size_t> cands;
    for (size_t i = 0; i < n_tl; ++i) {
      if (!consumed[i] && match[i][j]) cands.push_back(i);
    }
    if (cands.size() < 2) continue;
    size_t survivor = cands.front();
    for (size_t i : cands) {
      if (sim[i][j] > sim[survivor][j]) survivor = i;
    }
    Timeline& into = state.timelines[open[survivor]];
    LifecycleEvent ev{step, LifecycleType::kMerge, {}};
    for (size_t i : cands) {
      consumed[i] = true;
      if (i == survivor) continue;
      Timeline& from = state.timelines[open[i]];
      ev.related.push_back(from.id);
      from.merged_into = into.id;
      from.merged_at = step;
      into.inherited.insert(into.inherited.end(), from.observations.begin(),
                            from.observations.end());
      into.inherited.insert(into.inherited.end(), from.inherited.begin(),
                            from.inherited.end());
    }
    into.observations.push_back(communities[j]);
    into.events.push_back(std::move(ev));
    assigned[j] = true;
  }

  // Continuations and splits.
  for (size_t i = 0; i < n_tl; ++i) {
    if (consumed[i]) continue;
    std::vector<size_t> avail;
    for (size_t j = 0; j < n_c; ++j) {
      if (!assigned[j] && match[i][j]) avail.push_back(j);
    }
    const int tid = open[i];
    if (avail.empty()) {
      state.timelines[tid].events.push_back({step, LifecycleType::kAbsent, {}});
      continue;
    }
    std::sort(avail.begin(), avail.end(), [&](size_t a, size_t b) {
      return BetterCommunity(sim[i][a], communities[a], sim[i][b],
                             communities[b]);
    });
    consumed[i] = true;
    state.timelines[tid].observations.push_back(communities[avail[0]]);
    state.timelines[tid].events.push_back(
        {step, LifecycleType::kContinuation, {}});
    assigned[avail[0]] = true;
    for (size_t k = 1; k < avail.size(); ++k) {
      new_timeline(avail[k]).events.push_back(
          {step, LifecycleType::kSplit, {tid}});
    }
  }

  // Leftovers: split off a timeline consumed by a merge, or born.
  for (size_t j = 0; j < n_c; ++j) {
    if (assigned[j]) continue;
    std::optional<size_t> parent;
    for (size_t i = 0; i < n_tl; ++i) {
      if (match[i][j] && (!parent || sim[i][j] > sim[*parent][j])) parent = i;
    }
    Timeline& tl = new_timeline(j);
    if (parent) {
      tl.events.push_back({step, LifecycleType::kSplit, {open[*parent]}});
    }
  }

  state.step_count = step + 1;
  return state;
}

absl::StatusOr<TimelineSet> TrackAll(std::span<const StepCommunity> communities,
                                     int step_count,
                                     const TrackingParams& params) {
  std::vector<std::vector<StepCommunity>> by_step(step_count);
  for (const StepCommunity& c : communities) {
    if (c.step < 0 || c.step >= step_count) {
      return absl::InvalidArgumentError(absl::StrCat(
          "community step ", c.step, " outside [0, ", step_count, ")"));
    }
    by_step[c.step].push_back(c);
  }
  TimelineSet state;
  for (int t = 0; t < step_count; ++t) {
    ASSIGN_OR_RETURN(state,
                     AdvanceStep(std::move(state), t, std::move(by_step[t]),
                                 params));
  }
  return state;
}

std::vector<Timeline> ExtractPersistent(const TimelineSet& state,
                                        const EventLog& log,
                                        std::span<const Window> windows) {
  std::vector<std::set<std::string>> active(windows.size());
  for (const EventRecord& ev : log) {
    for (size_t w = 0; w < windows.size(); ++w) {
      if (windows[w].Contains(ev.timestamp)) active[w].insert(ev.author);
    }
  }
  std::vector<Timeline> out;
  for (const Timeline& tl : state.timelines) {
    if (!tl.open()) continue;
    std::set<std::string> accounts;
    for (const StepCommunity& c : tl.observations) {
      for (const EntityRef& m : c.members) {
        if (m.kind == EntityKind::kAccount) accounts.insert(m.id);
      }
    }
    bool persistent = !windows.empty();
    for (size_t w = 0; w < windows.size() && persistent; ++w) {
      persistent = std::any_of(accounts.begin(), accounts.end(),
                               [&](const std::string& a) {
                                 return active[w].contains(a);
                               });
    }
    if (persistent) out.push_back(tl);
  }
  return out;
}

std::string TimelinesTsv(const TimelineSet& state,
                         absl::string_view config_digest) {
  std::string out = DigestLine(config_digest);
  out +=
      "timeline_id\tstep\tcommunity_id_or_ABSENT\tevent_type\tmember_count\n";
  for (const Timeline& tl : state.timelines) {
    for (const LifecycleEvent& ev : tl.events) {
      std::string type(LifecycleName(ev.type));
      if (!ev.related.empty()) {
        absl::StrAppend(&type, "(from=", absl::StrJoin(ev.related, ";"), ")");
      }
      const StepCommunity* c = ev.type == LifecycleType::kAbsent
                                   ? nullptr
                                   : tl.ObservationAt(ev.step);
      absl::StrAppend(&out, tl.id, "\t", ev.step, "\t",
                      c ? absl::StrCat(c->id) : "ABSENT", "\t", type, "\t",
                      c ? c->members.size() : 0, "\n");
    }
  }
  return out;
}

std::string TimelineGridTsv(const TimelineSet& state,
                            absl::string_view config_digest) {
  std::string out = DigestLine(config_digest);
  out += "timeline_id";
  for (int t = 0; t < state.step_count; ++t) absl::StrAppend(&out, "\tt", t);
  out += "\n";
  for (const Timeline& tl : state.timelines) {
    absl::StrAppend(&out, tl.id);
    std::vector<std::string> cells(state.step_count);
    for (const LifecycleEvent& ev : tl.events) {
      if (ev.type == LifecycleType::kAbsent) cells[ev.step] = "ABSENT";
    }
    for (const StepCommunity& c : tl.observations) {
      cells[c.step] = absl::StrCat(c.id);
    }
    if (tl.merged_at) {
      for (int t = *tl.merged_at; t < state.step_count; ++t) {
        cells[t] = "MERGED";
      }
    }
    for (const std::string& cell : cells) absl::StrAppend(&out, "\t", cell);
    out += "\n";
  }
  return out;
}

std::string TimelineSetJsonl(const TimelineSet& state,
                             absl::string_view config_digest) {
  std::string out =
      json{{"config_digest", config_digest}, {"step_count", state.step_count}}
          .dump();
  out += "\n";
  for (const Timeline& tl : state.timelines) {
    json j;
    j["id"] = tl.id;
    j["observations"] = json::array();
    for (const StepCommunity& c : tl.observations) {
      j["observations"].push_back(CommunityToJson(c));
    }
    j["inherited"] = json::array();
    for (const StepCommunity& c : tl.inherited) {
      j["inherited"].push_back(CommunityToJson(c));
    }
    j["events"] = json::array();
    for (const LifecycleEvent& ev : tl.events) {
      j["events"].push_back(
          {{"step", ev.step}, {"type", LifecycleName(ev.type)},
           {"related", ev.related}});
    }
    j["merged_into"] = tl.merged_into ? json(*tl.merged_into) : json(nullptr);
    j["merged_at"] = tl.merged_at ? json(*tl.merged_at) : json(nullptr);
    out += j.dump();
    out += "\n";
  }
  return out;
}

absl::StatusOr<LoadedTimelines> TimelineSetFromJsonl(absl::string_view text) {
  LoadedTimelines out;
  bool header = true;
  for (absl::string_view line : absl::StrSplit(text, '\n', absl::SkipEmpty())) {
    json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded() || !j.is_object()) {
      return absl::InvalidArgumentError("timelines: malformed JSON line");
    }
    try {
      if (header) {
        out.config_digest = j.at("config_digest").get<std::string>();
        out.state.step_count = j.at("step_count").get<int>();
        header = false;
        continue;
      }
      Timeline tl;
      tl.id = j.at("id").get<int>();
      if (tl.id != static_cast<int>(out.state.timelines.size())) {
        return absl::InvalidArgumentError("timelines: ids out of order");
      }
      for (const json& c : j.at("observations")) {
        ASSIGN_OR_RETURN(StepCommunity sc, CommunityFromJson(c));
        tl.observations.push_back(std::move(sc));
      }
      for (const json& c : j.at("inherited")) {
        ASSIGN_OR_RETURN(StepCommunity sc, CommunityFromJson(c));
        tl.inherited.push_back(std::move(sc));
      }
      for (const json& e : j.at("events")) {
        LifecycleEvent ev;
        ev.step = e.at("step").get<int>();
        ASSIGN_OR_RETURN(ev.type,
                         ParseLifecycle(e.at("type").get<std::string>()));
        ev.related = e.at("related").get<std::vector<int>>();
        tl.events.push_back(std::move(ev));
      }
      if (!j.at("merged_into").is_null()) {
        tl.merged_into = j.at("merged_into").get<int>();
        tl.merged_at = j.at("merged_at").get<int>();
      }
      out.state.timelines.push_back(std::move(tl));
    } catch (const json::exception& e) {
      return absl::InvalidArgumentError(
          absl::StrCat("timelines: ", e.what()));
    }
  }
  if (header) return absl::InvalidArgumentError("timelines: empty file");
  return out;
}

}  // namespace dyncom
