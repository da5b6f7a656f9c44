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

#include "dyncom/synth.h"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "dyncom/rng.h"
#include "dyncom/status_macros.h"
#include "dyncom/window_graph.h"

namespace dyncom {
namespace {

constexpr int64_t kWeek = 7 * 86400;

double Jaccard(std::span<const EntityRef> a, std::span<const EntityRef> b) {
  std::vector<EntityRef> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(common));
  const size_t uni = a.size() + b.size() - common.size();
  return uni == 0 ? 1.0 : static_cast<double>(common.size()) / uni;
}

EntityRef PlantedExternal(int label, int k) {
  switch (k % 3) {
    case 0:
      return EntityRef::Website(absl::StrFormat("site-l%d-e%d.org", label, k));
    case 1:
      return EntityRef::VideoChannel(absl::StrFormat("chan-l%d-e%d", label, k),
                                     true);
    default:
      return EntityRef::SocialProfile(
          absl::StrFormat("profile-l%d-e%d", label, k));
  }
}

struct World {
  std::vector<std::string> accounts;
  std::vector<int> label;  // per account
  std::map<int, std::vector<EntityRef>> externals;
  int next_label = 0;

  std::map<int, std::vector<int>> Groups() const {
    std::map<int, std::vector<int>> g;
    for (const auto& [l, ext] : externals) g[l];
    for (size_t a = 0; a < accounts.size(); ++a) g[label[a]].push_back(a);
    return g;
  }
};

absl::Status Apply(const ScriptDirective& d, World& w,
                   std::vector<PlantedEvent>& lifecycle) {
  auto require = [&](int l) -> absl::Status {
    if (!w.externals.contains(l)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "script at step ", d.step, " references community ", l,
          " which does not exist then"));
    }
    return absl::OkStatus();
  };
  RETURN_IF_ERROR(require(d.first));
  if (d.kind == ScriptDirective::Kind::kMerge) {
    RETURN_IF_ERROR(require(d.second));
    if (d.first == d.second) {
      return absl::InvalidArgumentError("cannot merge a community with itself");
    }
    for (int& l : w.label) {
      if (l == d.second) l = d.first;
    }
    auto& into = w.externals[d.first];
    auto& from = w.externals[d.second];
    into.insert(into.end(), from.begin(), from.end());
    w.externals.erase(d.second);
    lifecycle.push_back({d.step, LifecycleType::kMerge, {d.first, d.second}});
    return absl::OkStatus();
  }
  std::vector<int> members = w.Groups()[d.first];
  auto& ext = w.externals[d.first];
  if (members.size() < 4 || ext.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "script at step ", d.step, " splits community ", d.first,
        " which needs at least 4 accounts and 2 external entities"));
  }
  const int fresh = w.next_label++;
  for (size_t i = members.size() / 2; i < members.size(); ++i) {
    w.label[members[i]] = fresh;
  }
  w.externals[fresh].assign(ext.begin() + ext.size() / 2, ext.end());
  ext.resize(ext.size() / 2);
  lifecycle.push_back({d.step, LifecycleType::kSplit, {d.first, fresh}});
  return absl::OkStatus();
}

void Churn(double rate, World& w, Rng& rng) {
  if (w.externals.size() < 2) return;
  const size_t n = w.accounts.size();
  const size_t moves = static_cast<size_t>(std::llround(rate * n));
  std::vector<size_t> order(n);
  for (size_t i = 0; i < n; ++i) order[i] = i;
  std::vector<int> labels;
  for (const auto& [l, ext] : w.externals) labels.push_back(l);
  for (size_t i = 0; i < moves && i < n; ++i) {
    std::swap(order[i], order[i + rng.UniformInt(n - i)]);
    const size_t a = order[i];
    int to;
    do {
      to = labels[rng.UniformInt(labels.size())];
    } while (to == w.label[a]);
    w.label[a] = to;
  }
}

std::map<int, std::vector<EntityRef>> Snapshot(const World& w) {
  std::map<int, std::vector<EntityRef>> out;
  for (const auto& [l, members] : w.Groups()) {
    std::vector<EntityRef>& m = out[l];
    for (int a : members) m.push_back(EntityRef::Account(w.accounts[a]));
    const auto& ext = w.externals.at(l);
    m.insert(m.end(), ext.begin(), ext.end());
    std::sort(m.begin(), m.end());
  }
  return out;
}

}  // namespace

absl::StatusOr<std::vector<ScriptDirective>> ParseLifecycleScript(
    absl::string_view text) {
  std::vector<ScriptDirective> out;
  for (absl::string_view item : absl::StrSplit(text, ';', absl::SkipEmpty())) {
    auto bad = [&] {
      return absl::InvalidArgumentError(absl::StrCat(
          "bad lifecycle directive '", item,
          "' (expected merge@STEP:A+B or split@STEP:A)"));
    };
    std::vector<absl::string_view> head = absl::StrSplit(item, '@');
    if (head.size() != 2) return bad();
    std::vector<absl::string_view> at = absl::StrSplit(head[1], ':');
    if (at.size() != 2) return bad();
    ScriptDirective d;
    if (!absl::SimpleAtoi(at[0], &d.step)) return bad();
    if (head[0] == "merge") {
      d.kind = ScriptDirective::Kind::kMerge;
      std::vector<absl::string_view> ab = absl::StrSplit(at[1], '+');
      if (ab.size() != 2 || !absl::SimpleAtoi(ab[0], &d.first) ||
          !absl::SimpleAtoi(ab[1], &d.second)) {
        return bad();
      }
    } else if (head[0] == "split") {
      d.kind = ScriptDirective::Kind::kSplit;
      if (!absl::SimpleAtoi(at[1], &d.first)) return bad();
    } else {
      return bad();
    }
    out.push_back(d);
  }
  return out;
}

std::string FormatLifecycleScript(std::span<const ScriptDirective> script) {
  std::vector<std::string> parts;
  for (const ScriptDirective& d : script) {
    if (d.kind == ScriptDirective::Kind::kMerge) {
      parts.push_back(absl::StrCat("merge@", d.step, ":", d.first, "+",
                                   d.second));
    } else {
      parts.push_back(absl::StrCat("split@", d.step, ":", d.first));
    }
  }
  return absl::StrJoin(parts, ";");
}

absl::Status ValidateScenarioConfig(const ScenarioConfig& cfg) {
  if (cfg.communities < 1) {
    return absl::InvalidArgumentError("communities must be >= 1");
  }
  if (cfg.accounts_per_community < 2) {
    return absl::InvalidArgumentError("accounts_per_community must be >= 2");
  }
  if (cfg.external_per_community < 0) {
    return absl::InvalidArgumentError("external_per_community must be >= 0");
  }
  if (cfg.steps < 1) return absl::InvalidArgumentError("steps must be >= 1");
  if (!(cfg.churn_rate >= 0.0 && cfg.churn_rate <= 1.0)) {
    return absl::InvalidArgumentError("churn_rate must lie in [0,1]");
  }
  if (!(cfg.intra_event_rate >= 0.0) || !(cfg.inter_event_rate >= 0.0)) {
    return absl::InvalidArgumentError("event rates must be >= 0");
  }
  for (const ScriptDirective& d : cfg.lifecycle_script) {
    if (d.step < 1 || d.step >= cfg.steps) {
      return absl::InvalidArgumentError(absl::StrCat(
          "script step ", d.step, " outside [1, ", cfg.steps, ")"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ScenarioConfig> ParseScenarioConfig(absl::string_view text) {
  ASSIGN_OR_RETURN(auto kv, ParseKeyValues(text));
  ScenarioConfig cfg;
  for (const auto& [key, value] : kv) {
    bool ok = true;
    if (key == "communities") {
      ok = absl::SimpleAtoi(value, &cfg.communities);
    } else if (key == "accounts_per_community") {
      ok = absl::SimpleAtoi(value, &cfg.accounts_per_community);
    } else if (key == "external_per_community") {
      ok = absl::SimpleAtoi(value, &cfg.external_per_community);
    } else if (key == "steps") {
      ok = absl::SimpleAtoi(value, &cfg.steps);
    } else if (key == "churn_rate") {
      ok = absl::SimpleAtod(value, &cfg.churn_rate);
    } else if (key == "intra_event_rate") {
      ok = absl::SimpleAtod(value, &cfg.intra_event_rate);
    } else if (key == "inter_event_rate") {
      ok = absl::SimpleAtod(value, &cfg.inter_event_rate);
    } else if (key == "lifecycle_script") {
      ASSIGN_OR_RETURN(cfg.lifecycle_script, ParseLifecycleScript(value));
    } else if (key == "seed") {
      ok = absl::SimpleAtoi(value, &cfg.seed);
    } else if (key == "start") {
      ASSIGN_OR_RETURN(cfg.start, ParseDay(value));
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown scenario key '", key, "'"));
    }
    if (!ok) {
      return absl::InvalidArgumentError(
          absl::StrCat("bad value '", value, "' for scenario key '", key, "'"));
    }
  }
  RETURN_IF_ERROR(ValidateScenarioConfig(cfg));
  return cfg;
}

std::string FormatScenarioConfig(const ScenarioConfig& cfg) {
  return absl::StrCat(
      "communities=", cfg.communities, "\n",
      "accounts_per_community=", cfg.accounts_per_community, "\n",
      "external_per_community=", cfg.external_per_community, "\n",
      "steps=", cfg.steps, "\n", "churn_rate=", FormatDouble(cfg.churn_rate),
      "\n", "intra_event_rate=", FormatDouble(cfg.intra_event_rate), "\n",
      "inter_event_rate=", FormatDouble(cfg.inter_event_rate), "\n",
      "lifecycle_script=", FormatLifecycleScript(cfg.lifecycle_script), "\n",
      "seed=", cfg.seed, "\n", "start=", FormatDay(cfg.start), "\n");
}

absl::StatusOr<Scenario> GenerateScenario(const ScenarioConfig& cfg) {
  RETURN_IF_ERROR(ValidateScenarioConfig(cfg));
  Rng rng(cfg.seed);
  World world;
  for (int c = 0; c < cfg.communities; ++c) {
    for (int i = 0; i < cfg.accounts_per_community; ++i) {
      world.accounts.push_back(
          absl::StrFormat("acct%03d", c * cfg.accounts_per_community + i));
      world.label.push_back(c);
    }
    auto& ext = world.externals[c];
    for (int k = 0; k < cfg.external_per_community; ++k) {
      ext.push_back(PlantedExternal(c, k));
    }
  }
  world.next_label = cfg.communities;

  Scenario out;
  GroundTruth& truth = out.truth;
  truth.steps = cfg.steps;
  for (int t = 0; t < cfg.steps; ++t) {
    for (const ScriptDirective& d : cfg.lifecycle_script) {
      if (d.step == t) RETURN_IF_ERROR(Apply(d, world, truth.lifecycle));
    }
    if (t > 0) Churn(cfg.churn_rate, world, rng);
    truth.membership.push_back(Snapshot(world));
  }
  for (const auto& [label, members] : truth.membership.front()) {
    bool everywhere = true;
    for (const auto& step : truth.membership) {
      everywhere = everywhere && step.contains(label);
    }
    if (everywhere) truth.persistent.insert(label);
  }

  // Week w is generated from the membership of step max(w - 1, 0), so the
  // newer half of each window reflects that window's planted state.
  struct Draft {
    UnixSeconds ts;
    EventRecord ev;
  };
  std::vector<Draft> drafts;
  const UnixSeconds t0 = DayStart(cfg.start);
  auto when = [&](int week) {
    return t0 + week * kWeek + static_cast<int64_t>(rng.UniformInt(kWeek));
  };
  for (int week = 0; week <= cfg.steps; ++week) {
    const auto& snap = truth.membership[std::clamp(week - 1, 0, cfg.steps - 1)];
    std::map<int, std::vector<std::string>> accounts;
    std::map<int, std::vector<EntityRef>> externals;
    std::vector<std::string> everyone;
    for (const auto& [label, members] : snap) {
      for (const EntityRef& m : members) {
        if (m.kind == EntityKind::kAccount) {
          accounts[label].push_back(m.id);
          everyone.push_back(m.id);
        } else {
          externals[label].push_back(m);
        }
      }
    }
    for (const auto& [label, members] : accounts) {
      std::map<EntityRef, std::set<std::string>> posted;
      for (const std::string& a : members) {
        const int64_t intra = rng.Poisson(cfg.intra_event_rate / 2);
        for (int64_t k = 0; k < intra && members.size() > 1; ++k) {
          std::string to;
          do {
            to = members[rng.UniformInt(members.size())];
          } while (to == a);
          EventRecord ev;
          ev.author = a;
          if (rng.Bernoulli(0.5)) {
            ev.mentioned.push_back(to);
          } else {
            ev.reshare_of = to;
          }
          drafts.push_back({when(week), std::move(ev)});
        }
        const int64_t inter = rng.Poisson(cfg.inter_event_rate / 2);
        const size_t outside = everyone.size() - members.size();
        for (int64_t k = 0; k < inter && outside > 0; ++k) {
          std::string to;
          do {
            to = everyone[rng.UniformInt(everyone.size())];
          } while (std::find(members.begin(), members.end(), to) !=
                   members.end());
          EventRecord ev;
          ev.author = a;
          ev.mentioned.push_back(to);
          drafts.push_back({when(week), std::move(ev)});
        }
        const auto& ext = externals[label];
        const int64_t url_posts = rng.Poisson(cfg.intra_event_rate / 2);
        for (int64_t k = 0; k < url_posts && !ext.empty(); ++k) {
          EventRecord ev;
          ev.author = a;
          const EntityRef& e = ext[rng.UniformInt(ext.size())];
          ev.urls.push_back(CanonicalUrl(e));
          posted[e].insert(a);
          if (ext.size() > 1 && rng.Bernoulli(0.5)) {
            const EntityRef& f = ext[rng.UniformInt(ext.size())];
            if (!(f == e)) {
              ev.urls.push_back(CanonicalUrl(f));
              posted[f].insert(a);
            }
          }
          drafts.push_back({when(week), std::move(ev)});
        }
      }
      // Keep every planted external above the single-account filter.
      for (const EntityRef& e : externals[label]) {
        std::set<std::string>& by = posted[e];
        for (const std::string& a : members) {
          if (by.size() >= 2) break;
          if (by.contains(a)) continue;
          EventRecord ev;
          ev.author = a;
          ev.urls.push_back(CanonicalUrl(e));
          by.insert(a);
          drafts.push_back({when(week), std::move(ev)});
        }
      }
    }
  }
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.ts < b.ts; });
  for (size_t i = 0; i < drafts.size(); ++i) {
    drafts[i].ev.event_id = absl::StrFormat("e%07d", i);
    drafts[i].ev.timestamp = drafts[i].ts;
    out.log.push_back(std::move(drafts[i].ev));
  }
  return out;
}

absl::StatusOr<TrackingScores> EvaluateTracking(
    const TimelineSet& found, const GroundTruth& truth,
    std::span<const int> found_persistent) {
  if (found.step_count != truth.steps) {
    return absl::InvalidArgumentError(
        absl::StrCat("found timelines cover ", found.step_count,
                     " steps but the ground truth has ", truth.steps));
  }
  TrackingScores s;
  // Nothing found scores zero across the board, even against an event-free
  // or persistence-free truth.
  if (found.timelines.empty()) return s;
  // label votes per found timeline
  std::map<int, std::map<int, int>> votes;
  double jaccard_sum = 0.0;
  for (int t = 0; t < truth.steps; ++t) {
    std::vector<std::pair<int, const StepCommunity*>> f;
    for (const Timeline& tl : found.timelines) {
      if (const StepCommunity* c = tl.ObservationAt(t)) f.emplace_back(tl.id, c);
    }
    const auto& planted = truth.membership[t];
    if (planted.empty()) {
      jaccard_sum += f.empty() ? 1.0 : 0.0;
      continue;
    }
    std::vector<std::tuple<double, size_t, int>> pairs;
    for (size_t i = 0; i < f.size(); ++i) {
      for (const auto& [label, members] : planted) {
        const double j = Jaccard(f[i].second->members, members);
        if (j > 0.0) pairs.emplace_back(-j, i, label);
      }
    }
    std::sort(pairs.begin(), pairs.end());
    std::set<size_t> used_found;
    std::set<int> used_label;
    double step_sum = 0.0;
    for (const auto& [neg_j, i, label] : pairs) {
      if (used_found.contains(i) || used_label.contains(label)) continue;
      used_found.insert(i);
      used_label.insert(label);
      step_sum += -neg_j;
      ++votes[f[i].first][label];
    }
    jaccard_sum += step_sum / planted.size();
  }
  s.mean_jaccard = truth.steps > 0 ? jaccard_sum / truth.steps : 0.0;

  if (truth.lifecycle.empty()) {
    s.events_recovered = 1.0;
  } else {
    int hit = 0;
    for (const PlantedEvent& pe : truth.lifecycle) {
      bool found_it = false;
      for (const Timeline& tl : found.timelines) {
        for (const LifecycleEvent& ev : tl.events) {
          found_it = found_it ||
                     (ev.type == pe.type && std::abs(ev.step - pe.step) <= 1);
        }
      }
      hit += found_it;
    }
    s.events_recovered = static_cast<double>(hit) / truth.lifecycle.size();
  }

  std::set<int> hit_labels;
  int true_positive = 0;
  for (int id : found_persistent) {
    auto it = votes.find(id);
    if (it == votes.end()) continue;
    int best = -1, best_votes = 0;
    for (const auto& [label, n] : it->second) {
      if (n > best_votes) {
        best = label;
        best_votes = n;
      }
    }
    if (truth.persistent.contains(best) && hit_labels.insert(best).second) {
      ++true_positive;
    }
  }
  if (found_persistent.empty()) {
    s.persistent_precision = truth.persistent.empty() ? 1.0 : 0.0;
  } else {
    s.persistent_precision =
        static_cast<double>(true_positive) / found_persistent.size();
  }
  s.persistent_recall =
      truth.persistent.empty()
          ? (found_persistent.empty() ? 1.0 : 0.0)
          : static_cast<double>(true_positive) / truth.persistent.size();
  return s;
}

GroundTruth TruthFromTimelines(const TimelineSet& found,
                               std::span<const int> persistent) {
  GroundTruth truth;
  truth.steps = found.step_count;
  truth.membership.resize(found.step_count);
  for (const Timeline& tl : found.timelines) {
    for (const StepCommunity& c : tl.observations) {
      truth.membership[c.step][tl.id] = c.members;
    }
    for (const LifecycleEvent& ev : tl.events) {
      if (ev.type == LifecycleType::kMerge || ev.type == LifecycleType::kSplit) {
        PlantedEvent pe{ev.step, ev.type, ev.related};
        pe.labels.push_back(tl.id);
        truth.lifecycle.push_back(std::move(pe));
      }
    }
  }
  truth.persistent.insert(persistent.begin(), persistent.end());
  return truth;
}

std::string TruthCommunitiesTsv(const GroundTruth& truth) {
  std::string out = "step\tcommunity_id\tmember_kind\tmember_id\n";
  for (int t = 0; t < truth.steps; ++t) {
    for (const auto& [label, members] : truth.membership[t]) {
      for (const EntityRef& m : members) {
        absl::StrAppend(&out, t, "\t", label, "\t", KindName(m.kind), "\t",
                        m.id, "\n");
      }
    }
  }
  return out;
}

std::string TruthLifecycleTsv(const GroundTruth& truth) {
  std::string out = "step\tevent_type\tlabels\n";
  for (const PlantedEvent& e : truth.lifecycle) {
    absl::StrAppend(&out, e.step, "\t", LifecycleName(e.type), "\t",
                    absl::StrJoin(e.labels, ";"), "\n");
  }
  return out;
}

absl::StatusOr<GroundTruth> TruthFromTables(const TsvTable& communities,
                                            const TsvTable& lifecycle,
                                            int steps) {
  GroundTruth truth;
  truth.steps = steps;
  truth.membership.resize(steps);
  for (const auto& row : communities.rows) {
    int step, label;
    if (!absl::SimpleAtoi(row[0], &step) || !absl::SimpleAtoi(row[1], &label) ||
        step < 0 || step >= steps) {
      return absl::InvalidArgumentError(
          absl::StrCat("truth communities: bad row at step '", row[0], "'"));
    }
    ASSIGN_OR_RETURN(EntityKind kind, ParseKind(row[2]));
    truth.membership[step][label].push_back({kind, row[3], true});
  }
  for (auto& step : truth.membership) {
    for (auto& [label, members] : step) {
      std::sort(members.begin(), members.end());
    }
  }
  for (const auto& row : lifecycle.rows) {
    PlantedEvent e;
    if (!absl::SimpleAtoi(row[0], &e.step)) {
      return absl::InvalidArgumentError("truth lifecycle: bad step");
    }
    ASSIGN_OR_RETURN(e.type, ParseLifecycle(row[1]));
    for (absl::string_view l : absl::StrSplit(row[2], ';', absl::SkipEmpty())) {
      int label;
      if (!absl::SimpleAtoi(l, &label)) {
        return absl::InvalidArgumentError("truth lifecycle: bad label");
      }
      e.labels.push_back(label);
    }
    truth.lifecycle.push_back(std::move(e));
  }
  if (steps > 0) {
    for (const auto& [label, members] : truth.membership.front()) {
      bool everywhere = true;
      for (const auto& step : truth.membership) {
        everywhere = everywhere && step.contains(label);
      }
      if (everywhere) truth.persistent.insert(label);
    }
  }
  return truth;
}

}  // namespace dyncom
