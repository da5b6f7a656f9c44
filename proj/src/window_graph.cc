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

#include "dyncom/window_graph.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#include "absl/status/status.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"

namespace dyncom {
namespace {

using EdgeKey = std::pair<EntityRef, EntityRef>;

EdgeKey Ordered(EntityRef a, EntityRef b) {
  if (b < a) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

double Pmi(int64_t n_ab, int64_t n_a, int64_t n_b, int64_t total) {
  const double t = static_cast<double>(total);
  // Probabilities are formed first so the result matches the textbook
  // expression term by term.
  return PmiWeight(n_ab / t, n_a / t, n_b / t).value();
}

}  // namespace

absl::Status ValidateWindowSpec(const WindowSpec& spec) {
  if (spec.length <= absl::ZeroDuration()) {
    return absl::InvalidArgumentError("window length must be positive");
  }
  if (spec.stride <= absl::ZeroDuration() || spec.stride > spec.length) {
    return absl::InvalidArgumentError(
        "window stride must satisfy 0 < stride <= length");
  }
  if (!(spec.start < spec.end)) {
    return absl::InvalidArgumentError("window start must precede end");
  }
  return absl::OkStatus();
}

absl::StatusOr<std::vector<Window>> MakeWindows(const WindowSpec& spec) {
  if (absl::Status s = ValidateWindowSpec(spec); !s.ok()) return s;
  const UnixSeconds start = DayStart(spec.start);
  const UnixSeconds end = DayStart(spec.end);
  const int64_t length = absl::ToInt64Seconds(spec.length);
  const int64_t stride = absl::ToInt64Seconds(spec.stride);
  std::vector<Window> out;
  for (int i = 0;; ++i) {
    const UnixSeconds ws = start + i * stride;
    if (ws + length > end) break;
    out.push_back({i, ws, ws + length});
  }
  return out;
}

absl::StatusOr<absl::CivilDay> ParseDay(absl::string_view text) {
  absl::CivilDay day;
  if (!absl::ParseCivilTime(text, &day)) {
    return absl::InvalidArgumentError(
        absl::StrCat("expected YYYY-MM-DD, got '", text, "'"));
  }
  return day;
}

std::string FormatDay(absl::CivilDay day) { return absl::FormatCivilTime(day); }

UnixSeconds DayStart(absl::CivilDay day) {
  return absl::ToUnixSeconds(absl::FromCivil(day, absl::UTCTimeZone()));
}

absl::StatusOr<absl::Duration> ParseDurationSpec(absl::string_view text) {
  if (text.size() < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad duration '", text, "'"));
  }
  int64_t n;
  if (!absl::SimpleAtoi(text.substr(0, text.size() - 1), &n) || n <= 0) {
    return absl::InvalidArgumentError(
        absl::StrCat("bad duration '", text, "'"));
  }
  switch (text.back()) {
    case 'h':
      return absl::Hours(n);
    case 'd':
      return absl::Hours(24 * n);
    case 'w':
      return absl::Hours(24 * 7 * n);
    default:
      return absl::InvalidArgumentError(absl::StrCat(
          "bad duration '", text, "' (use a d, w or h suffix)"));
  }
}

std::string FormatDurationSpec(absl::Duration d) {
  const int64_t hours = absl::ToInt64Hours(d);
  if (hours % (24 * 7) == 0) return absl::StrCat(hours / (24 * 7), "w");
  if (hours % 24 == 0) return absl::StrCat(hours / 24, "d");
  return absl::StrCat(hours, "h");
}

absl::StatusOr<double> PmiWeight(double p_ab, double p_a, double p_b) {
  if (!(p_a > 0.0) || !(p_b > 0.0)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("PMI requires positive marginals (p_a=%g, p_b=%g)",
                        p_a, p_b));
  }
  if (p_ab < 0.0) {
    return absl::InvalidArgumentError("PMI joint probability is negative");
  }
  return std::log1p(p_ab / (p_a * p_b));
}

InteractionCounts CountInteractions(std::span<const EventRecord> events,
                                    const Resolver& resolver) {
  InteractionCounts c;
  for (const EventRecord& ev : events) {
    std::vector<EntityRef> refs = ClassifyEventUrls(ev, resolver);

    std::set<std::string> targets(ev.mentioned.begin(), ev.mentioned.end());
    if (ev.reshare_of) targets.insert(*ev.reshare_of);
    for (const EntityRef& r : refs) {
      if (r.kind == EntityKind::kAccount) targets.insert(r.id);
    }
    targets.erase(ev.author);
    for (const std::string& t : targets) {
      auto key = ev.author < t ? std::make_pair(ev.author, t)
                               : std::make_pair(t, ev.author);
      ++c.pair_mr[key];
      ++c.account_mr[ev.author];
      ++c.account_mr[t];
      ++c.total_mr;
    }

    std::erase_if(refs, [](const EntityRef& r) { return !r.external(); });
    if (refs.empty()) continue;
    ++c.total_url_posts;
    ++c.account_url_posts[ev.author];
    c.accounts_with_urls.insert(ev.author);
    for (const EntityRef& r : refs) {
      ++c.account_url[{ev.author, r}];
      ++c.entity_url_posts[r];
      c.entity_accounts[r].insert(ev.author);
    }
  }
  return c;
}

absl::string_view EdgeTagName(EdgeTag tag) {
  switch (tag) {
    case EdgeTag::kMentionReshare:
      return "mention_reshare";
    case EdgeTag::kAccountExternal:
      return "account_external";
    case EdgeTag::kInferredExternal:
      return "inferred_external";
  }
  return "unknown";
}

absl::StatusOr<EdgeTag> ParseEdgeTag(absl::string_view name) {
  if (name == "mention_reshare") return EdgeTag::kMentionReshare;
  if (name == "account_external") return EdgeTag::kAccountExternal;
  if (name == "inferred_external") return EdgeTag::kInferredExternal;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown edge tag '", name, "'"));
}

int StepNetwork::NodeIndex(const EntityRef& e) const {
  auto it = std::lower_bound(nodes.begin(), nodes.end(), e);
  if (it == nodes.end() || !(*it == e)) return -1;
  return static_cast<int>(it - nodes.begin());
}

size_t StepNetwork::CountEdges(EdgeTag tag) const {
  return std::count_if(edges.begin(), edges.end(),
                       [tag](const StepEdge& e) { return e.tag == tag; });
}

absl::StatusOr<StepNetwork> MakeStepNetwork(
    int index, Window window,
    const std::vector<std::tuple<EntityRef, EntityRef, EdgeTag, double>>&
        edges) {
  StepNetwork net;
  net.index = index;
  net.window = window;
  std::set<EntityRef> nodes;
  for (const auto& [a, b, tag, w] : edges) {
    if (a == b) {
      return absl::InvalidArgumentError(
          absl::StrCat("self-loop on ", ToString(a)));
    }
    if (!(w > 0.0) || !std::isfinite(w)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "edge ", ToString(a), " - ", ToString(b), " has weight ", w));
    }
    const int externals = a.external() + b.external();
    const int expected = tag == EdgeTag::kMentionReshare    ? 0
                         : tag == EdgeTag::kAccountExternal ? 1
                                                            : 2;
    if (externals != expected) {
      return absl::InvalidArgumentError(
          absl::StrCat(EdgeTagName(tag), " edge ", ToString(a), " - ",
                       ToString(b), " joins the wrong node kinds"));
    }
    nodes.insert(a);
    nodes.insert(b);
  }
  net.nodes.assign(nodes.begin(), nodes.end());
  for (const auto& [a, b, tag, w] : edges) {
    int u = net.NodeIndex(a);
    int v = net.NodeIndex(b);
    if (u > v) std::swap(u, v);
    net.edges.push_back({u, v, tag, w});
  }
  std::sort(net.edges.begin(), net.edges.end(),
            [](const StepEdge& x, const StepEdge& y) {
              return std::tie(x.source, x.target, x.tag) <
                     std::tie(y.source, y.target, y.tag);
            });
  for (size_t i = 1; i < net.edges.size(); ++i) {
    const StepEdge& p = net.edges[i - 1];
    const StepEdge& q = net.edges[i];
    if (p.source == q.source && p.target == q.target && p.tag == q.tag) {
      return absl::InvalidArgumentError(absl::StrCat(
          "duplicate edge ", ToString(net.nodes[q.source]), " - ",
          ToString(net.nodes[q.target])));
    }
  }
  return net;
}

StepNetwork BuildStepNetwork(const EventLog& log, const Window& window,
                             const Resolver& resolver,
                             const EdgeFilterParams& filter) {
  std::vector<EventRecord> in_window;
  for (const EventRecord& ev : log) {
    if (window.Contains(ev.timestamp)) in_window.push_back(ev);
  }
  const InteractionCounts c = CountInteractions(in_window, resolver);

  std::vector<std::tuple<EntityRef, EntityRef, EdgeTag, double>> edges;
  for (const auto& [pair, n_ab] : c.pair_mr) {
    edges.emplace_back(EntityRef::Account(pair.first),
                       EntityRef::Account(pair.second),
                       EdgeTag::kMentionReshare,
                       Pmi(n_ab, c.account_mr.at(pair.first),
                           c.account_mr.at(pair.second), c.total_mr));
  }

  auto survives = [&](const EntityRef& e) {
    if (e.kind == EntityKind::kSocialProfile) return true;
    return c.entity_accounts.at(e).size() > 1;
  };

  for (const auto& [key, n_ab] : c.account_url) {
    const auto& [account, entity] = key;
    if (!survives(entity)) continue;
    edges.emplace_back(EntityRef::Account(account), entity,
                       EdgeTag::kAccountExternal,
                       Pmi(n_ab, c.account_url_posts.at(account),
                           c.entity_url_posts.at(entity), c.total_url_posts));
  }

  // Accounts shared by each pair of surviving external nodes.
  std::map<EdgeKey, int64_t> shared;
  std::map<std::string, std::vector<EntityRef>> by_account;
  for (const auto& [entity, accounts] : c.entity_accounts) {
    if (!survives(entity)) continue;
    for (const std::string& a : accounts) by_account[a].push_back(entity);
  }
  for (const auto& [account, entities] : by_account) {
    for (size_t i = 0; i < entities.size(); ++i) {
      for (size_t j = i + 1; j < entities.size(); ++j) {
        ++shared[Ordered(entities[i], entities[j])];
      }
    }
  }
  const int64_t n_accounts = static_cast<int64_t>(c.accounts_with_urls.size());
  std::vector<std::tuple<EntityRef, EntityRef, EdgeTag, double>> inferred;
  for (const auto& [pair, n_ab] : shared) {
    inferred.emplace_back(
        pair.first, pair.second, EdgeTag::kInferredExternal,
        Pmi(n_ab, c.entity_accounts.at(pair.first).size(),
            c.entity_accounts.at(pair.second).size(), n_accounts));
  }

  InferredFilterStats stats;
  stats.candidates = static_cast<int64_t>(inferred.size());
  if (!inferred.empty()) {
    double sum = 0.0;
    for (const auto& e : inferred) sum += std::get<3>(e);
    stats.mean = sum / inferred.size();
    double ss = 0.0;
    for (const auto& e : inferred) {
      const double d = std::get<3>(e) - stats.mean;
      ss += d * d;
    }
    stats.stddev = std::sqrt(ss / inferred.size());
    stats.threshold = stats.mean + filter.k * stats.stddev;
    // Weights equal to the threshold up to rounding are retained.
    const double slack = 1e-12 * std::max(1.0, std::abs(stats.threshold));
    for (auto& e : inferred) {
      if (std::get<3>(e) < stats.threshold - slack) {
        ++stats.removed;
      } else {
        edges.push_back(std::move(e));
      }
    }
  }

  StepNetwork net = MakeStepNetwork(window.index, window, edges).value();
  net.filter = stats;
  return net;
}

std::vector<absl::Duration> DefaultActivityScales() {
  std::vector<absl::Duration> scales;
  for (int d : {1, 2, 3, 4, 5, 6}) scales.push_back(absl::Hours(24 * d));
  for (int w = 1; w <= 8; ++w) scales.push_back(absl::Hours(24 * 7 * w));
  return scales;
}

absl::StatusOr<std::vector<ActivityPoint>> ActivityCurve(
    const EventLog& log, UnixSeconds start, UnixSeconds end,
    std::span<const absl::Duration> scales) {
  std::set<std::string> universe;
  for (const EventRecord& ev : log) universe.insert(ev.author);
  if (universe.empty()) {
    return absl::InvalidArgumentError(
        "activity curve needs at least one account in the log");
  }
  std::vector<ActivityPoint> out;
  for (absl::Duration scale : scales) {
    const int64_t step = absl::ToInt64Seconds(scale);
    if (step <= 0 || step > end - start) {
      return absl::InvalidArgumentError(absl::StrCat(
          "activity scale ", FormatDurationSpec(scale),
          " must be positive and fit inside the period"));
    }
    const int64_t intervals = (end - start) / step;
    std::vector<std::set<std::string>> active(intervals);
    for (const EventRecord& ev : log) {
      if (ev.timestamp < start) continue;
      const int64_t i = (ev.timestamp - start) / step;
      if (i < intervals) active[i].insert(ev.author);
    }
    double sum = 0.0;
    for (const auto& a : active) {
      sum += static_cast<double>(a.size()) / universe.size();
    }
    out.push_back({scale, sum / intervals});
  }
  return out;
}

}  // namespace dyncom
