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

#include "dyncom/pipeline.h"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <cmath>
#include <map>
#include <memory>
#include <sstream>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "dyncom/artifact_io.h"
#include "dyncom/characterize.h"
#include "dyncom/graph_io.h"
#include "dyncom/status_macros.h"

namespace dyncom {
namespace fs = std::filesystem;

namespace {

constexpr int kRankTopK = 10;

absl::Status RangeError(absl::string_view key, absl::string_view value,
                        absl::string_view range) {
  return absl::InvalidArgumentError(absl::StrCat(
      "config key '", key, "' = ", value, " is outside the valid range ",
      range));
}

absl::Status ParseError(absl::string_view key, absl::string_view value) {
  return absl::InvalidArgumentError(
      absl::StrCat("config key '", key, "': cannot parse '", value, "'"));
}

std::string ScalesText(const std::vector<absl::Duration>& scales) {
  std::vector<std::string> parts;
  for (absl::Duration d : scales) parts.push_back(FormatDurationSpec(d));
  return absl::StrJoin(parts, ",");
}

// Exclusive lock on an output directory, released on destruction.
class DirLock {
 public:
  static absl::StatusOr<std::unique_ptr<DirLock>> Acquire(const fs::path& dir) {
    fs::path path = dir / ".dyncom.lock";
    int fd = ::open(path.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd < 0) {
      return absl::FailedPreconditionError(absl::StrCat(
          "output directory ", dir.string(),
          " is locked by another run (remove ", path.string(),
          " if no run is active)"));
    }
    ::close(fd);
    return std::unique_ptr<DirLock>(new DirLock(std::move(path)));
  }
  ~DirLock() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirLock(const DirLock&) = delete;
  DirLock& operator=(const DirLock&) = delete;

 private:
  explicit DirLock(fs::path p) : path_(std::move(p)) {}
  fs::path path_;
};

struct Context {
  const PipelineConfig& cfg;
  std::string digest;
  fs::path out;
  std::ostream& log;
};

absl::StatusOr<TsvTable> ReadStageTable(const Context& ctx,
                                        const fs::path& rel,
                                        const std::vector<std::string>& cols,
                                        Stage producer) {
  const fs::path path = ctx.out / rel;
  if (!fs::exists(path)) {
    return absl::FailedPreconditionError(
        absl::StrCat("missing ", path.string(), "; run \"",
                     StageName(producer), "\" first"));
  }
  ASSIGN_OR_RETURN(TsvTable table, ReadTsvFile(path, cols));
  if (table.config_digest != ctx.digest) {
    return absl::FailedPreconditionError(absl::StrCat(
        path.string(), " was produced under config digest ",
        table.config_digest.empty() ? "<none>" : table.config_digest,
        " but the current config digest is ", ctx.digest, "; re-run \"",
        StageName(producer), "\""));
  }
  return table;
}

absl::StatusOr<Resolver> LoadResolver(const PipelineConfig& cfg) {
  if (cfg.resolver.empty()) return Resolver();
  return ReadResolverFile(cfg.resolver);
}

absl::StatusOr<std::vector<Window>> LoadWindows(const Context& ctx) {
  ASSIGN_OR_RETURN(TsvTable t, ReadStageTable(ctx, "windows/windows.tsv",
                                              WindowsColumns(), Stage::kWindows));
  return WindowsFromTable(t);
}

absl::StatusOr<std::vector<StepNetwork>> LoadNetworks(
    const Context& ctx, const std::vector<Window>& windows) {
  ASSIGN_OR_RETURN(TsvTable t,
                   ReadStageTable(ctx, "windows/networks.tsv",
                                  NetworksColumns(), Stage::kWindows));
  return NetworksFromTable(t, windows);
}

absl::StatusOr<TimelineSet> LoadTimelines(const Context& ctx) {
  const fs::path path = ctx.out / "track/timelines.jsonl";
  if (!fs::exists(path)) {
    return absl::FailedPreconditionError(
        absl::StrCat("missing ", path.string(), "; run \"track\" first"));
  }
  ASSIGN_OR_RETURN(std::string text, ReadFileToString(path));
  ASSIGN_OR_RETURN(LoadedTimelines loaded, TimelineSetFromJsonl(text));
  if (loaded.config_digest != ctx.digest) {
    return absl::FailedPreconditionError(absl::StrCat(
        path.string(), " was produced under config digest ",
        loaded.config_digest, " but the current config digest is ",
        ctx.digest, "; re-run \"track\""));
  }
  return loaded.state;
}

std::vector<int> PersistentIds(const TimelineSet& state, const EventLog& log,
                               std::span<const Window> windows) {
  std::vector<int> ids;
  for (const Timeline& tl : ExtractPersistent(state, log, windows)) {
    ids.push_back(tl.id);
  }
  return ids;
}

absl::Status RunIngest(const Context& ctx, RunSummary&) {
  ASSIGN_OR_RETURN(EventLog log, ReadEventsFile(ctx.cfg.events));
  ASSIGN_OR_RETURN(Resolver resolver, LoadResolver(ctx.cfg));
  const StatsReport stats = DatasetStats(log, resolver);
  std::string entities = DigestLine(ctx.digest);
  entities += "event_id\tkind\tid\tresolved\n";
  for (const EventRecord& ev : log) {
    for (const EntityRef& e : ClassifyEventUrls(ev, resolver)) {
      absl::StrAppend(&entities, ev.event_id, "\t", KindName(e.kind), "\t",
                      e.id, "\t", e.resolved ? "1" : "0", "\n");
    }
  }
  FileBatch batch(ctx.out / "ingest");
  batch.Add("stats.tsv", DigestLine(ctx.digest) +
                             FormatStatsTable({{"events", stats}}));
  batch.Add("entities.tsv", std::move(entities));
  RETURN_IF_ERROR(batch.Commit().status());
  ctx.log << "ingest: " << stats.tweets << " events, " << stats.mentions
          << " mentions, " << stats.retweets << " reshares, " << stats.all_urls
          << " URLs\n";
  return absl::OkStatus();
}

absl::Status RunWindows(const Context& ctx, RunSummary& summary) {
  RETURN_IF_ERROR(ReadStageTable(ctx, "ingest/stats.tsv", {"Data set"},
                                 Stage::kIngest)
                      .status());
  ASSIGN_OR_RETURN(EventLog log, ReadEventsFile(ctx.cfg.events));
  ASSIGN_OR_RETURN(Resolver resolver, LoadResolver(ctx.cfg));
  ASSIGN_OR_RETURN(std::vector<Window> windows, MakeWindows(ctx.cfg.window));
  std::vector<StepNetwork> nets;
  std::string filter = DigestLine(ctx.digest);
  filter +=
      "step\tnodes\tmention_reshare\taccount_external\tinferred_external\t"
      "inferred_candidates\tinferred_removed\tinferred_mean\tinferred_"
      "stddev\tinferred_threshold\n";
  for (const Window& w : windows) {
    StepNetwork net = BuildStepNetwork(log, w, resolver, ctx.cfg.edge_filter);
    absl::StrAppend(
        &filter, net.index, "\t", net.nodes.size(), "\t",
        net.CountEdges(EdgeTag::kMentionReshare), "\t",
        net.CountEdges(EdgeTag::kAccountExternal), "\t",
        net.CountEdges(EdgeTag::kInferredExternal), "\t",
        net.filter.candidates, "\t", net.filter.removed, "\t",
        FormatDouble(net.filter.mean), "\t", FormatDouble(net.filter.stddev),
        "\t", FormatDouble(net.filter.threshold), "\n");
    nets.push_back(std::move(net));
  }
  FileBatch batch(ctx.out / "windows");
  batch.Add("windows.tsv", WindowsTsv(windows, ctx.digest));
  batch.Add("networks.tsv", NetworksTsv(nets, ctx.digest));
  batch.Add("filter.tsv", std::move(filter));
  RETURN_IF_ERROR(batch.Commit().status());
  summary.steps = static_cast<int>(windows.size());
  ctx.log << "windows: built " << windows.size() << " step networks\n";
  return absl::OkStatus();
}

absl::Status RunDetect(const Context& ctx, RunSummary& summary) {
  ASSIGN_OR_RETURN(std::vector<Window> windows, LoadWindows(ctx));
  ASSIGN_OR_RETURN(std::vector<StepNetwork> nets, LoadNetworks(ctx, windows));
  ConsensusParams params = ctx.cfg.consensus;
  params.threads = ThreadsFromEnvironment();
  std::vector<StepCommunity> all;
  std::string report = DigestLine(ctx.digest);
  report += "step\tcommunities\tconverged\titerations\n";
  summary.communities_per_step.clear();
  for (const StepNetwork& net : nets) {
    StepDetection d = ConsensusCommunities(net, params);
    absl::StrAppend(&report, net.index, "\t", d.communities.size(), "\t",
                    d.converged ? "1" : "0", "\t", d.iterations, "\n");
    if (!d.converged) {
      ctx.log << "detect: step " << net.index
              << " did not converge; using the majority partition\n";
    }
    summary.communities_per_step.push_back(
        static_cast<int>(d.communities.size()));
    all.insert(all.end(), d.communities.begin(), d.communities.end());
  }
  FileBatch batch(ctx.out / "detect");
  batch.Add("communities.tsv", CommunitiesTsv(all, ctx.digest));
  batch.Add("summary.tsv", std::move(report));
  RETURN_IF_ERROR(batch.Commit().status());
  ctx.log << "detect: " << all.size() << " step communities\n";
  return absl::OkStatus();
}

absl::Status RunTrack(const Context& ctx, RunSummary& summary) {
  ASSIGN_OR_RETURN(TsvTable table,
                   ReadStageTable(ctx, "detect/communities.tsv",
                                  CommunitiesColumns(), Stage::kDetect));
  ASSIGN_OR_RETURN(std::vector<Window> windows, LoadWindows(ctx));
  ASSIGN_OR_RETURN(std::vector<StepCommunity> communities,
                   CommunitiesFromTable(table));
  ASSIGN_OR_RETURN(TimelineSet state,
                   TrackAll(communities, static_cast<int>(windows.size()),
                            ctx.cfg.tracking));
  ASSIGN_OR_RETURN(EventLog log, ReadEventsFile(ctx.cfg.events));
  const std::vector<int> persistent = PersistentIds(state, log, windows);
  std::string ptable = DigestLine(ctx.digest) + "timeline_id\n";
  for (int id : persistent) absl::StrAppend(&ptable, id, "\n");
  FileBatch batch(ctx.out / "track");
  batch.Add("timelines.jsonl", TimelineSetJsonl(state, ctx.digest));
  batch.Add("persistent.tsv", std::move(ptable));
  RETURN_IF_ERROR(batch.Commit().status());
  summary.timelines = static_cast<int>(state.timelines.size());
  summary.persistent = static_cast<int>(persistent.size());
  ctx.log << "track: " << state.timelines.size() << " timelines, "
          << persistent.size() << " persistent\n";
  return absl::OkStatus();
}

absl::Status RunCharacterize(const Context& ctx, RunSummary& summary) {
  ASSIGN_OR_RETURN(std::vector<Window> windows, LoadWindows(ctx));
  ASSIGN_OR_RETURN(std::vector<StepNetwork> nets, LoadNetworks(ctx, windows));
  ASSIGN_OR_RETURN(TimelineSet state, LoadTimelines(ctx));
  ASSIGN_OR_RETURN(EventLog log, ReadEventsFile(ctx.cfg.events));
  const std::vector<int> persistent = PersistentIds(state, log, windows);
  const int total_steps = static_cast<int>(windows.size());

  Bundle bundle;
  bundle.state = &state;
  bundle.networks = nets;
  bundle.persistent_ids = persistent;
  for (int id : persistent) {
    for (RankMode mode : {RankMode::kFrequency, RankMode::kNormalizedDegree}) {
      ASSIGN_OR_RETURN(
          std::vector<RankingEntry> entries,
          RankMembers(state, id, nets, mode, {EntityKind::kWebsite},
                      total_steps, kRankTopK));
      bundle.rankings.push_back({id, mode, std::move(entries)});
    }
    bundle.activity.push_back(
        {id, ActivityZScore(log, TimelineAccounts(state.timelines[id]),
                            ctx.cfg.window.start, ctx.cfg.window.end)});
  }
  ASSIGN_OR_RETURN(bundle.activity_curve,
                   ActivityCurve(log, DayStart(ctx.cfg.window.start),
                                 DayStart(ctx.cfg.window.end),
                                 ctx.cfg.activity_scales));
  bundle.config_text = CanonicalConfigText(ctx.cfg);
  bundle.config_digest = ctx.digest;
  bundle.seed = ctx.cfg.consensus.seed;
  ASSIGN_OR_RETURN(summary.manifest, ExportBundle(bundle, ctx.out / "bundle"));

  summary.steps = total_steps;
  summary.timelines = static_cast<int>(state.timelines.size());
  summary.persistent = static_cast<int>(persistent.size());
  summary.communities_per_step.assign(total_steps, 0);
  for (const Timeline& tl : state.timelines) {
    for (const StepCommunity& c : tl.observations) {
      ++summary.communities_per_step[c.step];
    }
  }
  ctx.log << "characterize: wrote " << summary.manifest.size()
          << " artifacts to " << (ctx.out / "bundle").string() << "\n";
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<PipelineConfig> ParsePipelineConfig(absl::string_view text) {
  ASSIGN_OR_RETURN(auto kv, ParseKeyValues(text));
  PipelineConfig cfg;
  ASSIGN_OR_RETURN(cfg.window.start, ParseDay("2012-06-01"));
  ASSIGN_OR_RETURN(cfg.window.end, ParseDay("2012-11-16"));
  for (const auto& [key, value] : kv) {
    auto real = [&](double* dst) -> absl::Status {
      if (!absl::SimpleAtod(value, dst) || !std::isfinite(*dst)) {
        return ParseError(key, value);
      }
      return absl::OkStatus();
    };
    auto integer = [&](auto* dst) -> absl::Status {
      if (!absl::SimpleAtoi(value, dst)) return ParseError(key, value);
      return absl::OkStatus();
    };
    auto duration = [&](absl::Duration* dst) -> absl::Status {
      auto d = ParseDurationSpec(value);
      if (!d.ok()) return ParseError(key, value);
      *dst = *d;
      return absl::OkStatus();
    };
    auto day = [&](absl::CivilDay* dst) -> absl::Status {
      auto d = ParseDay(value);
      if (!d.ok()) return ParseError(key, value);
      *dst = *d;
      return absl::OkStatus();
    };
    if (key == "events") {
      cfg.events = value;
    } else if (key == "resolver") {
      cfg.resolver = value;
    } else if (key == "out") {
      cfg.out = value;
    } else if (key == "start") {
      RETURN_IF_ERROR(day(&cfg.window.start));
    } else if (key == "end") {
      RETURN_IF_ERROR(day(&cfg.window.end));
    } else if (key == "window_length") {
      RETURN_IF_ERROR(duration(&cfg.window.length));
    } else if (key == "window_stride") {
      RETURN_IF_ERROR(duration(&cfg.window.stride));
    } else if (key == "edge_k") {
      RETURN_IF_ERROR(real(&cfg.edge_filter.k));
    } else if (key == "runs") {
      RETURN_IF_ERROR(integer(&cfg.consensus.runs));
    } else if (key == "tau") {
      RETURN_IF_ERROR(real(&cfg.consensus.tau));
    } else if (key == "max_iterations") {
      RETURN_IF_ERROR(integer(&cfg.consensus.max_iterations));
    } else if (key == "seed") {
      RETURN_IF_ERROR(integer(&cfg.consensus.seed));
    } else if (key == "alpha") {
      RETURN_IF_ERROR(real(&cfg.tracking.alpha));
    } else if (key == "match_threshold") {
      RETURN_IF_ERROR(real(&cfg.tracking.match_threshold));
    } else if (key == "activity_scales") {
      cfg.activity_scales.clear();
      for (absl::string_view s : absl::StrSplit(value, ',', absl::SkipEmpty())) {
        auto d = ParseDurationSpec(absl::StripAsciiWhitespace(s));
        if (!d.ok()) return ParseError(key, value);
        cfg.activity_scales.push_back(*d);
      }
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  RETURN_IF_ERROR(ValidatePipelineConfig(cfg));
  return cfg;
}

absl::Status ValidatePipelineConfig(const PipelineConfig& cfg) {
  if (cfg.events.empty()) {
    return absl::InvalidArgumentError("config key 'events' is required");
  }
  const WindowSpec& w = cfg.window;
  if (!(w.start < w.end)) {
    return RangeError("end", FormatDay(w.end),
                      absl::StrCat("(", FormatDay(w.start), ", ...)"));
  }
  if (w.length <= absl::ZeroDuration()) {
    return RangeError("window_length", FormatDurationSpec(w.length), "(0, ...)");
  }
  if (w.stride <= absl::ZeroDuration() || w.stride > w.length) {
    return RangeError("window_stride", FormatDurationSpec(w.stride),
                      absl::StrCat("(0, ", FormatDurationSpec(w.length), "]"));
  }
  if (!(cfg.edge_filter.k >= 0.0)) {
    return RangeError("edge_k", FormatDouble(cfg.edge_filter.k), "[0, inf)");
  }
  if (cfg.consensus.runs < 1) {
    return RangeError("runs", absl::StrCat(cfg.consensus.runs), "[1, inf)");
  }
  if (!(cfg.consensus.tau >= 0.0 && cfg.consensus.tau <= 1.0)) {
    return RangeError("tau", absl::StrFormat("%g", cfg.consensus.tau),
                      "[0,1]");
  }
  if (cfg.consensus.max_iterations < 1) {
    return RangeError("max_iterations",
                      absl::StrCat(cfg.consensus.max_iterations), "[1, inf)");
  }
  if (!(cfg.tracking.alpha > 0.0 && cfg.tracking.alpha <= 1.0)) {
    return RangeError("alpha", absl::StrFormat("%g", cfg.tracking.alpha),
                      "(0,1]");
  }
  if (!(cfg.tracking.match_threshold >= 0.0 &&
        cfg.tracking.match_threshold <= 1.0)) {
    return RangeError("match_threshold",
                      absl::StrFormat("%g", cfg.tracking.match_threshold),
                      "[0,1]");
  }
  if (cfg.activity_scales.empty()) {
    return absl::InvalidArgumentError(
        "config key 'activity_scales' needs at least one duration");
  }
  const absl::Duration period =
      absl::Seconds(DayStart(w.end) - DayStart(w.start));
  for (absl::Duration d : cfg.activity_scales) {
    if (d > period) {
      return RangeError("activity_scales", FormatDurationSpec(d),
                        "(0, period length]");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<PipelineConfig> ReadPipelineConfig(const std::string& path) {
  auto text = ReadFileToString(path);
  if (!text.ok()) {
    return absl::NotFoundError(absl::StrCat("cannot read config ", path));
  }
  ASSIGN_OR_RETURN(PipelineConfig cfg, ParsePipelineConfig(*text));
  // Relative input paths are taken relative to the config file.
  const fs::path base = fs::path(path).parent_path();
  for (std::string* p : {&cfg.events, &cfg.resolver, &cfg.out}) {
    if (!p->empty() && fs::path(*p).is_relative()) {
      *p = (base / *p).lexically_normal().string();
    }
  }
  return cfg;
}

std::string CanonicalConfigText(const PipelineConfig& cfg) {
  std::map<std::string, std::string> kv = {
      {"events", cfg.events},
      {"resolver", cfg.resolver},
      {"start", FormatDay(cfg.window.start)},
      {"end", FormatDay(cfg.window.end)},
      {"window_length", FormatDurationSpec(cfg.window.length)},
      {"window_stride", FormatDurationSpec(cfg.window.stride)},
      {"edge_k", FormatDouble(cfg.edge_filter.k)},
      {"runs", absl::StrCat(cfg.consensus.runs)},
      {"tau", FormatDouble(cfg.consensus.tau)},
      {"max_iterations", absl::StrCat(cfg.consensus.max_iterations)},
      {"seed", absl::StrCat(cfg.consensus.seed)},
      {"alpha", FormatDouble(cfg.tracking.alpha)},
      {"match_threshold", FormatDouble(cfg.tracking.match_threshold)},
      {"activity_scales", ScalesText(cfg.activity_scales)},
  };
  std::string out;
  for (const auto& [k, v] : kv) absl::StrAppend(&out, k, "=", v, "\n");
  return out;
}

absl::StatusOr<std::string> ConfigDigest(const PipelineConfig& cfg) {
  // Input locations do not matter, their contents do.
  PipelineConfig located = cfg;
  located.events.clear();
  located.resolver.clear();
  std::string text = CanonicalConfigText(located);
  auto events = ReadFileToString(cfg.events);
  if (!events.ok()) {
    return absl::NotFoundError(
        absl::StrCat("events file not found: ", cfg.events));
  }
  absl::StrAppend(&text, "events_sha256=", Sha256Hex(*events), "\n");
  if (!cfg.resolver.empty()) {
    auto resolver = ReadFileToString(cfg.resolver);
    if (!resolver.ok()) {
      return absl::NotFoundError(
          absl::StrCat("resolver file not found: ", cfg.resolver));
    }
    absl::StrAppend(&text, "resolver_sha256=", Sha256Hex(*resolver), "\n");
  }
  return Sha256Hex(text);
}

absl::string_view StageName(Stage s) {
  switch (s) {
    case Stage::kIngest:
      return "ingest";
    case Stage::kWindows:
      return "windows";
    case Stage::kDetect:
      return "detect";
    case Stage::kTrack:
      return "track";
    case Stage::kCharacterize:
      return "characterize";
  }
  return "unknown";
}

std::vector<Stage> AllStages() {
  return {Stage::kIngest, Stage::kWindows, Stage::kDetect, Stage::kTrack,
          Stage::kCharacterize};
}

absl::StatusOr<Stage> ParseStage(absl::string_view name) {
  for (Stage s : AllStages()) {
    if (StageName(s) == name) return s;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown stage '", name,
      "' (expected ingest, windows, detect, track or characterize)"));
}

absl::StatusOr<std::vector<Stage>> ParseStageList(absl::string_view text) {
  std::vector<Stage> out;
  for (absl::string_view s : absl::StrSplit(text, ',', absl::SkipEmpty())) {
    ASSIGN_OR_RETURN(Stage stage, ParseStage(absl::StripAsciiWhitespace(s)));
    out.push_back(stage);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

absl::StatusOr<RunSummary> RunPipeline(const PipelineConfig& cfg,
                                       const std::vector<Stage>& stages,
                                       std::ostream& log) {
  RETURN_IF_ERROR(ValidatePipelineConfig(cfg));
  if (cfg.out.empty()) {
    return absl::InvalidArgumentError(
        "no output directory (set 'out' or pass --out)");
  }
  if (!fs::exists(cfg.events)) {
    return absl::NotFoundError(
        absl::StrCat("events file not found: ", cfg.events));
  }
  if (!cfg.resolver.empty() && !fs::exists(cfg.resolver)) {
    return absl::NotFoundError(
        absl::StrCat("resolver file not found: ", cfg.resolver));
  }
  ASSIGN_OR_RETURN(std::string digest, ConfigDigest(cfg));
  const fs::path out(cfg.out);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create output directory ", cfg.out));
  }
  ASSIGN_OR_RETURN(std::unique_ptr<DirLock> lock, DirLock::Acquire(out));

  Context ctx{cfg, digest, out, log};
  RunSummary summary;
  for (Stage s : stages) {
    absl::Status status;
    switch (s) {
      case Stage::kIngest:
        status = RunIngest(ctx, summary);
        break;
      case Stage::kWindows:
        status = RunWindows(ctx, summary);
        break;
      case Stage::kDetect:
        status = RunDetect(ctx, summary);
        break;
      case Stage::kTrack:
        status = RunTrack(ctx, summary);
        break;
      case Stage::kCharacterize:
        status = RunCharacterize(ctx, summary);
        break;
    }
    if (!status.ok()) {
      return absl::Status(status.code(), absl::StrCat(StageName(s), ": ",
                                                      status.message()));
    }
  }
  return summary;
}

void PrintSummary(const RunSummary& s, std::ostream& out) {
  out << "steps built: " << s.steps << "\n";
  if (!s.communities_per_step.empty()) {
    out << "communities per step: "
        << absl::StrJoin(s.communities_per_step, " ") << "\n";
  }
  out << "timelines: " << s.timelines << "\n";
  out << "persistent: " << s.persistent << "\n";
  for (const ManifestEntry& e : s.manifest) {
    out << "  " << e.sha256 << "  " << e.path << "\n";
  }
}

absl::Status WriteScenario(const ScenarioConfig& cfg, const Scenario& scenario,
                           const fs::path& dir) {
  std::ostringstream events;
  WriteEvents(scenario.log, events);
  const absl::CivilDay end = cfg.start + 7 * (cfg.steps + 1);
  const std::string pipeline = absl::StrCat(
      "events=events.jsonl\n", "start=", FormatDay(cfg.start), "\n",
      "end=", FormatDay(end), "\n", "seed=", cfg.seed, "\n", "out=run\n");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot create ", dir.string()));
  }
  FileBatch batch(dir);
  batch.Add("events.jsonl", events.str());
  batch.Add("scenario.cfg", FormatScenarioConfig(cfg));
  batch.Add("truth_communities.tsv", TruthCommunitiesTsv(scenario.truth));
  batch.Add("truth_lifecycle.tsv", TruthLifecycleTsv(scenario.truth));
  batch.Add("pipeline.cfg", pipeline);
  return batch.Commit().status();
}

absl::StatusOr<TrackingScores> EvaluateRun(const PipelineConfig& cfg,
                                           const fs::path& truth_dir) {
  ASSIGN_OR_RETURN(std::string digest, ConfigDigest(cfg));
  std::ostringstream discard;
  Context ctx{cfg, digest, fs::path(cfg.out), discard};
  ASSIGN_OR_RETURN(TimelineSet state, LoadTimelines(ctx));
  ASSIGN_OR_RETURN(TsvTable ptable,
                   ReadStageTable(ctx, "track/persistent.tsv", {"timeline_id"},
                                  Stage::kTrack));
  std::vector<int> persistent;
  for (const auto& row : ptable.rows) {
    int id;
    if (!absl::SimpleAtoi(row[0], &id)) {
      return absl::InvalidArgumentError("persistent.tsv: bad timeline id");
    }
    persistent.push_back(id);
  }
  ASSIGN_OR_RETURN(TsvTable communities,
                   ReadTsvFile(truth_dir / "truth_communities.tsv",
                               CommunitiesColumns()));
  ASSIGN_OR_RETURN(TsvTable lifecycle,
                   ReadTsvFile(truth_dir / "truth_lifecycle.tsv",
                               {"step", "event_type", "labels"}));
  ASSIGN_OR_RETURN(GroundTruth truth,
                   TruthFromTables(communities, lifecycle, state.step_count));
  return EvaluateTracking(state, truth, persistent);
}

int ThreadsFromEnvironment() {
  const char* v = std::getenv("DYNCOM_THREADS");
  int n = 1;
  if (v != nullptr && absl::SimpleAtoi(v, &n) && n >= 1) return n;
  return 1;
}

}  // namespace dyncom
