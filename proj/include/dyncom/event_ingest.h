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

#ifndef DYNCOM_EVENT_INGEST_H_
#define DYNCOM_EVENT_INGEST_H_

#include <cstdint>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "absl/container/flat_hash_map.h"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "dyncom/entity.h"

namespace dyncom {

// Seconds since the Unix epoch, UTC.
using UnixSeconds = int64_t;

// One normalized interaction record: a post by `author` that may mention
// other accounts, reshare one account, and carry URLs.
struct EventRecord {
  std::string event_id;
  std::string author;
  UnixSeconds timestamp = 0;
  std::vector<std::string> mentioned;
  std::optional<std::string> reshare_of;
  std::vector<std::string> urls;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

// Sorted by timestamp ascending, ties in input order.
using EventLog = std::vector<EventRecord>;

// Parses line-delimited JSON records:
//   {"event_id": "e1", "author": "a1", "timestamp": "2012-06-01T10:00:00Z",
//    "mentioned": ["a2"], "reshare_of": null, "urls": ["http://..."]}
// Blank lines are skipped. Duplicate entries in "mentioned" are collapsed.
// Errors name the 1-based line number and the offending field.
absl::StatusOr<EventLog> ParseEvents(std::istream& in);
absl::StatusOr<EventLog> ReadEventsFile(const std::string& path);

// Inverse of ParseEvents for a single record (one JSON object, no newline).
std::string SerializeEvent(const EventRecord& event);
void WriteEvents(const EventLog& log, std::ostream& out);

absl::StatusOr<UnixSeconds> ParseTimestamp(absl::string_view text);
std::string FormatTimestamp(UnixSeconds t);

// Scheme/host/path/query split of an absolute http(s) URL. `host` is
// lowercased with any port, userinfo and trailing dot removed.
struct ParsedUrl {
  std::string scheme;
  std::string host;
  std::string path;
  std::string query;
};
std::optional<ParsedUrl> ParseUrl(absl::string_view url);

// Lowercase registrable domain of a host: "news.bbc.co.uk" -> "bbc.co.uk",
// "www.example-party.org" -> "example-party.org".
std::string RegistrableDomain(absl::string_view host);

class Resolver;

// A platform URL shape. Returns nullopt when the URL is not of this shape.
struct UrlRule {
  std::string name;
  std::function<std::optional<EntityRef>(const ParsedUrl&, const Resolver&)>
      apply;
};

// Maps URLs onto typed entities. Rules are tried in order and the first
// one that yields an entity wins; URLs no rule claims become Website nodes.
class Resolver {
 public:
  // Default platform rules (video host, social profiles, hosted media).
  Resolver();
  explicit Resolver(std::vector<UrlRule> rules) : rules_(std::move(rules)) {}

  static std::vector<UrlRule> DefaultRules();

  void AddVideoChannel(std::string video_id, std::string channel_id);
  std::optional<std::string> ChannelForVideo(absl::string_view video_id) const;
  size_t video_count() const { return video_to_channel_.size(); }

  const std::vector<UrlRule>& rules() const { return rules_; }

 private:
  absl::flat_hash_map<std::string, std::string> video_to_channel_;
  std::vector<UrlRule> rules_;
};

// Reads "video_id<TAB>channel_id" lines. Blank lines and lines starting with
// '#' are ignored.
absl::StatusOr<Resolver> ParseResolver(std::istream& in);
absl::StatusOr<Resolver> ReadResolverFile(const std::string& path);

// Returns nullopt only when the URL has no parseable host.
std::optional<EntityRef> ClassifyUrl(absl::string_view url,
                                     const Resolver& resolver);

// A URL that classifies back to `entity` under any resolver that agrees on
// video mappings.
std::string CanonicalUrl(const EntityRef& entity);

// Distinct entities referenced by the event's URLs, sorted. A URL repeated
// within one event counts once.
std::vector<EntityRef> ClassifyEventUrls(const EventRecord& event,
                                         const Resolver& resolver);

struct StatsReport {
  int64_t tweets = 0;
  int64_t mentions = 0;
  int64_t retweets = 0;
  int64_t all_urls = 0;
  int64_t video_urls = 0;
  int64_t social_urls = 0;

  StatsReport& operator+=(const StatsReport& o);
  friend StatsReport operator+(StatsReport a, const StatsReport& b) {
    return a += b;
  }
  friend bool operator==(const StatsReport&, const StatsReport&) = default;
};

StatsReport DatasetStats(const EventLog& log, const Resolver& resolver);

// "1517339" -> "1,517,339".
std::string WithThousandsSeparators(int64_t value);

// Tab-separated statistics table, one row per labelled data set, counts
// rendered with thousands separators.
std::string FormatStatsTable(
    const std::vector<std::pair<std::string, StatsReport>>& rows);

}  // namespace dyncom

#endif  // DYNCOM_EVENT_INGEST_H_
