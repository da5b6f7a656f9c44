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

#include "dyncom/event_ingest.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <set>

#include "absl/container/flat_hash_set.h"
#include "absl/strings/ascii.h"
#include "absl/strings/match.h"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_split.h"
#include "absl/strings/strip.h"
#include "absl/time/time.h"
#include "json.hpp"

namespace dyncom {
namespace {

using json = nlohmann::json;

absl::Status FieldError(size_t line, absl::string_view field,
                        absl::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line, ": field '", field, "' ", what));
}

// Identifiers end up in tab-separated tables.
bool HasControlChar(absl::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x20;
  });
}

absl::StatusOr<std::string> RequiredString(const json& obj, size_t line,
                                           const char* field) {
  auto it = obj.find(field);
  if (it == obj.end()) return FieldError(line, field, "is missing");
  if (!it->is_string()) return FieldError(line, field, "must be a string");
  std::string value = it->get<std::string>();
  if (value.empty()) return FieldError(line, field, "must be nonempty");
  if (HasControlChar(value)) {
    return FieldError(line, field, "contains control characters");
  }
  return value;
}

absl::StatusOr<std::vector<std::string>> StringList(const json& obj,
                                                    size_t line,
                                                    const char* field) {
  std::vector<std::string> out;
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return out;
  if (!it->is_array()) return FieldError(line, field, "must be an array");
  for (const json& v : *it) {
    if (!v.is_string() || v.get_ref<const std::string&>().empty() ||
        HasControlChar(v.get_ref<const std::string&>())) {
      return FieldError(line, field,
                        "must contain nonempty strings without control "
                        "characters");
    }
    out.push_back(v.get<std::string>());
  }
  return out;
}

absl::StatusOr<EventRecord> ParseEventLine(absl::string_view text,
                                           size_t line) {
  json obj = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded() || !obj.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("line ", line, ": not a JSON object"));
  }
  EventRecord ev;
  auto id = RequiredString(obj, line, "event_id");
  if (!id.ok()) return id.status();
  ev.event_id = *std::move(id);
  auto author = RequiredString(obj, line, "author");
  if (!author.ok()) return author.status();
  ev.author = *std::move(author);
  auto ts_text = RequiredString(obj, line, "timestamp");
  if (!ts_text.ok()) return ts_text.status();
  auto ts = ParseTimestamp(*ts_text);
  if (!ts.ok()) {
    return FieldError(line, "timestamp",
                      absl::StrCat("is not an ISO-8601 UTC instant: '",
                                   *ts_text, "'"));
  }
  ev.timestamp = *ts;

  auto mentioned = StringList(obj, line, "mentioned");
  if (!mentioned.ok()) return mentioned.status();
  absl::flat_hash_set<std::string> seen;
  for (std::string& m : *mentioned) {
    if (seen.insert(m).second) ev.mentioned.push_back(std::move(m));
  }

  if (auto it = obj.find("reshare_of"); it != obj.end() && !it->is_null()) {
    if (!it->is_string() || it->get_ref<const std::string&>().empty() ||
        HasControlChar(it->get_ref<const std::string&>())) {
      return FieldError(line, "reshare_of",
                        "must be null or a nonempty string");
    }
    ev.reshare_of = it->get<std::string>();
  }

  auto urls = StringList(obj, line, "urls");
  if (!urls.ok()) return urls.status();
  ev.urls = *std::move(urls);
  return ev;
}

bool IsHostChar(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '.' ||
         c == '_';
}

// Second-level labels under which registrations happen one level deeper.
bool IsTwoLevelSuffix(absl::string_view last_two) {
  static constexpr std::array<absl::string_view, 24> kSuffixes = {
      "co.uk", "org.uk", "ac.uk",  "gov.uk", "me.uk",  "ltd.uk",
      "net.uk", "plc.uk", "com.au", "net.au", "org.au", "co.nz",
      "org.nz", "co.jp",  "ne.jp",  "or.jp",  "com.br", "co.za",
      "co.in",  "com.cn", "com.mx", "com.tr", "co.at",  "or.at",
  };
  return std::find(kSuffixes.begin(), kSuffixes.end(), last_two) !=
         kSuffixes.end();
}

std::string QueryParam(absl::string_view query, absl::string_view key) {
  for (absl::string_view kv : absl::StrSplit(query, '&')) {
    std::pair<absl::string_view, absl::string_view> p =
        absl::StrSplit(kv, absl::MaxSplits('=', 1));
    if (p.first == key) return std::string(p.second);
  }
  return "";
}

std::vector<absl::string_view> PathSegments(absl::string_view path) {
  return absl::StrSplit(path, '/', absl::SkipEmpty());
}

bool HostIn(absl::string_view host,
            std::initializer_list<absl::string_view> hosts) {
  for (absl::string_view h : hosts) {
    if (host == h) return true;
  }
  return false;
}

std::optional<EntityRef> VideoHostRule(const ParsedUrl& url,
                                       const Resolver& resolver) {
  if (!HostIn(url.host, {"youtube.com", "www.youtube.com", "m.youtube.com",
                         "youtu.be", "www.youtu.be", "youtube-nocookie.com",
                         "www.youtube-nocookie.com"})) {
    return std::nullopt;
  }
  std::vector<absl::string_view> seg = PathSegments(url.path);
  std::string video_id;
  if (absl::EndsWith(url.host, "youtu.be")) {
    if (!seg.empty()) video_id = std::string(seg[0]);
  } else if (!seg.empty() && seg[0] == "watch") {
    video_id = QueryParam(url.query, "v");
  } else if (seg.size() >= 2 &&
             (seg[0] == "embed" || seg[0] == "v" || seg[0] == "shorts")) {
    video_id = std::string(seg[1]);
  } else if (seg.size() >= 2 && seg[0] == "channel") {
    return EntityRef::VideoChannel(std::string(seg[1]), true);
  } else if (seg.size() >= 2 && (seg[0] == "user" || seg[0] == "c")) {
    return EntityRef::VideoChannel(
        absl::StrCat("user:", absl::AsciiStrToLower(seg[1])), true);
  }
  if (video_id.empty()) return std::nullopt;
  if (auto channel = resolver.ChannelForVideo(video_id)) {
    return EntityRef::VideoChannel(*std::move(channel), true);
  }
  return EntityRef::VideoChannel(absl::StrCat("video:", video_id), false);
}

std::optional<EntityRef> SocialProfileRule(const ParsedUrl& url,
                                           const Resolver&) {
  if (!HostIn(url.host, {"facebook.com", "www.facebook.com",
                         "m.facebook.com", "fb.com", "www.fb.com"})) {
    return std::nullopt;
  }
  static constexpr std::array<absl::string_view, 14> kReserved = {
      "sharer.php", "sharer",    "share.php", "l.php",     "photo.php",
      "home.php",   "login.php", "dialog",    "plugins",   "events",
      "media",      "story.php", "video.php", "permalink.php"};
  std::vector<absl::string_view> seg = PathSegments(url.path);
  if (seg.empty()) return std::nullopt;
  if (seg[0] == "profile.php") {
    std::string id = QueryParam(url.query, "id");
    if (id.empty()) return std::nullopt;
    return EntityRef::SocialProfile(std::move(id));
  }
  if ((seg[0] == "pages" || seg[0] == "people") && seg.size() >= 3) {
    return EntityRef::SocialProfile(std::string(seg[2]));
  }
  if (seg[0] == "groups" && seg.size() >= 2) {
    return EntityRef::SocialProfile(
        absl::StrCat("group:", absl::AsciiStrToLower(seg[1])));
  }
  if (std::find(kReserved.begin(), kReserved.end(), seg[0]) !=
      kReserved.end()) {
    return std::nullopt;
  }
  return EntityRef::SocialProfile(absl::AsciiStrToLower(seg[0]));
}

// Photos and other media hosted on the posting platform itself name the
// account they belong to: twitter.com/<account>/status/<id>/photo/1.
std::optional<EntityRef> HostedMediaRule(const ParsedUrl& url,
                                         const Resolver&) {
  if (!HostIn(url.host,
              {"twitter.com", "www.twitter.com", "mobile.twitter.com"})) {
    return std::nullopt;
  }
  static constexpr std::array<absl::string_view, 6> kReserved = {
      "i", "intent", "search", "hashtag", "share", "home"};
  std::vector<absl::string_view> seg = PathSegments(url.path);
  if (seg.size() < 2 || (seg[1] != "status" && seg[1] != "statuses")) {
    return std::nullopt;
  }
  if (std::find(kReserved.begin(), kReserved.end(), seg[0]) !=
      kReserved.end()) {
    return std::nullopt;
  }
  return EntityRef::Account(absl::AsciiStrToLower(seg[0]));
}

}  // namespace

absl::StatusOr<UnixSeconds> ParseTimestamp(absl::string_view text) {
  absl::Time t;
  std::string err;
  if (!absl::ParseTime(absl::RFC3339_full, std::string(text), &t, &err)) {
    return absl::InvalidArgumentError(err);
  }
  if (t == absl::InfiniteFuture() || t == absl::InfinitePast()) {
    return absl::InvalidArgumentError("timestamp is not finite");
  }
  return absl::ToUnixSeconds(t);
}

std::string FormatTimestamp(UnixSeconds t) {
  return absl::FormatTime("%Y-%m-%dT%H:%M:%SZ", absl::FromUnixSeconds(t),
                          absl::UTCTimeZone());
}

absl::StatusOr<EventLog> ParseEvents(std::istream& in) {
  EventLog log;
  absl::flat_hash_map<std::string, size_t> first_line;
  std::string text;
  size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (absl::StripAsciiWhitespace(text).empty()) continue;
    auto ev = ParseEventLine(text, line);
    if (!ev.ok()) return ev.status();
    auto [it, inserted] = first_line.emplace(ev->event_id, line);
    if (!inserted) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line, ": field 'event_id' duplicates '",
                       ev->event_id, "' first seen at line ", it->second));
    }
    log.push_back(*std::move(ev));
  }
  std::stable_sort(log.begin(), log.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  return log;
}

absl::StatusOr<EventLog> ReadEventsFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  auto log = ParseEvents(in);
  if (!log.ok()) {
    return absl::Status(log.status().code(),
                        absl::StrCat(path, ": ", log.status().message()));
  }
  return log;
}

std::string SerializeEvent(const EventRecord& event) {
  json obj = json::object();
  obj["event_id"] = event.event_id;
  obj["author"] = event.author;
  obj["timestamp"] = FormatTimestamp(event.timestamp);
  obj["mentioned"] = event.mentioned;
  obj["reshare_of"] =
      event.reshare_of ? json(*event.reshare_of) : json(nullptr);
  obj["urls"] = event.urls;
  return obj.dump();
}

void WriteEvents(const EventLog& log, std::ostream& out) {
  for (const EventRecord& ev : log) out << SerializeEvent(ev) << '\n';
}

std::optional<ParsedUrl> ParseUrl(absl::string_view url) {
  url = absl::StripAsciiWhitespace(url);
  size_t sep = url.find("://");
  if (sep == absl::string_view::npos || sep == 0) return std::nullopt;
  ParsedUrl out;
  out.scheme = absl::AsciiStrToLower(url.substr(0, sep));
  if (out.scheme != "http" && out.scheme != "https") return std::nullopt;
  absl::string_view rest = url.substr(sep + 3);
  size_t host_end = rest.find_first_of("/?#");
  absl::string_view authority = rest.substr(0, host_end);
  absl::string_view tail =
      host_end == absl::string_view::npos ? "" : rest.substr(host_end);
  if (size_t at = authority.rfind('@'); at != absl::string_view::npos) {
    authority = authority.substr(at + 1);
  }
  if (size_t colon = authority.find(':'); colon != absl::string_view::npos) {
    authority = authority.substr(0, colon);
  }
  while (absl::ConsumeSuffix(&authority, ".")) {
  }
  if (authority.empty() ||
      !std::all_of(authority.begin(), authority.end(), IsHostChar) ||
      authority.front() == '.' || authority.find("..") != authority.npos) {
    return std::nullopt;
  }
  out.host = absl::AsciiStrToLower(authority);

  if (size_t hash = tail.find('#'); hash != absl::string_view::npos) {
    tail = tail.substr(0, hash);
  }
  if (size_t q = tail.find('?'); q != absl::string_view::npos) {
    out.query = std::string(tail.substr(q + 1));
    tail = tail.substr(0, q);
  }
  out.path = tail.empty() ? "/" : std::string(tail);
  return out;
}

std::string RegistrableDomain(absl::string_view host) {
  std::string h = absl::AsciiStrToLower(host);
  std::vector<absl::string_view> labels = absl::StrSplit(h, '.');
  bool numeric = std::all_of(labels.begin(), labels.end(), [](auto l) {
    int unused;
    return absl::SimpleAtoi(l, &unused);
  });
  if (numeric || labels.size() <= 2) {
    absl::string_view v = h;
    absl::ConsumePrefix(&v, "www.");
    return std::string(v);
  }
  size_t n = labels.size();
  std::string last_two = absl::StrCat(labels[n - 2], ".", labels[n - 1]);
  if (IsTwoLevelSuffix(last_two)) {
    return absl::StrCat(labels[n - 3], ".", last_two);
  }
  return last_two;
}

Resolver::Resolver() : rules_(DefaultRules()) {}

std::vector<UrlRule> Resolver::DefaultRules() {
  return {
      {"video_host", VideoHostRule},
      {"social_profile", SocialProfileRule},
      {"hosted_media", HostedMediaRule},
  };
}

void Resolver::AddVideoChannel(std::string video_id, std::string channel_id) {
  video_to_channel_[std::move(video_id)] = std::move(channel_id);
}

std::optional<std::string> Resolver::ChannelForVideo(
    absl::string_view video_id) const {
  auto it = video_to_channel_.find(video_id);
  if (it == video_to_channel_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<Resolver> ParseResolver(std::istream& in) {
  Resolver resolver;
  std::string text;
  size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    absl::string_view v = absl::StripAsciiWhitespace(text);
    if (v.empty() || v.front() == '#') continue;
    std::vector<absl::string_view> cols = absl::StrSplit(v, '\t');
    if (cols.size() != 2 || cols[0].empty() || cols[1].empty()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "resolver line ", line, ": expected video_id<TAB>channel_id"));
    }
    resolver.AddVideoChannel(std::string(cols[0]), std::string(cols[1]));
  }
  return resolver;
}

absl::StatusOr<Resolver> ReadResolverFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  return ParseResolver(in);
}

std::optional<EntityRef> ClassifyUrl(absl::string_view url,
                                     const Resolver& resolver) {
  std::optional<ParsedUrl> parsed = ParseUrl(url);
  if (!parsed) return std::nullopt;
  for (const UrlRule& rule : resolver.rules()) {
    if (auto entity = rule.apply(*parsed, resolver)) return entity;
  }
  return EntityRef::Website(RegistrableDomain(parsed->host));
}

std::string CanonicalUrl(const EntityRef& e) {
  switch (e.kind) {
    case EntityKind::kAccount:
      return absl::StrCat("https://twitter.com/", e.id, "/status/0");
    case EntityKind::kVideoChannel:
      if (absl::StartsWith(e.id, "video:")) {
        return absl::StrCat("https://www.youtube.com/watch?v=",
                            e.id.substr(6));
      }
      if (absl::StartsWith(e.id, "user:")) {
        return absl::StrCat("https://www.youtube.com/user/", e.id.substr(5));
      }
      return absl::StrCat("https://www.youtube.com/channel/", e.id);
    case EntityKind::kSocialProfile: {
      if (absl::StartsWith(e.id, "group:")) {
        return absl::StrCat("https://www.facebook.com/groups/",
                            e.id.substr(6));
      }
      int64_t numeric;
      if (absl::SimpleAtoi(e.id, &numeric)) {
        return absl::StrCat("https://www.facebook.com/profile.php?id=", e.id);
      }
      return absl::StrCat("https://www.facebook.com/", e.id);
    }
    case EntityKind::kWebsite:
      return absl::StrCat("http://", e.id, "/");
  }
  return "";
}

std::vector<EntityRef> ClassifyEventUrls(const EventRecord& event,
                                         const Resolver& resolver) {
  std::set<EntityRef> refs;
  for (const std::string& url : event.urls) {
    if (auto e = ClassifyUrl(url, resolver)) refs.insert(*std::move(e));
  }
  return {refs.begin(), refs.end()};
}

StatsReport& StatsReport::operator+=(const StatsReport& o) {
  tweets += o.tweets;
  mentions += o.mentions;
  retweets += o.retweets;
  all_urls += o.all_urls;
  video_urls += o.video_urls;
  social_urls += o.social_urls;
  return *this;
}

StatsReport DatasetStats(const EventLog& log, const Resolver& resolver) {
  StatsReport r;
  for (const EventRecord& ev : log) {
    ++r.tweets;
    r.mentions += static_cast<int64_t>(ev.mentioned.size());
    if (ev.reshare_of) ++r.retweets;
    for (const std::string& url : ev.urls) {
      ++r.all_urls;
      std::optional<EntityRef> e = ClassifyUrl(url, resolver);
      if (!e) continue;
      if (e->kind == EntityKind::kVideoChannel) ++r.video_urls;
      if (e->kind == EntityKind::kSocialProfile) ++r.social_urls;
    }
  }
  return r;
}

std::string WithThousandsSeparators(int64_t value) {
  std::string digits = absl::StrCat(value < 0 ? -value : value);
  std::string out;
  for (size_t i = 0; i < digits.size(); ++i) {
    if (i > 0 && (digits.size() - i) % 3 == 0) out.push_back(',');
    out.push_back(digits[i]);
  }
  return value < 0 ? "-" + out : out;
}

std::string FormatStatsTable(
    const std::vector<std::pair<std::string, StatsReport>>& rows) {
  std::string out =
      "Data set\tTweets\tMentions\tRetweets\tAll URLs\tVideo URLs\tSocial "
      "URLs\n";
  for (const auto& [label, r] : rows) {
    absl::StrAppend(&out, label, "\t", WithThousandsSeparators(r.tweets), "\t",
                    WithThousandsSeparators(r.mentions), "\t",
                    WithThousandsSeparators(r.retweets), "\t",
                    WithThousandsSeparators(r.all_urls), "\t",
                    WithThousandsSeparators(r.video_urls), "\t",
                    WithThousandsSeparators(r.social_urls), "\n");
  }
  return out;
}

}  // namespace dyncom
