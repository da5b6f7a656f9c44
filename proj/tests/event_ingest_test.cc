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

#include <sstream>

#include "absl/strings/ascii.h"
#include "fixtures.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dyncom {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using testing::Ev;
using testing::kDay0;

absl::StatusOr<EventLog> Parse(const std::string& text) {
  std::istringstream in(text);
  return ParseEvents(in);
}

TEST(ParseEventsTest, SingleWellFormedLine) {
  auto log = Parse(
      R"({"event_id":"e1","author":"a1","timestamp":"2012-06-01T10:00:00Z",)"
      R"("mentioned":["a2"],"reshare_of":null,"urls":[]})"
      "\n");
  ASSERT_TRUE(log.ok()) << log.status();
  ASSERT_EQ(log->size(), 1u);
  EXPECT_EQ((*log)[0].author, "a1");
  EXPECT_THAT((*log)[0].mentioned, ElementsAre("a2"));
  EXPECT_EQ((*log)[0].timestamp, kDay0 + 10 * 3600);
}

TEST(ParseEventsTest, BadTimestampNamesLineAndField) {
  auto log = Parse(
      R"({"event_id":"e1","author":"a1","timestamp":"2012-06-01T10:00:00Z"})"
      "\n"
      R"({"event_id":"e2","author":"a1","timestamp":"not-a-date"})"
      "\n");
  ASSERT_FALSE(log.ok());
  EXPECT_THAT(log.status().message(), HasSubstr("line 2"));
  EXPECT_THAT(log.status().message(), HasSubstr("timestamp"));
}

TEST(ParseEventsTest, SortsByTimestampStably) {
  auto log = Parse(
      R"({"event_id":"c","author":"a","timestamp":"2012-06-03T00:00:00Z"})"
      "\n"
      R"({"event_id":"a","author":"a","timestamp":"2012-06-01T00:00:00Z"})"
      "\n"
      R"({"event_id":"b","author":"a","timestamp":"2012-06-03T00:00:00Z"})"
      "\n");
  ASSERT_TRUE(log.ok()) << log.status();
  std::vector<std::string> ids;
  for (const auto& e : *log) ids.push_back(e.event_id);
  EXPECT_THAT(ids, ElementsAre("a", "c", "b"));
}

TEST(ParseEventsTest, DuplicateIdIsAnError) {
  auto log = Parse(
      R"({"event_id":"e1","author":"a","timestamp":"2012-06-01T00:00:00Z"})"
      "\n"
      R"({"event_id":"e1","author":"b","timestamp":"2012-06-02T00:00:00Z"})"
      "\n");
  ASSERT_FALSE(log.ok());
  EXPECT_THAT(log.status().message(), HasSubstr("event_id"));
}

TEST(ParseEventsTest, MissingAuthorAndWrongTypes) {
  EXPECT_FALSE(
      Parse(R"({"event_id":"e1","timestamp":"2012-06-01T00:00:00Z"})").ok());
  EXPECT_FALSE(Parse(R"({"event_id":"e1","author":"a",)"
                     R"("timestamp":"2012-06-01T00:00:00Z","urls":"x"})")
                   .ok());
  EXPECT_FALSE(Parse("[1,2]").ok());
  EXPECT_FALSE(Parse("{not json").ok());
}

TEST(ParseEventsTest, DuplicateMentionsCollapse) {
  auto log = Parse(R"({"event_id":"e1","author":"a",)"
                   R"("timestamp":"2012-06-01T00:00:00Z",)"
                   R"("mentioned":["b","c","b"]})");
  ASSERT_TRUE(log.ok()) << log.status();
  EXPECT_THAT((*log)[0].mentioned, ElementsAre("b", "c"));
}

TEST(ParseEventsTest, SerializeRoundTrips) {
  EventLog log = {
      Ev("e1", "a1", kDay0 + 5, {"a2", "a3"}, "a4", {"http://x.org/1"}),
      Ev("e2", "a2", kDay0 + 9)};
  std::ostringstream out;
  WriteEvents(log, out);
  auto back = Parse(out.str());
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(*back, log);
}

TEST(ClassifyUrlTest, ResolvedVideo) {
  Resolver r;
  r.AddVideoChannel("X", "chanC");
  auto e = ClassifyUrl("https://www.youtube.com/watch?v=X", r);
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(e->kind, EntityKind::kVideoChannel);
  EXPECT_EQ(e->id, "chanC");
  EXPECT_TRUE(e->resolved);
}

TEST(ClassifyUrlTest, UnresolvedVideo) {
  auto e = ClassifyUrl("http://youtu.be/Y", Resolver());
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(*e, EntityRef::VideoChannel("video:Y", false));
  EXPECT_FALSE(e->resolved);
}

TEST(ClassifyUrlTest, WebsiteIsRegistrableDomain) {
  auto e = ClassifyUrl("http://www.example-party.org/news/item1", Resolver());
  ASSERT_TRUE(e.has_value());
  EXPECT_EQ(*e, EntityRef::Website("example-party.org"));
  EXPECT_EQ(*ClassifyUrl("https://news.BBC.co.uk:8080/a?b=c", Resolver()),
            EntityRef::Website("bbc.co.uk"));
}

TEST(ClassifyUrlTest, SocialProfilesAndHostedMedia) {
  Resolver r;
  EXPECT_EQ(*ClassifyUrl("https://www.facebook.com/SomePage", r),
            EntityRef::SocialProfile("somepage"));
  EXPECT_EQ(*ClassifyUrl("https://facebook.com/groups/abc", r),
            EntityRef::SocialProfile("group:abc"));
  EXPECT_EQ(*ClassifyUrl("http://www.facebook.com/profile.php?id=42", r),
            EntityRef::SocialProfile("42"));
  EXPECT_EQ(*ClassifyUrl("https://twitter.com/SomeUser/status/1", r),
            EntityRef::Account("someuser"));
}

TEST(ClassifyUrlTest, UnparseableHost) {
  EXPECT_FALSE(ClassifyUrl("not a url", Resolver()).has_value());
  EXPECT_FALSE(ClassifyUrl("http:///path", Resolver()).has_value());
}

TEST(ClassifyUrlTest, CanonicalFormIsIdempotent) {
  Resolver r = testing::RandomLogResolver();
  const std::vector<std::string> urls = {
      "http://www.example-party.org/news/item1",
      "https://www.youtube.com/watch?v=vid1",
      "https://www.youtube.com/watch?v=unknown",
      "https://www.youtube.com/user/SomeUser",
      "https://www.youtube.com/channel/UCxyz",
      "https://www.facebook.com/SomePage",
      "https://facebook.com/groups/abc",
      "http://www.facebook.com/profile.php?id=42",
      "https://twitter.com/SomeUser/status/1",
      "http://blog.site-b.co.uk/post?q=1",
  };
  for (const std::string& url : urls) {
    auto e = ClassifyUrl(url, r);
    ASSERT_TRUE(e.has_value()) << url;
    auto again = ClassifyUrl(CanonicalUrl(*e), r);
    ASSERT_TRUE(again.has_value()) << url;
    EXPECT_EQ(*again, *e) << url;
    EXPECT_EQ(again->resolved, e->resolved) << url;
  }
}

TEST(ClassifyUrlTest, WebsiteIdsAreBareLowercaseDomains) {
  const std::vector<std::string> hosts = {"WWW.A.ORG", "b.Example.COM.",
                                          "x.y.gov.uk", "user@c.net:80"};
  for (const auto& h : hosts) {
    auto e = ClassifyUrl("http://" + h + "/P/Q?R=S", Resolver());
    ASSERT_TRUE(e.has_value()) << h;
    ASSERT_EQ(e->kind, EntityKind::kWebsite);
    EXPECT_EQ(e->id.find_first_of("/:"), std::string::npos) << e->id;
    EXPECT_EQ(e->id, absl::AsciiStrToLower(e->id));
  }
}

TEST(ResolverTest, ParsesTabSeparatedMap) {
  std::istringstream in("# comment\nv1\tc1\n\nv2\tc2\n");
  auto r = ParseResolver(in);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_EQ(r->video_count(), 2u);
  EXPECT_EQ(r->ChannelForVideo("v2"), "c2");
  std::istringstream bad("v1 c1\n");
  EXPECT_FALSE(ParseResolver(bad).ok());
}

TEST(DatasetStatsTest, EmptyLog) {
  EXPECT_EQ(DatasetStats({}, Resolver()), StatsReport{});
}

TEST(DatasetStatsTest, HandCountedFixture) {
  EventLog log = {
      Ev("e1", "a1", kDay0, {"a2", "a3"}, std::nullopt,
         {"http://site.org/1", "https://www.youtube.com/watch?v=V"}),
      Ev("e2", "a2", kDay0 + 1, {}, "a1", {"http://other.org/"}),
      Ev("e3", "a3", kDay0 + 2, {}, std::nullopt, {"http://site.org/2"}),
  };
  StatsReport s = DatasetStats(log, Resolver());
  EXPECT_EQ(s, (StatsReport{3, 2, 1, 4, 1, 0}));
}

TEST(DatasetStatsTest, AdditiveOverConcatenation) {
  Rng rng(11);
  Resolver r = testing::RandomLogResolver();
  for (int trial = 0; trial < 20; ++trial) {
    EventLog a = testing::RandomLog(rng, testing::FirstWindow(), 6, 20);
    EventLog b = testing::RandomLog(rng, testing::FirstWindow(), 6, 20);
    EventLog ab = a;
    ab.insert(ab.end(), b.begin(), b.end());
    EXPECT_EQ(DatasetStats(ab, r), DatasetStats(a, r) + DatasetStats(b, r));
    StatsReport s = DatasetStats(ab, r);
    EXPECT_LE(s.video_urls + s.social_urls, s.all_urls);
  }
}

TEST(DatasetStatsTest, TableRowShape) {
  StatsReport english{1517339, 539181, 162042, 972444, 71049, 23007};
  EXPECT_EQ(FormatStatsTable({{"English", english}}),
            "Data set\tTweets\tMentions\tRetweets\tAll URLs\tVideo URLs\t"
            "Social URLs\n"
            "English\t1,517,339\t539,181\t162,042\t972,444\t71,049\t23,007\n");
  EXPECT_EQ(WithThousandsSeparators(0), "0");
  EXPECT_EQ(WithThousandsSeparators(999), "999");
  EXPECT_EQ(WithThousandsSeparators(1000), "1,000");
}

TEST(EntityTest, IdentityIgnoresResolvedFlag) {
  EXPECT_EQ(EntityRef::VideoChannel("c", true),
            EntityRef::VideoChannel("c", false));
  EXPECT_NE(EntityRef::Account("x"), EntityRef::Website("x"));
  EXPECT_EQ(ToString(EntityRef::Website("a.org")), "website:a.org");
  for (EntityKind k : {EntityKind::kAccount, EntityKind::kVideoChannel,
                       EntityKind::kSocialProfile, EntityKind::kWebsite}) {
    EXPECT_EQ(*ParseKind(KindName(k)), k);
  }
  EXPECT_FALSE(ParseKind("planet").ok());
}

}  // namespace
}  // namespace dyncom
