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

#include <cmath>
#include <set>

#include "absl/strings/str_cat.h"
#include "fixtures.h"
#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace dyncom {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;
using testing::Comm;
using testing::Ev;
using testing::kDay;
using testing::kDay0;

std::vector<EntityRef> Range(const std::string& prefix, int from, int to) {
  std::vector<EntityRef> out;
  for (int i = from; i < to; ++i) {
    out.push_back(EntityRef::Account(absl::StrCat(prefix, i)));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<EntityRef> Join(std::vector<EntityRef> a,
                            const std::vector<EntityRef>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

Timeline WithHistory(std::vector<std::vector<EntityRef>> oldest_first) {
  Timeline tl;
  for (size_t t = 0; t < oldest_first.size(); ++t) {
    tl.observations.push_back({static_cast<int>(t), 0, oldest_first[t]});
  }
  tl.events.push_back({0, LifecycleType::kBirth, {}});
  return tl;
}

std::vector<LifecycleType> Types(const Timeline& tl) {
  std::vector<LifecycleType> out;
  for (const auto& e : tl.events) out.push_back(e.type);
  return out;
}

TEST(RepresentativenessTest, Examples) {
  auto c = Range("a", 0, 4);
  EXPECT_DOUBLE_EQ(*Representativeness(c, c), 1.0);
  EXPECT_DOUBLE_EQ(*Representativeness(c, Range("b", 0, 4)), 0.0);
  auto d = Join(Range("a", 2, 4), Range("b", 0, 6));  // |D|=8, overlap 2
  EXPECT_NEAR(*Representativeness(c, d), std::sqrt(0.5 * 0.25), 1e-12);
  EXPECT_NEAR(*Representativeness(c, d), 0.35355, 1e-5);
  EXPECT_FALSE(Representativeness({}, c).ok());
  EXPECT_FALSE(Representativeness(c, {}).ok());
}

TEST(RepresentativenessTest, SymmetricAndBounded) {
  Rng rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<EntityRef> c, d;
    for (int i = 0; i < 12; ++i) {
      if (rng.Bernoulli(0.5)) c.push_back(EntityRef::Account(absl::StrCat(i)));
      if (rng.Bernoulli(0.5)) d.push_back(EntityRef::Account(absl::StrCat(i)));
    }
    std::sort(c.begin(), c.end());
    std::sort(d.begin(), d.end());
    if (c.empty() || d.empty()) continue;
    double inter = 0;
    for (const auto& x : c) inter += std::binary_search(d.begin(), d.end(), x);
    const double cd = *Representativeness(c, d);
    EXPECT_DOUBLE_EQ(cd, *Representativeness(d, c));
    EXPECT_NEAR(cd, std::sqrt(inter / c.size() * inter / d.size()), 1e-12);
    EXPECT_LE(cd, 1.0);
    EXPECT_GE(cd + 1e-12, inter / std::max(c.size(), d.size()));
  }
}

TEST(TimelineSimilarityTest, SingleObservation) {
  // |C| = |D| = 5, one shared member: similarity 0.2.
  auto d = Range("a", 0, 5);
  auto c = Join(Range("a", 0, 1), Range("b", 0, 4));
  EXPECT_NEAR(*TimelineSimilarity(c, WithHistory({d}), TrackingParams()), 0.2,
              1e-12);
}

TEST(TimelineSimilarityTest, CompositeOfTwoCandidates) {
  auto c = Range("a", 0, 5);
  // Newest: 2 of 5 shared with a 5-set (0.4). Older: 1 shared with a 20-set
  // (sqrt(1/5 * 1/20) = 0.1).
  auto newest = Join(Range("a", 0, 2), Range("b", 0, 3));
  auto older = Join(Range("a", 4, 5), Range("c", 0, 19));
  ASSERT_NEAR(*Representativeness(c, newest), 0.4, 1e-12);
  ASSERT_NEAR(*Representativeness(c, older), 0.1, 1e-12);
  const double s =
      *TimelineSimilarity(c, WithHistory({older, newest}), TrackingParams());
  EXPECT_NEAR(s, (1.0 * 0.4 + 0.5 * 0.1) / 1.5, 1e-12);
  EXPECT_NEAR(s, 0.3, 1e-12);
  EXPECT_GE(s, TrackingParams().match_threshold);
}

TEST(TimelineSimilarityTest, ZeroAndEmpty) {
  auto c = Range("a", 0, 3);
  EXPECT_EQ(*TimelineSimilarity(
                c, WithHistory({Range("b", 0, 3), Range("c", 0, 3)}),
                TrackingParams()),
            0.0);
  EXPECT_FALSE(TimelineSimilarity(c, Timeline(), TrackingParams()).ok());
}

TEST(TimelineSimilarityTest, AlphaOneIsFrontMatching) {
  Rng rng(44);
  TrackingParams p;
  p.alpha = 1.0;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<std::vector<EntityRef>> hist;
    const int len = 1 + static_cast<int>(rng.UniformInt(6));
    for (int t = 0; t < len; ++t) {
      std::vector<EntityRef> m;
      for (int i = 0; i < 10; ++i) {
        if (rng.Bernoulli(0.4)) m.push_back(EntityRef::Account(absl::StrCat(i)));
      }
      if (m.empty()) m.push_back(EntityRef::Account("0"));
      std::sort(m.begin(), m.end());
      hist.push_back(m);
    }
    auto c = Range("", 0, 1 + static_cast<int>(rng.UniformInt(10)));
    EXPECT_NEAR(*TimelineSimilarity(c, WithHistory(hist), p),
                *Representativeness(c, hist.back()), 1e-12);
  }
}

TEST(MatchCandidatesTest, NewestFirstWithInherited) {
  Timeline tl = WithHistory({Range("a", 0, 2), Range("a", 0, 3)});
  tl.inherited.push_back({1, 7, Range("z", 0, 2)});
  tl.inherited.push_back({0, 8, Range("y", 0, 2)});
  auto cands = MatchCandidates(tl);
  ASSERT_EQ(cands.size(), 4u);
  EXPECT_EQ(cands[0]->step, 1);
  EXPECT_EQ(cands[0]->id, 0);
  EXPECT_EQ(cands[1]->id, 7);
  EXPECT_EQ(cands[2]->step, 0);
  EXPECT_EQ(cands[2]->id, 0);
  EXPECT_EQ(cands[3]->id, 8);
}

TEST(AdvanceStepTest, ColdStartBirths) {
  auto s = AdvanceStep(TimelineSet(), 0,
                       {Comm(0, 0, {"a", "b"}), Comm(0, 1, {"c", "d"})},
                       TrackingParams());
  ASSERT_TRUE(s.ok()) << s.status();
  ASSERT_EQ(s->timelines.size(), 2u);
  for (const Timeline& tl : s->timelines) {
    EXPECT_THAT(Types(tl), ElementsAre(LifecycleType::kBirth));
  }
  EXPECT_EQ(s->step_count, 1);
}

TEST(AdvanceStepTest, MergeOfTwoTimelines) {
  TrackingParams p;
  auto s = AdvanceStep(TimelineSet(), 0,
                       {Comm(0, 0, {"a", "b", "c"}), Comm(0, 1, {"d", "e"})},
                       p);
  s = AdvanceStep(*s, 1, {Comm(1, 0, {"a", "b", "c", "d", "e"})}, p);
  ASSERT_TRUE(s.ok()) << s.status();
  ASSERT_EQ(s->timelines.size(), 2u);
  const Timeline& survivor = s->timelines[0];
  const Timeline& absorbed = s->timelines[1];
  EXPECT_THAT(Types(survivor),
              ElementsAre(LifecycleType::kBirth, LifecycleType::kMerge));
  EXPECT_THAT(survivor.events[1].related, ElementsAre(1));
  EXPECT_EQ(survivor.observations.size(), 2u);
  EXPECT_EQ(absorbed.merged_into, 0);
  EXPECT_EQ(absorbed.merged_at, 1);
  EXPECT_FALSE(absorbed.open());
  EXPECT_EQ(survivor.inherited.size(), 1u);
}

TEST(AdvanceStepTest, SplitKeepsMostSimilarCommunity) {
  TrackingParams p;
  auto d = Range("d", 0, 10);
  TimelineSet s = *AdvanceStep(TimelineSet(), 0, {{0, 0, d}}, p);
  StepCommunity s1{1, 0, Range("d", 0, 6)};
  StepCommunity s2{1, 1, Join(Range("d", 6, 8), Range("x", 0, 2))};
  ASSERT_NEAR(*Representativeness(s1.members, d), std::sqrt(0.6), 1e-12);
  ASSERT_NEAR(*Representativeness(s2.members, d), std::sqrt(0.1), 1e-12);
  auto out = AdvanceStep(s, 1, {s2, s1}, p);
  ASSERT_TRUE(out.ok()) << out.status();
  ASSERT_EQ(out->timelines.size(), 2u);
  EXPECT_EQ(out->timelines[0].ObservationAt(1)->id, 0);
  EXPECT_THAT(Types(out->timelines[0]),
              ElementsAre(LifecycleType::kBirth, LifecycleType::kContinuation));
  const Timeline& child = out->timelines[1];
  EXPECT_THAT(Types(child),
              ElementsAre(LifecycleType::kBirth, LifecycleType::kSplit));
  EXPECT_THAT(child.events[1].related, ElementsAre(0));
  EXPECT_EQ(child.ObservationAt(1)->id, 1);
}

TEST(AdvanceStepTest, MergeTakesPrecedenceOverSplit) {
  TrackingParams p;
  auto s = AdvanceStep(
      TimelineSet(), 0,
      {{0, 0, Range("a", 0, 8)}, {0, 1, Range("b", 0, 4)}}, p);
  // Community 0 draws on both timelines; community 1 only on the first.
  StepCommunity merged{1, 0, Join(Range("a", 0, 5), Range("b", 0, 4))};
  StepCommunity rest{1, 1, Range("a", 5, 8)};
  auto out = AdvanceStep(*s, 1, {merged, rest}, p);
  ASSERT_TRUE(out.ok()) << out.status();
  int merges = 0;
  for (const Timeline& tl : out->timelines) {
    for (const auto& ev : tl.events) merges += ev.type == LifecycleType::kMerge;
  }
  EXPECT_EQ(merges, 1);
  const Timeline* owner = nullptr;
  for (const Timeline& tl : out->timelines) {
    if (const StepCommunity* c = tl.ObservationAt(1); c && c->id == 0) {
      owner = &tl;
    }
  }
  ASSERT_NE(owner, nullptr);
  EXPECT_EQ(owner->events.back().type, LifecycleType::kMerge);
}

TEST(AdvanceStepTest, UnmatchedTimelineRecordsAbsence) {
  TrackingParams p;
  auto s = AdvanceStep(TimelineSet(), 0, {Comm(0, 0, {"a", "b"})}, p);
  s = AdvanceStep(*s, 1, {Comm(1, 0, {"x", "y"})}, p);
  ASSERT_TRUE(s.ok());
  ASSERT_EQ(s->timelines.size(), 2u);
  EXPECT_THAT(Types(s->timelines[0]),
              ElementsAre(LifecycleType::kBirth, LifecycleType::kAbsent));
  EXPECT_TRUE(s->timelines[0].open());
  // Historical candidates let it resume later.
  s = AdvanceStep(*s, 2, {Comm(2, 0, {"a", "b"})}, p);
  EXPECT_EQ(s->timelines[0].ObservationAt(2)->id, 0);
}

TEST(AdvanceStepTest, ThresholdIsInclusive) {
  TrackingParams p;
  // |C| = |D| = 4 with one shared member: exactly 0.25.
  auto d = Range("a", 0, 4);
  auto at = Join(Range("a", 0, 1), Range("b", 0, 3));
  ASSERT_EQ(*Representativeness(at, d), 0.25);
  TimelineSet s = *AdvanceStep(TimelineSet(), 0, {{0, 0, d}}, p);
  auto out = AdvanceStep(s, 1, {{1, 0, at}}, p);
  EXPECT_EQ(out->timelines.size(), 1u);
  // One more outsider drops it below 0.25.
  auto below = Join(Range("a", 0, 1), Range("b", 0, 4));
  out = AdvanceStep(s, 1, {{1, 0, below}}, p);
  EXPECT_EQ(out->timelines.size(), 2u);
}

TEST(AdvanceStepTest, Errors) {
  TrackingParams p;
  EXPECT_THAT(AdvanceStep(TimelineSet(), 0,
                          {Comm(0, 0, {"a", "b"}), Comm(0, 0, {"c", "d"})}, p)
                  .status()
                  .message(),
              HasSubstr("duplicate"));
  auto s = AdvanceStep(TimelineSet(), 3, {}, p);
  EXPECT_FALSE(AdvanceStep(*s, 2, {}, p).ok());
  p.alpha = 0;
  EXPECT_FALSE(AdvanceStep(TimelineSet(), 0, {}, p).ok());
}

std::vector<StepCommunity> RandomCommunities(Rng& rng, int steps) {
  std::vector<StepCommunity> out;
  for (int t = 0; t < steps; ++t) {
    const int n = static_cast<int>(rng.UniformInt(4));
    for (int id = 0; id < n; ++id) {
      std::vector<EntityRef> m;
      for (int i = 0; i < 15; ++i) {
        if (rng.Bernoulli(0.3)) m.push_back(EntityRef::Account(absl::StrCat(i)));
      }
      if (m.size() < 2) m = {EntityRef::Account("0"), EntityRef::Account("1")};
      std::sort(m.begin(), m.end());
      out.push_back({t, id, m});
    }
  }
  return out;
}

TEST(TrackAllTest, EveryCommunityObservedExactlyOnceAndDeterministic) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    auto cs = RandomCommunities(rng, 8);
    auto a = TrackAll(cs, 8, TrackingParams());
    ASSERT_TRUE(a.ok()) << a.status();
    std::multiset<std::pair<int, int>> seen;
    for (const Timeline& tl : a->timelines) {
      EXPECT_EQ(tl.events.front().type, LifecycleType::kBirth);
      int prev = -1;
      for (const auto& o : tl.observations) {
        EXPECT_GT(o.step, prev);
        prev = o.step;
        seen.insert({o.step, o.id});
      }
    }
    std::multiset<std::pair<int, int>> all;
    for (const auto& c : cs) all.insert({c.step, c.id});
    EXPECT_EQ(seen, all);
    EXPECT_EQ(*TrackAll(cs, 8, TrackingParams()), *a);
  }
}

TEST(ExtractPersistentTest, ActivityNotMatchingDecides) {
  // Timeline 0 is unmatched at step 1 but its members keep posting.
  std::vector<Window> windows = {{0, kDay0, kDay0 + 14 * kDay},
                                 {1, kDay0 + 7 * kDay, kDay0 + 21 * kDay},
                                 {2, kDay0 + 14 * kDay, kDay0 + 28 * kDay}};
  std::vector<StepCommunity> cs = {Comm(0, 0, {"a", "b"}),
                                   Comm(0, 1, {"c", "d"}),
                                   Comm(2, 0, {"a", "b"}),
                                   Comm(2, 1, {"c", "d"})};
  auto state = TrackAll(cs, 3, TrackingParams());
  ASSERT_TRUE(state.ok());
  ASSERT_EQ(state->timelines.size(), 2u);
  EXPECT_EQ(state->timelines[0].events[1].type, LifecycleType::kAbsent);
  EventLog log = {
      Ev("1", "a", kDay0 + 1),            // window 0
      Ev("2", "b", kDay0 + 15 * kDay),    // windows 1 and 2
      Ev("3", "c", kDay0 + 1),            // window 0
      Ev("4", "d", kDay0 + 22 * kDay),    // window 2 only
  };
  auto persistent = ExtractPersistent(*state, log, windows);
  ASSERT_EQ(persistent.size(), 1u);
  EXPECT_EQ(persistent[0].id, 0);
}

TEST(ExportTest, JsonlRoundTripAndTables) {
  Rng rng(5);
  auto cs = RandomCommunities(rng, 6);
  TimelineSet s = *TrackAll(cs, 6, TrackingParams());
  auto back = TimelineSetFromJsonl(TimelineSetJsonl(s, "d1"));
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(back->config_digest, "d1");
  EXPECT_EQ(back->state, s);

  TimelineSet m;
  m = *AdvanceStep(m, 0, {Comm(0, 0, {"a", "b", "c"}), Comm(0, 1, {"d", "e"})},
                   TrackingParams());
  m = *AdvanceStep(m, 1, {Comm(1, 0, {"a", "b", "c", "d", "e"})},
                   TrackingParams());
  m = *AdvanceStep(m, 2, {}, TrackingParams());
  EXPECT_EQ(TimelinesTsv(m, "d"),
            "#config_digest=d\n"
            "timeline_id\tstep\tcommunity_id_or_ABSENT\tevent_type\t"
            "member_count\n"
            "0\t0\t0\tbirth\t3\n"
            "0\t1\t0\tmerge(from=1)\t5\n"
            "0\t2\tABSENT\tabsent\t0\n"
            "1\t0\t1\tbirth\t2\n");
  EXPECT_EQ(TimelineGridTsv(m, "d"),
            "#config_digest=d\n"
            "timeline_id\tt0\tt1\tt2\n"
            "0\t0\t0\tABSENT\n"
            "1\t1\tMERGED\tMERGED\n");
}

TEST(TrackingParamsTest, Validation) {
  TrackingParams p;
  EXPECT_TRUE(ValidateTrackingParams(p).ok());
  p.alpha = 1.0;
  EXPECT_TRUE(ValidateTrackingParams(p).ok());
  p.alpha = 1.1;
  EXPECT_FALSE(ValidateTrackingParams(p).ok());
  p = TrackingParams();
  p.match_threshold = -0.1;
  EXPECT_FALSE(ValidateTrackingParams(p).ok());
}

}  // namespace
}  // namespace dyncom
