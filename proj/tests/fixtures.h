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

#ifndef DYNCOM_TESTS_FIXTURES_H_
#define DYNCOM_TESTS_FIXTURES_H_

#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "dyncom/consensus_detect.h"
#include "dyncom/dynamic_track.h"
#include "dyncom/entity.h"
#include "dyncom/event_ingest.h"
#include "dyncom/label_propagation.h"
#include "dyncom/rng.h"
#include "dyncom/window_graph.h"

namespace dyncom::testing {

// 2012-06-01T00:00:00Z.
inline constexpr UnixSeconds kDay0 = 1338508800;
inline constexpr UnixSeconds kDay = 86400;

EventRecord Ev(std::string id, std::string author, UnixSeconds t,
               std::vector<std::string> mentioned = {},
               std::optional<std::string> reshare_of = std::nullopt,
               std::vector<std::string> urls = {});

// The first window of a default spec starting on kDay0.
Window FirstWindow();

std::vector<EntityRef> Accounts(std::initializer_list<const char*> ids);
StepCommunity Comm(int step, int id, std::initializer_list<const char*> ids);

// Random log inside `window`: up to `max_accounts` authors and `max_events`
// posts mixing mentions, reshares and URLs of every platform shape,
// including repeated URLs within a post.
EventLog RandomLog(Rng& rng, const Window& window, int max_accounts,
                   int max_events);
// Resolver knowing some of the video ids RandomLog uses.
Resolver RandomLogResolver();

using EdgeKey = std::tuple<EntityRef, EntityRef, EdgeTag>;

// Expected edges of the step network of `window`, computed by recounting the
// raw events for every candidate pair straight from the probability
// definitions. `k` < 0 disables the inferred-edge filter.
std::map<EdgeKey, double> BruteForceEdges(const EventLog& log,
                                          const Window& window,
                                          const Resolver& resolver, double k);
std::map<EdgeKey, double> NetworkEdges(const StepNetwork& net);

// Two equal blocks; within-block pairs linked with probability p_in,
// cross pairs with p_out, unit weights.
WeightedGraph PlantedTwoBlock(uint64_t seed, int n, double p_in, double p_out);
Partition PlantedTwoBlockTruth(int n);

// Two cliques of `size` nodes joined by a single edge of weight `bridge`.
WeightedGraph TwoCliques(int size, double bridge);

// Fresh empty directory under the system temp dir.
std::filesystem::path TempDir(const std::string& tag);

}  // namespace dyncom::testing

#endif  // DYNCOM_TESTS_FIXTURES_H_
