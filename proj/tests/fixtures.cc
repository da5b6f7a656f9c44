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

#include "fixtures.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <unistd.h>

#include "absl/strings/str_cat.h"

namespace dyncom::testing {

EventRecord Ev(std::string id, std::string author, UnixSeconds t,
               std::vector<std::string> mentioned,
               std::optional<std::string> reshare_of,
               std::vector<std::string> urls) {
  EventRecord e;
  e.event_id = std::move(id);
  e.author = std::move(author);
  e.timestamp = t;
  e.mentioned = std::move(mentioned);
  e.reshare_of = std::move(reshare_of);
  e.urls = std::move(urls);
  return e;
}

Window FirstWindow() { return Window{0, kDay0, kDay0 + 14 * kDay}; }

std::vector<EntityRef> Accounts(std::initializer_list<const char*> ids) {
  std::vector<EntityRef> out;
  for (const char* id : ids) out.push_back(EntityRef::Account(id));
  std::sort(out.begin(), out.end());
  return out;
}

StepCommunity Comm(int step, int id, std::initializer_list<const char*> ids) {
  return StepCommunity{step, id, Accounts(ids)};
}

namespace {

const std::vector<std::string>& UrlPool() {
  static const auto* pool = new std::vector<std::string>{
      "http://www.site-a.org/news/1",
      "https://site-a.org/about?x=1",
      "http://blog.site-b.co.uk/post",
      "http://site-c.com/",
      "https://www.youtube.com/watch?v=vid1",
      "http://youtu.be/vid2",
      "https://www.youtube.com/watch?v=vid3&t=10",
      "https://www.youtube.com/channel/UCchan9",
      "https://www.facebook.com/partypage",
      "https://facebook.com/groups/localgroup",
      "http://www.facebook.com/profile.php?id=4242",
      "https://twitter.com/acct1/status/99",
      "https://twitter.com/Acct4/status/12",
  };
  return *pool;
}

}  // namespace

Resolver RandomLogResolver() {
  Resolver r;
  r.AddVideoChannel("vid1", "chanA");
  r.AddVideoChannel("vid2", "chanA");
  return r;
}

EventLog RandomLog(Rng& rng, const Window& window, int max_accounts,
                   int max_events) {
  const int accounts = 2 + static_cast<int>(rng.UniformInt(max_accounts - 1));
  const int events = 1 + static_cast<int>(rng.UniformInt(max_events));
  auto account = [&] { return absl::StrCat("acct", rng.UniformInt(accounts)); };
  const auto& pool = UrlPool();
  EventLog log;
  for (int i = 0; i < events; ++i) {
    EventRecord e;
    e.event_id = absl::StrCat("e", i);
    e.author = account();
    e.timestamp = window.start + static_cast<UnixSeconds>(rng.UniformInt(
                                     window.end - window.start));
    const int mentions = static_cast<int>(rng.UniformInt(3));
    std::set<std::string> seen;
    for (int m = 0; m < mentions; ++m) {
      std::string a = account();
      if (seen.insert(a).second) e.mentioned.push_back(a);
    }
    if (rng.Bernoulli(0.3)) e.reshare_of = account();
    const int urls = static_cast<int>(rng.UniformInt(4));
    for (int u = 0; u < urls; ++u) {
      e.urls.push_back(pool[rng.UniformInt(pool.size())]);
    }
    if (!e.urls.empty() && rng.Bernoulli(0.2)) e.urls.push_back(e.urls[0]);
    log.push_back(std::move(e));
  }
  std::stable_sort(log.begin(), log.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     return a.timestamp < b.timestamp;
                   });
  return log;
}

std::map<EdgeKey, double> BruteForceEdges(const EventLog& log,
                                          const Window& window,
                                          const Resolver& resolver, double k) {
  std::vector<const EventRecord*> evs;
  for (const EventRecord& e : log) {
    if (e.timestamp >= window.start && e.timestamp < window.end) {
      evs.push_back(&e);
    }
  }
  // Per post: the accounts it interacts with, and the external entities it
  // links to.
  std::vector<std::set<std::string>> others(evs.size());
  std::vector<std::set<EntityRef>> externals(evs.size());
  for (size_t i = 0; i < evs.size(); ++i) {
    const EventRecord& e = *evs[i];
    for (const auto& m : e.mentioned) others[i].insert(m);
    if (e.reshare_of) others[i].insert(*e.reshare_of);
    for (const auto& url : e.urls) {
      std::optional<EntityRef> ref = ClassifyUrl(url, resolver);
      if (!ref) continue;
      if (ref->kind == EntityKind::kAccount) {
        others[i].insert(ref->id);
      } else {
        externals[i].insert(*ref);
      }
    }
    others[i].erase(e.author);
  }

  std::map<EdgeKey, double> out;
  auto pmi = [](double n_ab, double n_a, double n_b, double n) {
    return std::log(1.0 + (n_ab / n) / ((n_a / n) * (n_b / n)));
  };

  // Mention/reshare: probabilities over all interactions.
  std::set<std::string> accounts;
  double total = 0;
  for (size_t i = 0; i < evs.size(); ++i) {
    total += others[i].size();
    if (!others[i].empty()) accounts.insert(evs[i]->author);
    accounts.insert(others[i].begin(), others[i].end());
  }
  for (const std::string& a : accounts) {
    for (const std::string& b : accounts) {
      if (!(a < b)) continue;
      double n_ab = 0, n_a = 0, n_b = 0;
      for (size_t i = 0; i < evs.size(); ++i) {
        for (const std::string& o : others[i]) {
          const std::string& au = evs[i]->author;
          if ((au == a && o == b) || (au == b && o == a)) ++n_ab;
          if (au == a || o == a) ++n_a;
          if (au == b || o == b) ++n_b;
        }
      }
      if (n_ab > 0) {
        out[{EntityRef::Account(a), EntityRef::Account(b),
             EdgeTag::kMentionReshare}] = pmi(n_ab, n_a, n_b, total);
      }
    }
  }

  // Account-external: probabilities over posts with an external URL.
  double url_posts = 0;
  std::set<EntityRef> entities;
  std::set<std::string> url_accounts;
  for (size_t i = 0; i < evs.size(); ++i) {
    if (externals[i].empty()) continue;
    ++url_posts;
    url_accounts.insert(evs[i]->author);
    entities.insert(externals[i].begin(), externals[i].end());
  }
  auto posters = [&](const EntityRef& x) {
    std::set<std::string> s;
    for (size_t i = 0; i < evs.size(); ++i) {
      if (externals[i].count(x)) s.insert(evs[i]->author);
    }
    return s;
  };
  std::set<EntityRef> kept;
  for (const EntityRef& x : entities) {
    if (x.kind == EntityKind::kSocialProfile || posters(x).size() >= 2) {
      kept.insert(x);
    }
  }
  for (const std::string& a : url_accounts) {
    for (const EntityRef& x : kept) {
      double n_ab = 0, n_a = 0, n_b = 0;
      for (size_t i = 0; i < evs.size(); ++i) {
        if (externals[i].empty()) continue;
        const bool by_a = evs[i]->author == a;
        const bool has_x = externals[i].count(x) > 0;
        n_ab += by_a && has_x;
        n_a += by_a;
        n_b += has_x;
      }
      if (n_ab > 0) {
        out[{EntityRef::Account(a), x, EdgeTag::kAccountExternal}] =
            pmi(n_ab, n_a, n_b, url_posts);
      }
    }
  }

  // Inferred external-external: probabilities over accounts posting URLs.
  std::map<EdgeKey, double> inferred;
  const double n_accounts = url_accounts.size();
  for (const EntityRef& x : kept) {
    for (const EntityRef& y : kept) {
      if (!(x < y)) continue;
      const auto px = posters(x), py = posters(y);
      double both = 0;
      for (const auto& a : px) both += py.count(a);
      if (both > 0) {
        inferred[{x, y, EdgeTag::kInferredExternal}] =
            pmi(both, px.size(), py.size(), n_accounts);
      }
    }
  }
  if (!inferred.empty()) {
    double mean = 0;
    for (const auto& [key, w] : inferred) mean += w;
    mean /= inferred.size();
    double var = 0;
    for (const auto& [key, w] : inferred) var += (w - mean) * (w - mean);
    const double threshold = mean + k * std::sqrt(var / inferred.size());
    for (const auto& [key, w] : inferred) {
      if (k < 0 || w >= threshold - 1e-12 * std::max(1.0, threshold)) {
        out[key] = w;
      }
    }
  }
  return out;
}

std::map<EdgeKey, double> NetworkEdges(const StepNetwork& net) {
  std::map<EdgeKey, double> out;
  for (const StepEdge& e : net.edges) {
    out[{net.nodes[e.source], net.nodes[e.target], e.tag}] = e.weight;
  }
  return out;
}

WeightedGraph PlantedTwoBlock(uint64_t seed, int n, double p_in,
                              double p_out) {
  Rng rng(seed);
  WeightedGraph g(n);
  for (int u = 0; u < n; ++u) {
    for (int v = u + 1; v < n; ++v) {
      const bool same = (u < n / 2) == (v < n / 2);
      if (rng.Bernoulli(same ? p_in : p_out)) g.AddEdge(u, v, 1.0);
    }
  }
  return g;
}

Partition PlantedTwoBlockTruth(int n) {
  Partition p(2);
  for (int u = 0; u < n; ++u) p[u < n / 2 ? 0 : 1].push_back(u);
  return p;
}

WeightedGraph TwoCliques(int size, double bridge) {
  WeightedGraph g(2 * size);
  for (int block = 0; block < 2; ++block) {
    for (int u = 0; u < size; ++u) {
      for (int v = u + 1; v < size; ++v) {
        g.AddEdge(block * size + u, block * size + v, 1.0);
      }
    }
  }
  g.AddEdge(size - 1, size, bridge);
  return g;
}

std::filesystem::path TempDir(const std::string& tag) {
  static int counter = 0;
  std::filesystem::path p =
      std::filesystem::temp_directory_path() /
      absl::StrCat("dyncom_", tag, "_", ::getpid(), "_", counter++);
  std::filesystem::remove_all(p);
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace dyncom::testing
