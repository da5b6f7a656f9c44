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

#ifndef DYNCOM_ENTITY_H_
#define DYNCOM_ENTITY_H_

#include <compare>
#include <string>
#include <utility>

#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace dyncom {

// Node types of the heterogeneous interaction network. Everything other than
// kAccount is an "external" node.
enum class EntityKind { kAccount = 0, kVideoChannel, kSocialProfile, kWebsite };

absl::string_view KindName(EntityKind kind);
absl::StatusOr<EntityKind> ParseKind(absl::string_view name);

inline bool IsExternal(EntityKind kind) { return kind != EntityKind::kAccount; }

// Typed node identity. Identity is (kind, id); `resolved` only carries
// whether a video URL was mapped onto its channel and does not take part in
// comparisons.
struct EntityRef {
  EntityKind kind = EntityKind::kAccount;
  std::string id;
  bool resolved = true;

  static EntityRef Account(std::string id) {
    return {EntityKind::kAccount, std::move(id), true};
  }
  static EntityRef Website(std::string domain) {
    return {EntityKind::kWebsite, std::move(domain), true};
  }
  static EntityRef SocialProfile(std::string id) {
    return {EntityKind::kSocialProfile, std::move(id), true};
  }
  static EntityRef VideoChannel(std::string id, bool resolved) {
    return {EntityKind::kVideoChannel, std::move(id), resolved};
  }

  bool external() const { return IsExternal(kind); }

  friend bool operator==(const EntityRef& a, const EntityRef& b) {
    return a.kind == b.kind && a.id == b.id;
  }
  friend std::strong_ordering operator<=>(const EntityRef& a,
                                          const EntityRef& b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    return a.id.compare(b.id) <=> 0;
  }

  template <typename H>
  friend H AbslHashValue(H h, const EntityRef& e) {
    return H::combine(std::move(h), static_cast<int>(e.kind), e.id);
  }
};

// "kind:id", used in log messages and test output.
std::string ToString(const EntityRef& e);

}  // namespace dyncom

#endif  // DYNCOM_ENTITY_H_
