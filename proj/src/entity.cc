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

#include "dyncom/entity.h"

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"

namespace dyncom {

absl::string_view KindName(EntityKind kind) {
  switch (kind) {
    case EntityKind::kAccount:
      return "account";
    case EntityKind::kVideoChannel:
      return "video_channel";
    case EntityKind::kSocialProfile:
      return "social_profile";
    case EntityKind::kWebsite:
      return "website";
  }
  return "unknown";
}

absl::StatusOr<EntityKind> ParseKind(absl::string_view name) {
  if (name == "account") return EntityKind::kAccount;
  if (name == "video_channel") return EntityKind::kVideoChannel;
  if (name == "social_profile") return EntityKind::kSocialProfile;
  if (name == "website") return EntityKind::kWebsite;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown entity kind '", name, "'"));
}

std::string ToString(const EntityRef& e) {
  return absl::StrCat(KindName(e.kind), ":", e.id);
}

}  // namespace dyncom
