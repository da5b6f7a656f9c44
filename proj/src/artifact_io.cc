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

#include "dyncom/artifact_io.h"

#include <openssl/evp.h>

#include <fstream>
#include <sstream>
#include <system_error>

#include "absl/strings/escaping.h"
#include "absl/strings/match.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "absl/strings/ascii.h"
#include "absl/strings/strip.h"

namespace dyncom {
namespace fs = std::filesystem;

namespace {
constexpr absl::string_view kDigestPrefix = "#config_digest=";
constexpr char kTempSuffix[] = ".partial";
}  // namespace

std::string Sha256Hex(absl::string_view data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr);
  return absl::BytesToHexString(
      absl::string_view(reinterpret_cast<const char*>(md), len));
}

absl::StatusOr<std::string> ReadFileToString(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", p.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

namespace {

absl::Status WriteRaw(const fs::path& path, absl::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::PermissionDeniedError(
        absl::StrCat("cannot write ", path.string()));
  }
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  out.close();
  if (!out) {
    return absl::DataLossError(absl::StrCat("short write to ", path.string()));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status WriteFileAtomic(const fs::path& path, absl::string_view contents) {
  fs::path tmp = path;
  tmp += kTempSuffix;
  if (absl::Status s = WriteRaw(tmp, contents); !s.ok()) {
    std::error_code ec;
    fs::remove(tmp, ec);
    return s;
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    return absl::PermissionDeniedError(
        absl::StrCat("cannot rename into ", path.string()));
  }
  return absl::OkStatus();
}

void FileBatch::Add(std::string relative_path, std::string contents) {
  files_.emplace_back(std::move(relative_path), std::move(contents));
}

absl::StatusOr<std::vector<ManifestEntry>> FileBatch::Commit() {
  std::vector<fs::path> temps;
  auto cleanup = [&temps] {
    std::error_code ec;
    for (const fs::path& t : temps) fs::remove(t, ec);
  };
  std::vector<ManifestEntry> manifest;
  for (const auto& [rel, contents] : files_) {
    fs::path target = root_ / rel;
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
    if (ec) {
      cleanup();
      return absl::PermissionDeniedError(absl::StrCat(
          "cannot create directory ", target.parent_path().string()));
    }
    fs::path tmp = target;
    tmp += kTempSuffix;
    temps.push_back(tmp);
    if (absl::Status s = WriteRaw(tmp, contents); !s.ok()) {
      cleanup();
      return s;
    }
    manifest.push_back({rel, Sha256Hex(contents), contents.size()});
  }
  for (size_t i = 0; i < files_.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], root_ / files_[i].first, ec);
    if (ec) {
      cleanup();
      return absl::PermissionDeniedError(
          absl::StrCat("cannot publish ", (root_ / files_[i].first).string()));
    }
  }
  files_.clear();
  return manifest;
}

std::string DigestLine(absl::string_view config_digest) {
  return absl::StrCat(kDigestPrefix, config_digest, "\n");
}

int TsvTable::Column(absl::string_view name) const {
  for (size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

absl::StatusOr<TsvTable> ParseTsv(absl::string_view text,
                                  const std::vector<std::string>& required) {
  TsvTable table;
  bool have_header = false;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    absl::ConsumeSuffix(&line, "\r");
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (absl::ConsumePrefix(&line, kDigestPrefix)) {
        table.config_digest = std::string(line);
      }
      continue;
    }
    std::vector<std::string> fields = absl::StrSplit(line, '\t');
    if (!have_header) {
      table.header = std::move(fields);
      have_header = true;
      for (size_t i = 0; i < required.size(); ++i) {
        if (i >= table.header.size() || table.header[i] != required[i]) {
          return absl::InvalidArgumentError(
              absl::StrCat("expected header starting with '",
                           absl::StrJoin(required, "\\t"), "'"));
        }
      }
      continue;
    }
    if (fields.size() != table.header.size()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected ", table.header.size(),
                       " fields, found ", fields.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  if (!have_header) return absl::InvalidArgumentError("table has no header");
  return table;
}

absl::StatusOr<TsvTable> ReadTsvFile(const fs::path& path,
                                     const std::vector<std::string>& required) {
  auto text = ReadFileToString(path);
  if (!text.ok()) return text.status();
  auto table = ParseTsv(*text, required);
  if (!table.ok()) {
    return absl::Status(
        table.status().code(),
        absl::StrCat(path.string(), ": ", table.status().message()));
  }
  return table;
}

absl::StatusOr<std::map<std::string, std::string>> ParseKeyValues(
    absl::string_view text) {
  std::map<std::string, std::string> out;
  size_t line_no = 0;
  for (absl::string_view line : absl::StrSplit(text, '\n')) {
    ++line_no;
    line = absl::StripAsciiWhitespace(line);
    if (line.empty() || line.front() == '#') continue;
    size_t eq = line.find('=');
    if (eq == absl::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": expected key=value"));
    }
    std::string key(absl::StripAsciiWhitespace(line.substr(0, eq)));
    std::string value(absl::StripAsciiWhitespace(line.substr(eq + 1)));
    if (key.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": empty key"));
    }
    if (!out.emplace(key, std::move(value)).second) {
      return absl::InvalidArgumentError(
          absl::StrCat("line ", line_no, ": duplicate key '", key, "'"));
    }
  }
  return out;
}

std::string FormatDouble(double v) { return absl::StrFormat("%.17g", v); }

}  // namespace dyncom
