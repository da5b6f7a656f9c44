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

#ifndef DYNCOM_ARTIFACT_IO_H_
#define DYNCOM_ARTIFACT_IO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"

namespace dyncom {

// Lowercase hex SHA-256.
std::string Sha256Hex(absl::string_view data);

absl::StatusOr<std::string> ReadFileToString(const std::filesystem::path& p);

// Writes to a sibling temporary file and renames it over `path`.
absl::Status WriteFileAtomic(const std::filesystem::path& path,
                             absl::string_view contents);

struct ManifestEntry {
  std::string path;  // relative to the batch root
  std::string sha256;
  uint64_t bytes = 0;
};

// A set of files published together: every file is first written to a
// temporary name, and only once all writes succeeded are they renamed into
// place. On failure the temporaries are removed and nothing is replaced.
class FileBatch {
 public:
  explicit FileBatch(std::filesystem::path root) : root_(std::move(root)) {}

  void Add(std::string relative_path, std::string contents);
  absl::StatusOr<std::vector<ManifestEntry>> Commit();

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::vector<std::pair<std::string, std::string>> files_;
};

// Tables carry the digest of the configuration that produced them on a
// leading "#config_digest=<hex>" line, followed by a header row.
std::string DigestLine(absl::string_view config_digest);

struct TsvTable {
  std::string config_digest;  // empty when the table has none
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  // Column index by name, -1 when absent.
  int Column(absl::string_view name) const;
};

// Parses a tab-separated table. Lines starting with '#' are comments except
// for the digest line. Rows must have as many fields as the header, and the
// header must start with `required_columns`.
absl::StatusOr<TsvTable> ParseTsv(absl::string_view text,
                                  const std::vector<std::string>& required);
absl::StatusOr<TsvTable> ReadTsvFile(const std::filesystem::path& path,
                                     const std::vector<std::string>& required);

// Flat "key=value" text; blank lines and '#' comments are skipped, keys
// and values are trimmed. Duplicate keys are an error.
absl::StatusOr<std::map<std::string, std::string>> ParseKeyValues(
    absl::string_view text);

// Doubles are written with enough digits to round-trip exactly.
std::string FormatDouble(double v);

}  // namespace dyncom

#endif  // DYNCOM_ARTIFACT_IO_H_
