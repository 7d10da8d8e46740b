// Copyright 2026 The umtx Authors.
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

// Append-only run manifest. Paths are stored relative to the workspace so
// two workspaces running the same config produce the same bytes.

#ifndef UMTX_MANIFEST_HPP_
#define UMTX_MANIFEST_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace umtx {

struct FileDigest {
  std::string path;  // workspace-relative when inside the workspace
  std::string digest;
  bool operator==(const FileDigest& o) const { return path == o.path && digest == o.digest; }
};

struct StageRecord {
  std::string name;
  std::string status;  // "ran", "reused" or "failed"
  std::string config_hash;
  std::vector<FileDigest> inputs;
  std::vector<FileDigest> outputs;
  std::vector<std::pair<std::string, std::string>> metrics;
  std::optional<double> wall_seconds;
  std::string error;  // failed stages only

  const std::string* Metric(const std::string& key) const;
};

struct RunRecord {
  std::string config_text;
  std::vector<StageRecord> stages;
};

class PipelineManifest {
 public:
  static constexpr char kHeader[] = "#umtx-manifest v1";

  std::vector<RunRecord> runs;

  std::string ToText() const;
  static PipelineManifest Parse(const std::string& text);
  // Missing file: empty manifest.
  static PipelineManifest Load(const std::string& path);
  void Save(const std::string& path) const;

  // Most recent successful record of a stage across all runs.
  const StageRecord* Latest(const std::string& name) const;
};

}  // namespace umtx

#endif  // UMTX_MANIFEST_HPP_
