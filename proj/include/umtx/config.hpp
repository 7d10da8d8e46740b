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

// Pipeline configuration: "[section]" headers and "key = value" lines,
// addressed as "section.key". Every key has a default; unknown keys fail.

#ifndef UMTX_CONFIG_HPP_
#define UMTX_CONFIG_HPP_

#include <map>
#include <string>
#include <vector>

namespace umtx {

class PipelineConfig {
 public:
  static constexpr char kHeader[] = "#umtx-config v1";

  // All keys at their defaults.
  PipelineConfig();

  static PipelineConfig Parse(const std::string& text);
  static PipelineConfig Load(const std::string& path);

  // Throws on unknown keys or values the key's type rejects.
  void Set(const std::string& key, const std::string& value);
  bool Has(const std::string& key) const { return values_.count(key) != 0; }

  const std::string& Str(const std::string& key) const;
  long long Int(const std::string& key) const;
  double Real(const std::string& key) const;
  bool Bool(const std::string& key) const;

  // Canonical text of every key, grouped by section.
  std::string ToText() const;
  // Digest of the canonical "key = value" lines for keys in the listed
  // sections (whole section "embed" or single key "global.seed").
  std::string Hash(const std::vector<std::string>& selectors) const;

  static const std::vector<std::string>& Keys();

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace umtx

#endif  // UMTX_CONFIG_HPP_
