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

#include "umtx/config.hpp"

#include "umtx/common.hpp"

namespace umtx {

namespace {

enum class Kind { kStr, kInt, kReal, kBool };

struct KeySpec {
  const char* key;
  Kind kind;
  const char* value;
};

// Declaration order is the canonical order.
const std::vector<KeySpec>& Specs() {
  static const std::vector<KeySpec> specs = {
      {"global.seed", Kind::kInt, "1"},
      {"global.workers", Kind::kInt, "1"},
      {"global.record_wall_time", Kind::kBool, "false"},

      {"cipher.enabled", Kind::kBool, "false"},
      {"cipher.seed", Kind::kInt, "7"},
      {"cipher.vocab_size", Kind::kInt, "400"},
      {"cipher.successors", Kind::kInt, "6"},
      {"cipher.names", Kind::kInt, "40"},
      {"cipher.numbers", Kind::kInt, "20"},
      {"cipher.comma_rate", Kind::kReal, "0.04"},
      {"cipher.min_len", Kind::kInt, "4"},
      {"cipher.max_len", Kind::kInt, "14"},
      {"cipher.reorder_rate", Kind::kReal, "0"},
      {"cipher.mono_size", Kind::kInt, "20000"},
      {"cipher.dev_size", Kind::kInt, "300"},
      {"cipher.test_size", Kind::kInt, "300"},

      {"data.mono_src", Kind::kStr, ""},
      {"data.mono_tgt", Kind::kStr, ""},
      {"data.dev_src", Kind::kStr, ""},
      {"data.dev_tgt", Kind::kStr, ""},
      {"data.test_src", Kind::kStr, ""},
      {"data.test_tgt", Kind::kStr, ""},
      {"data.gazetteer", Kind::kStr, ""},

      {"preprocess.min_len", Kind::kInt, "3"},
      {"preprocess.max_len", Kind::kInt, "80"},
      {"preprocess.truecase", Kind::kBool, "true"},

      {"embed.window", Kind::kInt, "5"},
      {"embed.dim", Kind::kInt, "300"},
      {"embed.negatives", Kind::kInt, "10"},
      {"embed.epochs", Kind::kInt, "5"},
      {"embed.lr", Kind::kReal, "0.025"},
      {"embed.min_lr", Kind::kReal, "0.0001"},
      {"embed.unigrams", Kind::kInt, "200000"},
      {"embed.bigrams", Kind::kInt, "400000"},
      {"embed.trigrams", Kind::kInt, "400000"},

      {"map.seed_dictionary", Kind::kStr, "identical"},
      {"map.seed_size", Kind::kInt, "0"},
      {"map.retrieval", Kind::kStr, "csls"},
      {"map.csls_k", Kind::kInt, "10"},
      {"map.max_iters", Kind::kInt, "50"},
      {"map.tol", Kind::kReal, "0.000001"},

      {"table.k", Kind::kInt, "100"},
      {"table.temperature", Kind::kReal, "0.1"},
      {"table.full_vocab", Kind::kBool, "false"},

      {"lm.order", Kind::kInt, "5"},

      {"align.iterations", Kind::kInt, "5"},
      {"align.lambda", Kind::kReal, "4"},
      {"align.p0", Kind::kReal, "0.08"},
      {"align.symmetrization", Kind::kStr, "grow-diag-final-and"},
      {"align.max_phrase_len", Kind::kInt, "3"},

      {"decode.beam", Kind::kInt, "100"},
      {"decode.distortion_limit", Kind::kInt, "6"},
      {"decode.initial_distortion_limit", Kind::kInt, "0"},
      {"decode.table_limit", Kind::kInt, "20"},
      {"decode.unknown_prob", Kind::kReal, "0.0000001"},

      {"tune.enabled", Kind::kBool, "true"},
      {"tune.mode", Kind::kStr, "authentic"},
      {"tune.rounds", Kind::kInt, "10"},
      {"tune.nbest", Kind::kInt, "100"},
      {"tune.restarts", Kind::kInt, "20"},
      {"tune.min_improvement", Kind::kReal, "0.01"},
      {"tune.synthetic_size", Kind::kInt, "10000"},
      {"tune.max_sentences", Kind::kInt, "0"},

      {"backtrans.iterations", Kind::kInt, "3"},
      {"backtrans.subset", Kind::kInt, "2000000"},
      {"backtrans.divergence_delta", Kind::kReal, "3"},
      {"backtrans.chunk_size", Kind::kInt, "1000"},

      {"synthfix.profile", Kind::kStr, "czech"},
      {"synthfix.unk", Kind::kStr, "unk"},
      {"synthfix.reorder_window", Kind::kInt, "5"},
      {"synthfix.lev_threshold", Kind::kInt, "3"},
      {"synthfix.full_deletion", Kind::kBool, "false"},
      {"synthfix.policy", Kind::kStr, ""},

      {"eval.cased", Kind::kBool, "false"},
  };
  return specs;
}

const KeySpec* FindSpec(const std::string& key) {
  for (const auto& s : Specs()) {
    if (key == s.key) return &s;
  }
  return nullptr;
}

bool ParseBool(std::string_view v, bool* out) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") {
    *out = true;
    return true;
  }
  if (v == "false" || v == "0" || v == "no" || v == "off") {
    *out = false;
    return true;
  }
  return false;
}

}  // namespace

PipelineConfig::PipelineConfig() {
  for (const auto& s : Specs()) Set(s.key, s.value);
}

const std::vector<std::string>& PipelineConfig::Keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& s : Specs()) k.push_back(s.key);
    return k;
  }();
  return keys;
}

void PipelineConfig::Set(const std::string& key, const std::string& value) {
  const KeySpec* spec = FindSpec(key);
  if (!spec) Fail(ErrorKind::kInvalidArgument, "config: unknown key '" + key + "'");
  double d;
  long long i;
  bool b;
  switch (spec->kind) {
    case Kind::kInt:
      if (!ParseInt(value, &i)) Fail(ErrorKind::kInvalidArgument, "config: " + key + " expects an integer");
      values_[key] = std::to_string(i);
      return;
    case Kind::kReal:
      if (!ParseDouble(value, &d)) Fail(ErrorKind::kInvalidArgument, "config: " + key + " expects a number");
      values_[key] = FormatDouble(d);
      return;
    case Kind::kBool:
      if (!ParseBool(value, &b)) Fail(ErrorKind::kInvalidArgument, "config: " + key + " expects true or false");
      values_[key] = b ? "true" : "false";
      return;
    case Kind::kStr:
      if (value.find('\n') != std::string::npos) Fail(ErrorKind::kInvalidArgument, "config: newline in " + key);
      values_[key] = value;
      return;
  }
}

PipelineConfig PipelineConfig::Parse(const std::string& text) {
  PipelineConfig c;
  std::string section;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line = Trim(std::string_view(text).substr(start, end - start));
    start = end + 1;
    ++line_no;
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') Fail(ErrorKind::kFormat, where + "unterminated section header");
      section = std::string(Trim(line.substr(1, line.size() - 2)));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) Fail(ErrorKind::kFormat, where + "expected key = value");
    std::string key(Trim(line.substr(0, eq)));
    std::string value(Trim(line.substr(eq + 1)));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (key.find('.') == std::string::npos) {
      if (section.empty()) Fail(ErrorKind::kFormat, where + "key outside of a section");
      key = section + "." + key;
    }
    try {
      c.Set(key, value);
    } catch (const Error& e) {
      Fail(e.kind(), where + e.what());
    }
  }
  return c;
}

PipelineConfig PipelineConfig::Load(const std::string& path) { return Parse(ReadFile(path)); }

const std::string& PipelineConfig::Str(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) Fail(ErrorKind::kInvalidArgument, "config: unknown key '" + key + "'");
  return it->second;
}

long long PipelineConfig::Int(const std::string& key) const {
  long long v = 0;
  if (!ParseInt(Str(key), &v)) Fail(ErrorKind::kInvalidArgument, "config: " + key + " is not an integer");
  return v;
}

double PipelineConfig::Real(const std::string& key) const {
  double v = 0;
  if (!ParseDouble(Str(key), &v)) Fail(ErrorKind::kInvalidArgument, "config: " + key + " is not a number");
  return v;
}

bool PipelineConfig::Bool(const std::string& key) const {
  bool v = false;
  if (!ParseBool(Str(key), &v)) Fail(ErrorKind::kInvalidArgument, "config: " + key + " is not a boolean");
  return v;
}

std::string PipelineConfig::ToText() const {
  std::string out = std::string(kHeader) + "\n";
  std::string section;
  for (const auto& s : Specs()) {
    const std::string key = s.key;
    const auto dot = key.find('.');
    if (key.substr(0, dot) != section) {
      section = key.substr(0, dot);
      out += "\n[" + section + "]\n";
    }
    out += key.substr(dot + 1) + " = " + values_.at(key) + "\n";
  }
  return out;
}

std::string PipelineConfig::Hash(const std::vector<std::string>& selectors) const {
  Digest d;
  for (const auto& s : Specs()) {
    const std::string key = s.key;
    bool hit = false;
    for (const auto& sel : selectors) {
      if (sel == key || key.rfind(sel + ".", 0) == 0) hit = true;
    }
    if (!hit) continue;
    d.Update(key);
    d.Update("=");
    d.Update(values_.at(key));
    d.Update("\n");
  }
  return d.Hex();
}

}  // namespace umtx
