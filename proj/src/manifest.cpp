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

#include "umtx/manifest.hpp"

#include "umtx/common.hpp"

namespace umtx {

const std::string* StageRecord::Metric(const std::string& key) const {
  for (const auto& [k, v] : metrics) {
    if (k == key) return &v;
  }
  return nullptr;
}

std::string PipelineManifest::ToText() const {
  std::string out = std::string(kHeader) + "\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    const auto& run = runs[r];
    out += "\nrun " + std::to_string(r + 1) + "\n";
    out += "config-begin\n";
    std::size_t start = 0;
    const std::string& c = run.config_text;
    while (start < c.size()) {
      std::size_t end = c.find('\n', start);
      if (end == std::string::npos) end = c.size();
      out += "| " + c.substr(start, end - start) + "\n";
      start = end + 1;
    }
    out += "config-end\n";
    for (const auto& s : run.stages) {
      out += "stage " + s.name + "\n";
      out += "status " + s.status + "\n";
      out += "config-hash " + s.config_hash + "\n";
      for (const auto& f : s.inputs) out += "input " + f.digest + " " + f.path + "\n";
      for (const auto& f : s.outputs) out += "output " + f.digest + " " + f.path + "\n";
      for (const auto& [k, v] : s.metrics) out += "metric " + k + " " + v + "\n";
      if (s.wall_seconds) out += "wall " + FormatDouble(*s.wall_seconds) + "\n";
      if (!s.error.empty()) out += "error " + s.error + "\n";
      out += "end\n";
    }
  }
  return out;
}

PipelineManifest PipelineManifest::Parse(const std::string& text) {
  PipelineManifest m;
  std::size_t start = 0, line_no = 0;
  bool header = false, in_config = false;
  StageRecord* stage = nullptr;
  auto fail = [&](const std::string& what) {
    Fail(ErrorKind::kFormat, "manifest line " + std::to_string(line_no) + ": " + what);
  };
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    const std::string line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!header) {
      if (line != kHeader) fail("missing manifest header");
      header = true;
      continue;
    }
    if (in_config) {
      if (line == "config-end") {
        in_config = false;
      } else if (line.rfind("| ", 0) == 0) {
        m.runs.back().config_text += line.substr(2) + "\n";
      } else if (line == "|") {
        m.runs.back().config_text += "\n";
      } else {
        fail("bad config line");
      }
      continue;
    }
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    const std::string tag = line.substr(0, sp);
    const std::string rest = sp == std::string::npos ? "" : line.substr(sp + 1);
    if (stage) {
      if (tag == "end") {
        stage = nullptr;
      } else if (tag == "status") {
        stage->status = rest;
      } else if (tag == "config-hash") {
        stage->config_hash = rest;
      } else if (tag == "input" || tag == "output" || tag == "metric") {
        const auto sp2 = rest.find(' ');
        if (sp2 == std::string::npos) fail("expected two fields");
        if (tag == "metric") {
          stage->metrics.emplace_back(rest.substr(0, sp2), rest.substr(sp2 + 1));
        } else {
          FileDigest f{rest.substr(sp2 + 1), rest.substr(0, sp2)};
          (tag == "input" ? stage->inputs : stage->outputs).push_back(f);
        }
      } else if (tag == "wall") {
        double w;
        if (!ParseDouble(rest, &w)) fail("bad wall time");
        stage->wall_seconds = w;
      } else if (tag == "error") {
        stage->error = rest;
      } else {
        fail("unknown stage field '" + tag + "'");
      }
      continue;
    }
    if (tag == "run") {
      m.runs.emplace_back();
    } else if (tag == "config-begin") {
      if (m.runs.empty()) fail("config outside of a run");
      in_config = true;
    } else if (tag == "stage") {
      if (m.runs.empty()) fail("stage outside of a run");
      m.runs.back().stages.emplace_back();
      stage = &m.runs.back().stages.back();
      stage->name = rest;
    } else {
      fail("unexpected line");
    }
  }
  if (stage || in_config) Fail(ErrorKind::kFormat, "manifest: truncated record");
  return m;
}

PipelineManifest PipelineManifest::Load(const std::string& path) {
  if (!FileExists(path)) return {};
  return Parse(ReadFile(path));
}

void PipelineManifest::Save(const std::string& path) const { WriteFile(path, ToText()); }

const StageRecord* PipelineManifest::Latest(const std::string& name) const {
  for (auto r = runs.rbegin(); r != runs.rend(); ++r) {
    for (auto s = r->stages.rbegin(); s != r->stages.rend(); ++s) {
      if (s->name == name && (s->status == "ran" || s->status == "reused")) return &*s;
    }
  }
  return nullptr;
}

}  // namespace umtx
