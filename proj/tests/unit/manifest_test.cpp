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

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/common.hpp"
#include "umtx/manifest.hpp"

using namespace umtx;

namespace {

PipelineManifest Sample() {
  PipelineManifest m;
  RunRecord run;
  run.config_text = "#umtx-config v1\n\n[global]\nseed = 1\n";
  StageRecord s;
  s.name = "embed.a";
  s.status = "ran";
  s.config_hash = "abc123";
  s.inputs = {{"prep/mono.a", "00ff"}};
  s.outputs = {{"emb/a.vec", "1234"}, {"/abs/path with space", "5678"}};
  s.metrics = {{"vocab", "773"}, {"note", "two words"}};
  s.wall_seconds = 1.25;
  run.stages.push_back(s);
  StageRecord f;
  f.name = "map";
  f.status = "failed";
  f.config_hash = "def";
  f.error = "map: no seed pairs";
  run.stages.push_back(f);
  m.runs.push_back(run);
  RunRecord second = run;
  second.stages[0].status = "reused";
  second.stages[0].wall_seconds.reset();
  second.stages.pop_back();
  m.runs.push_back(second);
  return m;
}

}  // namespace

TEST_SUITE("manifest") {
  TEST_CASE("text round trip") {
    const auto m = Sample();
    const auto text = m.ToText();
    CHECK(text.rfind(std::string(PipelineManifest::kHeader) + "\n", 0) == 0);
    const auto back = PipelineManifest::Parse(text);
    CHECK(back.ToText() == text);
    REQUIRE(back.runs.size() == 2);
    CHECK(back.runs[0].config_text == m.runs[0].config_text);
    const auto& s = back.runs[0].stages[0];
    CHECK(s.outputs == m.runs[0].stages[0].outputs);
    CHECK(*s.Metric("note") == "two words");
    CHECK(s.Metric("missing") == nullptr);
    CHECK(*s.wall_seconds == 1.25);
    CHECK_FALSE(back.runs[1].stages[0].wall_seconds.has_value());
    CHECK(back.runs[0].stages[1].error == "map: no seed pairs");
  }

  TEST_CASE("latest successful record") {
    const auto m = Sample();
    CHECK(m.Latest("embed.a")->status == "reused");
    CHECK(m.Latest("map") == nullptr);
    CHECK(m.Latest("lm.a") == nullptr);
  }

  TEST_CASE("malformed text is rejected") {
    CHECK_THROWS_AS(PipelineManifest::Parse("run 1\n"), Error);
    CHECK_THROWS_AS(PipelineManifest::Parse("#umtx-manifest v1\nstage x\nend\n"), Error);
    CHECK_THROWS_AS(PipelineManifest::Parse("#umtx-manifest v1\nrun 1\nstage x\nbogus 1\nend\n"), Error);
    CHECK_THROWS_AS(PipelineManifest::Parse("#umtx-manifest v1\nrun 1\nstage x\nstatus ran\n"), Error);
    CHECK_THROWS_AS(PipelineManifest::Parse("#umtx-manifest v1\nrun 1\nconfig-begin\n| a\n"), Error);
    CHECK(PipelineManifest::Parse("").runs.empty());
  }

  TEST_CASE("save and load") {
    testing::TempDir dir;
    CHECK(PipelineManifest::Load(dir / "none.txt").runs.empty());
    Sample().Save(dir / "m.txt");
    CHECK(PipelineManifest::Load(dir / "m.txt").ToText() == Sample().ToText());
  }
}
