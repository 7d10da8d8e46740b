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
#include "umtx/config.hpp"

using namespace umtx;

TEST_SUITE("config") {
  TEST_CASE("defaults") {
    const PipelineConfig c;
    CHECK(c.Int("embed.window") == 5);
    CHECK(c.Int("embed.dim") == 300);
    CHECK(c.Int("embed.negatives") == 10);
    CHECK(c.Int("embed.epochs") == 5);
    CHECK(c.Int("table.k") == 100);
    CHECK(c.Int("lm.order") == 5);
    CHECK(c.Int("preprocess.min_len") == 3);
    CHECK(c.Int("preprocess.max_len") == 80);
    CHECK(c.Int("synthfix.lev_threshold") == 3);
    CHECK(c.Int("synthfix.reorder_window") == 5);
    CHECK(c.Real("table.temperature") == 0.1);
    CHECK_FALSE(c.Bool("cipher.enabled"));
    CHECK(c.Str("align.symmetrization") == "grow-diag-final-and");
  }

  TEST_CASE("parse sections, comments and quoting") {
    const auto c = PipelineConfig::Parse(
        "# comment\n; another\n[embed]\ndim = 32\n  window=3  \n[data]\nmono_src = \"/tmp/a b\"\n"
        "lm.order = 4\n[tune]\nenabled = no\n");
    CHECK(c.Int("embed.dim") == 32);
    CHECK(c.Int("embed.window") == 3);
    CHECK(c.Str("data.mono_src") == "/tmp/a b");
    CHECK(c.Int("lm.order") == 4);
    CHECK_FALSE(c.Bool("tune.enabled"));
  }

  TEST_CASE("errors carry line numbers") {
    auto message = [](const std::string& text) {
      try {
        PipelineConfig::Parse(text);
      } catch (const Error& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("[embed]\ndimension = 3\n").find("line 2") != std::string::npos);
    CHECK(message("[embed]\ndim = many\n").find("integer") != std::string::npos);
    CHECK(message("dim = 3\n").find("outside") != std::string::npos);
    CHECK(message("[embed\n").find("line 1") != std::string::npos);
    CHECK(message("[embed]\ndim\n").find("key = value") != std::string::npos);
    CHECK(message("[tune]\nenabled = maybe\n").find("true or false") != std::string::npos);
    PipelineConfig c;
    CHECK_THROWS_AS(c.Set("nope.key", "1"), Error);
    CHECK_THROWS_AS(c.Str("nope.key"), Error);
  }

  TEST_CASE("canonical text round trip") {
    PipelineConfig c;
    c.Set("map.tol", "1e-7");
    c.Set("embed.lr", "0.05");
    c.Set("data.gazetteer", "g.tsv");
    const auto text = c.ToText();
    CHECK(text.rfind(std::string(PipelineConfig::kHeader) + "\n", 0) == 0);
    const auto back = PipelineConfig::Parse(text);
    CHECK(back.ToText() == text);
    CHECK(back.Real("map.tol") == 1e-7);
    for (const auto& k : PipelineConfig::Keys()) CHECK(back.Str(k) == c.Str(k));
  }

  TEST_CASE("hash covers only the selected keys") {
    PipelineConfig a, b;
    b.Set("embed.dim", "64");
    CHECK(a.Hash({"embed"}) != b.Hash({"embed"}));
    CHECK(a.Hash({"map", "table"}) == b.Hash({"map", "table"}));
    CHECK(a.Hash({"embed.window"}) == b.Hash({"embed.window"}));
    CHECK(a.Hash({"embed.dim"}) != b.Hash({"embed.dim"}));
    // A selector is a section or a full key, not a prefix of a name.
    CHECK(a.Hash({"embed.di"}) == b.Hash({"embed.di"}));
    b.Set("embed.dim", "300");
    CHECK(a.Hash({"embed"}) == b.Hash({"embed"}));
  }

  TEST_CASE("load from file") {
    testing::TempDir dir;
    WriteFile(dir / "c.ini", "[global]\nseed = 9\n");
    CHECK(PipelineConfig::Load(dir / "c.ini").Int("global.seed") == 9);
    CHECK_THROWS_AS(PipelineConfig::Load(dir / "missing.ini"), Error);
  }
}
