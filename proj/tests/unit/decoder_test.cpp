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

#include <cmath>
#include <functional>
#include <map>

#include "doctest.h"
#include "decoder_oracle.hpp"
#include "test_util.hpp"
#include "umtx/decoder.hpp"

using namespace umtx;
using namespace umtx::decoder;
using ptable::Candidate;
using ptable::PhraseTable;
using testing::Dot;
using testing::Enumerate;
using testing::RandomInstance;

TEST_SUITE("decoder") {
  TEST_CASE("a single full-sentence phrase is the translation") {
    PhraseTable t;
    t.entries["a b c"] = {{"x y", 1.0, 1.0}};
    const auto lm = lm::TrainLm({{"x", "y"}, {"y", "x"}}, 1);
    const Decoder d(t, lm);
    DecodeParams p;
    p.distortion_limit = 0;
    const auto out = d.Decode({"a", "b", "c"}, {}, p);
    REQUIRE(out.size() == 1);
    CHECK(out[0].text == "x y");
    REQUIRE(out[0].steps.size() == 1);
    CHECK(out[0].steps[0].src_end == 3);
  }

  TEST_CASE("empty source gives an empty translation") {
    PhraseTable t;
    t.entries["a"] = {{"x", 1.0, 1.0}};
    const auto lm = lm::TrainLm({{"x"}}, 2);
    const auto out = Decoder(t, lm).Decode({}, {}, {});
    REQUIRE(out.size() == 1);
    CHECK(out[0].text.empty());
    CHECK(out[0].score == 0.0);
  }

  TEST_CASE("unknown words are copied with the floor probability") {
    PhraseTable t;
    t.entries["a"] = {{"x", 0.5, 0.5}};
    const auto lm = lm::TrainLm({{"x"}}, 2);
    const auto out = Decoder(t, lm).Decode({"a", "zz"}, {}, {});
    CHECK(out[0].text == "x zz");
    CHECK(out[0].steps[1].unknown);
    CHECK(out[0].features[kFwd] == doctest::Approx(std::log(0.5) + std::log(1e-7)));
    CHECK(out[0].features[kWordPenalty] == -2);
  }

  TEST_CASE("best translation equals the exhaustive oracle") {
    Rng rng(101);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const auto in = RandomInstance(&rng);
      ModelOptions mo;
      mo.table_limit = 1 + static_cast<int>(rng.Below(3));
      const Decoder d(in.table, in.lm, mo);
      DecodeParams p;
      p.beam_size = 1000000;
      p.distortion_limit = in.dl;
      p.nbest_n = 5;
      const auto oracle = Enumerate(in, mo);
      REQUIRE_FALSE(oracle.empty());
      std::map<std::string, double> best_by_text;
      double best = -1e300;
      for (const auto& o : oracle) {
        const double s = Dot(in.w, o.f);
        best = std::max(best, s);
        auto it = best_by_text.find(o.text);
        if (it == best_by_text.end() || s > it->second) best_by_text[o.text] = s;
      }
      const auto out = d.Decode(in.src, in.w, p);
      REQUIRE_FALSE(out.empty());
      CHECK(std::fabs(out[0].score - best) < 1e-9);
      for (std::size_t i = 0; i < out.size(); ++i) {
        CHECK(std::fabs(out[i].score - in.w.Score(out[i].features)) < 1e-9);
        REQUIRE(best_by_text.count(out[i].text));
        CHECK(out[i].score <= best_by_text[out[i].text] + 1e-9);
        if (i) CHECK(out[i - 1].score >= out[i].score);
        for (std::size_t j = 0; j < i; ++j) CHECK(out[j].text != out[i].text);
      }
      // The n-best head is the single best.
      DecodeParams one = p;
      one.nbest_n = 1;
      const auto single = d.Decode(in.src, in.w, one);
      CHECK(single[0].text == out[0].text);
      CHECK(single[0].score == out[0].score);
      ++checked;
    }
    CHECK(checked >= 200);
  }

  TEST_CASE("monotone decoding keeps source order") {
    Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
      auto in = RandomInstance(&rng);
      DecodeParams p;
      p.distortion_limit = 0;
      p.beam_size = 10;
      p.nbest_n = 3;
      for (const auto& t : Decoder(in.table, in.lm).Decode(in.src, in.w, p)) {
        int prev = 0;
        for (const auto& s : t.steps) {
          CHECK(s.src_begin == prev);
          prev = s.src_end;
        }
        CHECK(prev == static_cast<int>(in.src.size()));
        CHECK(t.features[kDistortion] == 0.0);
      }
    }
  }

  TEST_CASE("small beams still return a complete consistent hypothesis") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
      auto in = RandomInstance(&rng);
      DecodeParams p;
      p.beam_size = 1;
      p.distortion_limit = in.dl;
      const auto out = Decoder(in.table, in.lm).Decode(in.src, in.w, p);
      REQUIRE(out.size() == 1);
      std::vector<int> seen(in.src.size(), 0);
      for (const auto& s : out[0].steps)
        for (int i = s.src_begin; i < s.src_end; ++i) seen[i]++;
      for (int c : seen) CHECK(c == 1);
      CHECK(std::fabs(out[0].score - in.w.Score(out[0].features)) < 1e-9);
    }
  }

  TEST_CASE("corpus decoding ignores the worker count") {
    Rng rng(5);
    auto in = RandomInstance(&rng);
    const Decoder d(in.table, in.lm);
    std::vector<Tokens> corpus(40, in.src);
    for (auto& s : corpus) rng.Shuffle(&s);
    DecodeParams p;
    p.nbest_n = 3;
    const auto one = d.DecodeCorpus(corpus, in.w, p, 1);
    const auto three = d.DecodeCorpus(corpus, in.w, p, 3);
    CHECK(FormatNBest(one) == FormatNBest(three));
  }

  TEST_CASE("weights text and n-best format") {
    FeatureWeights w;
    w.w = {0.1, 0.2, 0.3, -0.4, 0.5, 0.6};
    const auto back = FeatureWeights::FromText(w.ToText());
    CHECK(back.w == w.w);
    CHECK_THROWS_AS(FeatureWeights::FromText("nope=1\n"), Error);
    CHECK_THROWS_AS(FeatureWeights::FromText("lm=abc\n"), Error);

    Translation t;
    t.text = "x y";
    t.features = {1, 2, 3, 4, 5, 6};
    t.score = 7;
    CHECK(FormatNBest({{t}}) == "0 ||| x y ||| 1 2 3 4 5 6 ||| 7\n");

    Translation p;
    p.steps = {{0, 2, 0, 1, false}};
    CHECK(PhraseAlignment(p) == align::Alignment{{0, 0}, {1, 0}});
  }
}
