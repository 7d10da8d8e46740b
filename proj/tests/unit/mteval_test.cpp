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

#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/mteval.hpp"

using namespace umtx;
using namespace umtx::mteval;

namespace {

Tokens T(const std::string& s) { return SplitWhitespace(s); }

std::vector<Tokens> Load(const std::string& path) {
  std::vector<Tokens> out;
  for (const auto& line : ReadLines(path)) out.push_back(SplitWhitespace(line));
  return out;
}

std::vector<Tokens> RandomCorpus(Rng* rng, std::size_t n) {
  const auto words = testing::Letters(5);
  std::vector<Tokens> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(testing::RandomSentence(rng, words, 4, 12));
  return out;
}

}  // namespace

TEST_SUITE("mteval") {
  TEST_CASE("hand example with brevity penalty") {
    const auto r = CorpusBleu({T("the cat sat")}, {T("the cat sat down")});
    CHECK(r.precisions[0] == 1.0);
    CHECK(r.precisions[1] == 1.0);
    CHECK(r.precisions[2] == 1.0);
    CHECK(r.effective_order == 3);
    CHECK(r.brevity_penalty == doctest::Approx(std::exp(1.0 - 4.0 / 3.0)));
    CHECK(r.bleu == doctest::Approx(100.0 * std::exp(1.0 - 4.0 / 3.0)));
    CHECK(r.hyp_len == 3);
    CHECK(r.ref_len == 4);
  }

  TEST_CASE("clipped counts") {
    const auto s = ComputeStats(T("the the the the"), T("the cat on the mat"));
    CHECK(s.match[0] == 2);
    CHECK(s.total[0] == 4);
    CHECK(s.match[1] == 0);
    CHECK(s.total[3] == 1);
    CHECK(BleuScore(s) == 0.0);
    const auto u = ComputeStats(T("The Cat"), T("the cat"), false);
    CHECK(u.match[0] == 2);
    CHECK(ComputeStats(T("The Cat"), T("the cat")).match[0] == 0);
  }

  TEST_CASE("agrees with reference scores") {
    for (const std::string name : {"corpus1", "corpus2", "corpus3", "corpus4"}) {
      const std::string base = std::string(UMTX_FIXTURE_DIR) + "/bleu/" + name;
      std::istringstream in(ReadFile(base + ".score"));
      double expected = 0;
      std::string casing;
      in >> expected >> casing;
      const auto r = CorpusBleu(Load(base + ".hyp"), Load(base + ".ref"), casing == "cased");
      CHECK(std::fabs(r.bleu - expected) < 1e-5);
      CHECK(std::fabs(r.bleu - expected) < 0.1);
    }
  }

  TEST_CASE("identity, bounds and invariances") {
    Rng rng(9);
    for (int trial = 0; trial < 100; ++trial) {
      const auto refs = RandomCorpus(&rng, 1 + rng.Below(20));
      const auto hyps = RandomCorpus(&rng, refs.size());
      CHECK(CorpusBleu(refs, refs).bleu == doctest::Approx(100.0));
      const auto r = CorpusBleu(hyps, refs);
      CHECK(r.bleu >= 0.0);
      CHECK(r.bleu <= 100.0);
      for (double p : r.precisions) CHECK((p >= 0.0 && p <= 1.0));
      CHECK(r.brevity_penalty <= 1.0);

      // Sentence order does not matter.
      std::vector<std::size_t> order(refs.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      rng.Shuffle(&order);
      std::vector<Tokens> ph, pr;
      for (auto i : order) ph.push_back(hyps[i]), pr.push_back(refs[i]);
      CHECK(CorpusBleu(ph, pr).bleu == doctest::Approx(r.bleu).epsilon(1e-12));

      // Duplicating the corpus leaves every ratio unchanged.
      auto dh = hyps, dr = refs;
      dh.insert(dh.end(), hyps.begin(), hyps.end());
      dr.insert(dr.end(), refs.begin(), refs.end());
      CHECK(CorpusBleu(dh, dr).bleu == doctest::Approx(r.bleu).epsilon(1e-12));

      // Statistics add up.
      BleuStats sum;
      for (std::size_t i = 0; i < refs.size(); ++i) sum += ComputeStats(hyps[i], refs[i]);
      CHECK(BleuScore(sum) == r.bleu);
    }
  }

  TEST_CASE("more correct sentences raise the score") {
    Rng rng(10);
    const auto refs = RandomCorpus(&rng, 30);
    auto hyps = RandomCorpus(&rng, 30);
    double last = CorpusBleu(hyps, refs).bleu;
    for (std::size_t i = 0; i < hyps.size(); ++i) {
      hyps[i] = refs[i];
      const double now = CorpusBleu(hyps, refs).bleu;
      CHECK(now >= last - 1e-9);
      last = now;
    }
    CHECK(last == doctest::Approx(100.0));
  }

  TEST_CASE("sentence bleu smoothing") {
    CHECK(SentenceBleu(T("a b c d"), T("a b c d")) == doctest::Approx(100.0));
    CHECK(SentenceBleu({}, T("a")) == 0.0);
    CHECK(SentenceBleu(T("x y"), T("a b")) == 0.0);
    // p1 = 2/2, p2 = (0 + 1) / (1 + 1).
    CHECK(SentenceBleu(T("a c"), T("c a")) == doctest::Approx(100.0 * std::sqrt(0.5)));
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
      const auto h = RandomCorpus(&rng, 1)[0], r = RandomCorpus(&rng, 1)[0];
      const double s = SentenceBleu(h, r);
      CHECK((s >= 0.0 && s <= 100.0));
      CHECK(s >= CorpusBleu({h}, {r}).bleu - 1e-9);
    }
  }

  TEST_CASE("errors and report") {
    CHECK_THROWS_AS(CorpusBleu({T("a")}, {}), Error);
    CHECK_THROWS_AS(CorpusBleu({}, {}), Error);
    const auto r = CorpusBleu({{}}, {T("a")});
    CHECK(r.bleu == 0.0);
    const auto text = FormatReport(CorpusBleu({T("a b")}, {T("a b")}));
    CHECK(text.rfind("bleu=100\n", 0) == 0);
    CHECK(text.find("effective_order=2\n") != std::string::npos);
    CHECK(text.find("not_computed=TER,BEER,CharacTER\n") != std::string::npos);
  }
}
