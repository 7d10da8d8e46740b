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
#include <filesystem>
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/backtrans.hpp"
#include "umtx/cipher.hpp"

using namespace umtx;
using namespace umtx::backtrans;

namespace {

std::vector<IterationRecord> Records(const std::vector<double>& bleus) {
  std::vector<IterationRecord> out;
  for (std::size_t i = 0; i < bleus.size(); ++i) {
    IterationRecord r;
    r.iteration = static_cast<int>(i);
    r.dev_bleu = bleus[i];
    out.push_back(r);
  }
  return out;
}

// Word-for-word table: every word maps to itself prefixed with "x".
std::unique_ptr<System> PrefixSystem(std::shared_ptr<const lm::ArpaLM> lm, const std::vector<std::string>& words) {
  ptable::PhraseTable t;
  for (const auto& w : words) t.entries[w] = {{"x" + w, 1.0, 1.0}};
  DecodeSettings s;
  s.params.distortion_limit = 0;
  return std::make_unique<System>(t, std::move(lm), decoder::FeatureWeights{}, s);
}

Tokens Lower(Tokens t) {
  for (auto& w : t) w = ToLower(w);
  return t;
}

// Ambiguous dictionary between the two cipher languages: each word lists its
// true translation and two decoys with random probabilities.
ptable::PhraseTable NoisyDictionary(const std::map<std::string, std::string>& key, Rng* rng) {
  std::vector<std::string> targets;
  for (const auto& [a, b] : key) targets.push_back(b);
  ptable::PhraseTable t;
  for (const auto& [a, b] : key) {
    std::vector<ptable::Candidate> c;
    std::set<std::string> used = {b};
    c.push_back({b, rng->Uniform(), 0});
    while (c.size() < 3) {
      const auto& d = targets[rng->Below(targets.size())];
      if (used.insert(d).second) c.push_back({d, rng->Uniform(), 0});
    }
    double z = 0;
    for (const auto& x : c) z += x.fwd;
    for (auto& x : c) x.fwd /= z, x.bwd = x.fwd;
    std::sort(c.begin(), c.end(), [](const auto& x, const auto& y) { return x.fwd > y.fwd; });
    t.entries[a] = c;
  }
  return t;
}

}  // namespace

TEST_SUITE("backtrans") {
  TEST_CASE("select best on the published synthetic-dev column") {
    const auto r = Records({11.06, 12.92, 14.22, 14.07, 13.67, 14.18, 13.96});
    CHECK(SelectBest(r).iteration == 2);
    CHECK(SelectBest(Records({5.0})).iteration == 0);
    CHECK(SelectBest(Records({3.0, 7.5, 7.5, 1.0})).iteration == 1);
    CHECK_THROWS_AS(SelectBest({}), Error);
  }

  TEST_CASE("divergence guard") {
    // Published authentic-dev column: 9.44, 11.11, 7.26, 1.06.
    const auto r = Records({9.44, 11.11, 7.26, 1.06});
    CHECK(Diverging(r, 3.0));
    CHECK_FALSE(Diverging(Records({9.44, 11.11, 7.26}), 3.0));
    CHECK_FALSE(Diverging(r, 4.0));
    CHECK_FALSE(Diverging(Records({10, 6, 9}), 3.0));
  }

  TEST_CASE("subset sampling") {
    const auto a = SampleSubset(1000, 100, 5);
    CHECK(a == SampleSubset(1000, 100, 5));
    CHECK(a != SampleSubset(1000, 100, 6));
    CHECK(a.size() == 100);
    CHECK(std::is_sorted(a.begin(), a.end()));
    CHECK(std::set<std::size_t>(a.begin(), a.end()).size() == 100);
    CHECK(a.back() < 1000);
    CHECK(SampleSubset(10, 50, 1).size() == 10);
    CHECK(SampleSubset(0, 5, 1).empty());
    // Inclusion frequency is close to uniform.
    std::vector<int> hits(50, 0);
    for (std::uint64_t s = 0; s < 4000; ++s)
      for (auto i : SampleSubset(50, 10, s)) hits[i]++;
    for (int h : hits) CHECK(std::abs(h - 800) < 140);
  }

  TEST_CASE("decipherment accuracy") {
    CHECK(DeciphermentAccuracy({{"a", "b"}, {"c"}}, {{"a", "x"}, {"c"}}) == doctest::Approx(2.0 / 3.0));
    CHECK(DeciphermentAccuracy({{"a"}}, {{"a", "b"}}) == 0.5);
    CHECK(DeciphermentAccuracy({}, {}) == 0.0);
    CHECK_THROWS_AS(DeciphermentAccuracy({{"a"}}, {}), Error);
  }

  TEST_CASE("chunked translation resumes bit-identically") {
    const auto words = testing::Letters(8);
    std::vector<Tokens> lm_corpus;
    for (const auto& w : words) lm_corpus.push_back({"x" + w});
    auto lm = std::make_shared<const lm::ArpaLM>(lm::TrainLm(lm_corpus, 2));
    const auto sys = PrefixSystem(lm, words);
    Rng rng(2);
    std::vector<Tokens> corpus;
    for (int i = 0; i < 47; ++i) corpus.push_back(testing::RandomSentence(&rng, words, 0, 6));

    testing::TempDir one, two;
    const auto full = TranslateFullCorpus(*sys, corpus, one.str(), 10, 1);
    CHECK(full.complete);
    CHECK(full.chunks_total == 5);
    REQUIRE(full.output.size() == corpus.size());
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      REQUIRE(full.output[i].size() == corpus[i].size());
      for (std::size_t k = 0; k < corpus[i].size(); ++k) CHECK(full.output[i][k] == "x" + corpus[i][k]);
    }

    const auto part = TranslateFullCorpus(*sys, corpus, two.str(), 10, 1, 2);
    CHECK_FALSE(part.complete);
    CHECK(part.output.size() == 20);
    const auto rest = TranslateFullCorpus(*sys, corpus, two.str(), 10, 2);
    CHECK(rest.complete);
    CHECK(rest.chunks_reused == 2);
    CHECK(rest.output == full.output);
    for (const auto& e : std::filesystem::directory_iterator(one.str())) {
      const auto name = e.path().filename().string();
      CHECK(ReadFile(e.path().string()) == ReadFile(two / name));
    }

    // A tampered chunk is translated again.
    WriteFile(two / "chunk_000001.txt", "garbage\n");
    const auto again = TranslateFullCorpus(*sys, corpus, two.str(), 10, 1);
    CHECK(again.chunks_reused == 4);
    CHECK(again.output == full.output);
  }

  TEST_CASE("failed lines are copied and counted") {
    auto lm = std::make_shared<const lm::ArpaLM>(lm::TrainLm({{"xa"}}, 2));
    ptable::PhraseTable t;
    t.entries["a"] = {{"xa", 1.0, 1.0}};
    DecodeSettings s;
    s.params.beam_size = 0;  // every decode call fails
    System sys(t, lm, {}, s);
    std::size_t failures = 0;
    const auto out = sys.TranslateAll({{"a"}, {"a", "b"}}, 1, &failures);
    CHECK(failures == 2);
    CHECK(out[1] == Tokens{"a", "b"});
  }

  TEST_CASE("one refinement step improves on the initial system") {
    cipher::CipherOptions co;
    co.vocab_size = 120;
    co.names = 10;
    co.numbers = 5;
    const cipher::CipherPair pair(co);
    Rng rng(17);
    std::vector<Tokens> mono_a, mono_b;
    align::Bitext dev_ba;
    for (int i = 0; i < 3000; ++i) mono_a.push_back(Lower(pair.SampleA(&rng)));
    for (int i = 0; i < 3000; ++i) mono_b.push_back(Lower(pair.Encipher(pair.SampleA(&rng), &rng)));
    for (int i = 0; i < 200; ++i) {
      const auto a = Lower(pair.SampleA(&rng));
      dev_ba.push_back({Lower(pair.Encipher(a, &rng)), a});
    }
    auto lm_a = std::make_shared<const lm::ArpaLM>(lm::TrainLm(mono_a, 3));
    auto lm_b = std::make_shared<const lm::ArpaLM>(lm::TrainLm(mono_b, 3));
    std::map<std::string, std::string> inverse;
    for (const auto& [a, b] : pair.key()) inverse[b] = a;

    DecodeSettings s;
    s.params.beam_size = 10;
    s.params.distortion_limit = 0;
    // Untuned initial weights lean on the dictionary, as an unsupervised
    // system does before any refinement.
    decoder::FeatureWeights untuned;
    untuned.w = {1.0, 0.0, 0.15, 0.0, 0.0, 0.0};
    const System ab(NoisyDictionary(pair.key(), &rng), lm_b, untuned, s);
    const System ba(NoisyDictionary(inverse, &rng), lm_a, untuned, s);
    const double initial = DevBleu(ba, dev_ba, 1);

    TrainOptions o;
    o.tune = false;
    const auto r = RunBtIteration(ab, mono_a, lm_a, {}, dev_ba, {}, s, o);
    CHECK(r.synthetic.size() == mono_a.size());
    CHECK(r.synthetic[0].tgt == mono_a[0]);
    CHECK(r.dev_bleu > initial);
    CHECK_THROWS_AS(RunBtIteration(ab, {}, lm_a, {}, dev_ba, {}, s, o), Error);
  }
}
