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
#include <map>
#include <functional>
#include <set>

#include "doctest.h"
#include "kn_oracle.hpp"
#include "test_util.hpp"
#include "umtx/ngram_lm.hpp"

using namespace umtx;
using namespace umtx::lm;
using testing::Gram;
using testing::KnOracle;

namespace {

std::vector<Tokens> Split(const std::vector<std::string>& lines) {
  std::vector<Tokens> out;
  for (const auto& l : lines) out.push_back(SplitWhitespace(l));
  return out;
}

std::vector<Tokens> RandomCorpus(Rng* rng, std::size_t vocab, std::size_t n) {
  const auto words = testing::Letters(vocab);
  std::vector<Tokens> c;
  for (std::size_t i = 0; i < n; ++i) c.push_back(testing::RandomSentence(rng, words, 0, 7));
  return c;
}

// Sentences following a fixed successor chain with occasional noise.
std::vector<Tokens> ChainCorpus(Rng* rng, std::size_t n) {
  const auto words = testing::Letters(12);
  std::vector<Tokens> c;
  for (std::size_t i = 0; i < n; ++i) {
    Tokens t;
    std::size_t w = rng->Below(12);
    const std::size_t len = 4 + rng->Below(5);
    for (std::size_t k = 0; k < len; ++k) {
      t.push_back(words[w]);
      w = rng->Uniform() < 0.9 ? (w * 5 + 1) % 12 : rng->Below(12);
    }
    c.push_back(t);
  }
  return c;
}

}  // namespace

TEST_SUITE("ngram_lm") {
  TEST_CASE("counts of a short sentence") {
    const auto c = CountNgrams(Split({"a b"}), 2);
    CHECK(c.Count({"<s>", "a"}) == 1);
    CHECK(c.Count({"a", "b"}) == 1);
    CHECK(c.Count({"b", "</s>"}) == 1);
    CHECK(c.by_order[1].size() == 3);
    const auto twice = CountNgrams(Split({"a b", "a b"}), 2);
    for (const auto& [g, n] : c.by_order[1]) CHECK(twice.by_order[1].at(g) == 2 * n);
  }

  TEST_CASE("counts equal a brute-force window count") {
    Rng rng(31);
    for (int trial = 0; trial < 20; ++trial) {
      const int order = 1 + static_cast<int>(rng.Below(4));
      const auto corpus = RandomCorpus(&rng, 6, 15);
      const auto c = CountNgrams(corpus, order);
      std::map<Gram, std::uint64_t> oracle;
      for (const auto& s : corpus) {
        Gram p(order - 1, kBos);
        p.insert(p.end(), s.begin(), s.end());
        p.push_back(kEos);
        for (int k = 1; k <= order; ++k)
          for (std::size_t i = 0; i + k <= p.size(); ++i) {
            Gram g(p.begin() + i, p.begin() + i + k);
            if (g.back() != kBos) oracle[g]++;
          }
      }
      std::size_t total = 0;
      for (const auto& m : c.by_order) total += m.size();
      CHECK(total == oracle.size());
      for (const auto& [g, n] : oracle) CHECK(c.Count(g) == n);
    }
  }

  TEST_CASE("adding a sentence never lowers a count") {
    Rng rng(2);
    auto corpus = RandomCorpus(&rng, 5, 10);
    auto c = CountNgrams(corpus, 3);
    for (int i = 0; i < 20; ++i) {
      auto before = c;
      AddToCounts(testing::RandomSentence(&rng, testing::Letters(5), 0, 6), &c);
      for (int k = 0; k < 3; ++k)
        for (const auto& [g, n] : before.by_order[k]) CHECK(c.by_order[k].at(g) >= n);
    }
  }

  TEST_CASE("hand-computed fixture: corpus 'a a b', order 2") {
    // Continuation counts a=2, b=1, </s>=1: D1 = 2/(2+2) = 0.5, interpolation
    // mass 0.5*3/4 spread over 4 predictable words = 0.09375.
    // P(a) = 1.5/4 + 0.09375 = 0.46875, P(b) = P(</s>) = 0.21875, P(<unk>) = 0.09375.
    // All bigram counts are 1, so D2 = 1 and context "a" (2 tokens, 2 types)
    // hands everything to the unigram: P(a|a) = 0.46875, P(b|a) = 0.21875.
    const auto lm = TrainLm(Split({"a a b"}), 2);
    CHECK(std::fabs(std::pow(10.0, lm.LogProb(Gram{"a"}, "a")) - 0.46875) < 1e-9);
    CHECK(std::fabs(std::pow(10.0, lm.LogProb(Gram{"a"}, "b")) - 0.21875) < 1e-9);
    CHECK(std::fabs(std::pow(10.0, lm.LogProb(Gram{}, "<unk>")) - 0.09375) < 1e-9);
    CHECK(std::fabs(std::pow(10.0, lm.LogProb(Gram{"b"}, "</s>")) - 0.21875) < 1e-9);
    CHECK(lm.discounts()[0] == 0.5);
    CHECK(lm.discounts()[1] == 1.0);
  }

  TEST_CASE("hand-computed fixture: corpus 'a b a', 'a b', order 2") {
    // Bigrams: <s> a:2, a b:2, b a:1, a </s>:1, b </s>:1; n1=3, n2=2, D2 = 3/7.
    // Continuation: a={<s>,b}=2, b={a}=1, </s>={a,b}=2; n1=1, n2=2, D1 = 1/5.
    // Unigram total 5, 3 types: P(b) = 0.8/5 + 0.2*3/5/4 = 0.19.
    // Context a: total 3, types 2, bow = (3/7)*2/3 = 2/7.
    // P(b|a) = (2 - 3/7)/3 + (2/7)*0.19 = 11/21 + 0.38/7.
    const auto lm = TrainLm(Split({"a b a", "a b"}), 2);
    CHECK(std::fabs(lm.discounts()[0] - 0.2) < 1e-15);
    CHECK(std::fabs(lm.discounts()[1] - 3.0 / 7.0) < 1e-15);
    CHECK(std::fabs(std::pow(10.0, lm.LogProb(Gram{}, "b")) - 0.19) < 1e-9);
    CHECK(std::fabs(std::pow(10.0, lm.LogProb(Gram{"a"}, "b")) - (11.0 / 21.0 + 0.38 / 7.0)) < 1e-9);
  }

  TEST_CASE("probabilities equal the recursive oracle") {
    Rng rng(41);
    for (int trial = 0; trial < 12; ++trial) {
      const int order = 2 + static_cast<int>(rng.Below(3));
      const auto corpus = RandomCorpus(&rng, 5 + rng.Below(5), 25);
      const auto lm = TrainLm(corpus, order);
      const KnOracle oracle(corpus, order);
      auto words = std::vector<std::string>(oracle.words().begin(), oracle.words().end());
      words.push_back("never-seen");
      for (int q = 0; q < 200; ++q) {
        Gram h;
        const std::size_t hl = rng.Below(order);
        for (std::size_t i = 0; i < hl; ++i) h.push_back(rng.Below(4) == 0 ? kBos : words[rng.Below(words.size() - 1)]);
        const auto& w = words[rng.Below(words.size())];
        // Histories shorter than order-1 are padded with <s> by both sides.
        Gram padded(order - 1 - std::min<std::size_t>(hl, order - 1), kBos);
        padded.insert(padded.end(), h.begin(), h.end());
        CHECK(std::fabs(std::pow(10.0, lm.LogProb(padded, w)) - oracle.P(padded, w)) < 1e-12);
      }
      for (const auto& s : RandomCorpus(&rng, 8, 20)) CHECK(std::fabs(lm.ScoreSentence(s) - oracle.Score(s)) < 1e-9);
    }
  }

  TEST_CASE("every context is normalized") {
    Rng rng(7);
    for (int order : {2, 3}) {
      const auto corpus = RandomCorpus(&rng, order == 2 ? 48 : 12, 60);
      const auto lm = TrainLm(corpus, order);
      const auto& v = lm.vocab();
      std::vector<WordId> ids;
      for (WordId id = 0; id < v.size(); ++id) ids.push_back(id);
      std::vector<WordId> ctx(static_cast<std::size_t>(order - 1), 0);
      // Every history over the whole vocabulary, <s> included.
      std::function<void(int)> walk = [&](int pos) {
        if (pos == order - 1) {
          CHECK(std::fabs(lm.ContextMass(ctx) - 1.0) < 1e-6);
          return;
        }
        for (WordId id : ids) {
          ctx[pos] = id;
          walk(pos + 1);
        }
      };
      walk(0);
    }
  }

  TEST_CASE("uniform unigram corpus gives equal unigram probabilities") {
    const auto lm = TrainLm(Split({"a b c d e"}), 1);
    const double pa = lm.LogProb(Gram{}, "a");
    for (const char* w : {"b", "c", "d", "e"}) CHECK(lm.LogProb(Gram{}, w) == doctest::Approx(pa).epsilon(1e-12));
  }

  TEST_CASE("empty sentence scores the end symbol") {
    const auto lm = TrainLm(Split({"a b", "b a"}), 3);
    CHECK(lm.ScoreSentence({}) == lm.LogProb(Gram{"<s>", "<s>"}, "</s>"));
  }

  TEST_CASE("training order beats shuffled order") {
    Rng rng(13);
    const auto corpus = ChainCorpus(&rng, 400);
    const auto lm = TrainLm(corpus, 3);
    int wins = 0;
    const auto held = ChainCorpus(&rng, 200);
    std::vector<Tokens> shuffled;
    for (const auto& s : held) {
      Tokens p = s;
      rng.Shuffle(&p);
      shuffled.push_back(p);
      wins += lm.ScoreSentence(s) >= lm.ScoreSentence(p);
    }
    CHECK(wins >= 180);
    CHECK(Perplexity(lm, held).perplexity <= Perplexity(lm, shuffled).perplexity);
    CHECK(Perplexity(lm, corpus).perplexity <= Perplexity(lm, shuffled).perplexity);
  }

  TEST_CASE("perplexity definitions") {
    // Uniform unigram model over V predictable words.
    Vocabulary v;
    for (const char* w : {"a", "b", "c"}) v.Intern(w);
    std::vector<NgramMap<ArpaEntry>> tables(1);
    for (WordId id = 1; id < v.size(); ++id) {
      NgramKey k;
      k.n = 1;
      k.w[0] = id;
      tables[0][k].log10_prob = -std::log10(5.0);
    }
    const auto uniform = ArpaLM::FromTables(1, v, tables);
    CHECK(Perplexity(uniform, Split({"a b c", "c", "b a"})).perplexity == doctest::Approx(5.0).epsilon(1e-12));

    const auto lm = TrainLm(Split({"a b c", "b c a"}), 2);
    const Tokens s = {"a", "b", "c"};
    const auto r = Perplexity(lm, {s});
    CHECK(r.predicted_tokens == 4);
    CHECK(r.perplexity == doctest::Approx(std::pow(10.0, -lm.ScoreSentence(s) / 4.0)).epsilon(1e-12));
  }

  TEST_CASE("arpa round trip") {
    testing::TempDir dir;
    Rng rng(19);
    const auto corpus = RandomCorpus(&rng, 9, 80);
    const auto lm = TrainLm(corpus, 3);
    lm.WriteArpa(dir / "lm.arpa");
    const auto back = ArpaLM::ReadArpa(dir / "lm.arpa");
    CHECK(back.ArpaText() == lm.ArpaText());
    const auto text = ReadFile(dir / "lm.arpa");
    CHECK(text.rfind("\\data\\\n", 0) == 0);
    CHECK(text.find("ngram 3=") != std::string::npos);
    for (const auto& s : RandomCorpus(&rng, 11, 1000)) CHECK(back.ScoreSentence(s) == lm.ScoreSentence(s));
  }

  TEST_CASE("malformed arpa is rejected") {
    testing::TempDir dir;
    WriteFile(dir / "bad.arpa", "\\data\\\nngram 1=2\n\n\\1-grams:\n-1.0\ta\n\\end\\\n");
    CHECK_THROWS_AS(ArpaLM::ReadArpa(dir / "bad.arpa"), Error);
    CHECK_THROWS_AS(ArpaLM::ReadArpa(dir / "missing.arpa"), Error);
  }
}
