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
#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/textproc.hpp"

using namespace umtx;
using namespace umtx::textproc;

namespace {

Sentence S(const std::string& line, std::size_t idx = 0) { return TokenizeLine(line, idx); }

std::vector<Sentence> Corpus(const std::vector<std::string>& lines) {
  std::vector<Sentence> out;
  for (std::size_t i = 0; i < lines.size(); ++i) out.push_back(S(lines[i], i));
  return out;
}

// Lines over a fixed alphabet, e.g. "ab" or "xy".
std::vector<std::string> AlphabetLines(Rng* rng, const std::string& alphabet, std::size_t n) {
  std::vector<std::string> lines;
  for (std::size_t i = 0; i < n; ++i) {
    std::string line;
    const std::size_t words = 2 + rng->Below(4);
    for (std::size_t w = 0; w < words; ++w) {
      if (w) line += ' ';
      const std::size_t len = 1 + rng->Below(5);
      for (std::size_t c = 0; c < len; ++c) line += alphabet[rng->Below(alphabet.size())];
    }
    lines.push_back(line);
  }
  return lines;
}

}  // namespace

TEST_SUITE("textproc") {
  TEST_CASE("tokenize peels punctuation") {
    CHECK(Tokenize("Hello, world.") == Tokens{"Hello", ",", "world", "."});
    CHECK(Tokenize("").empty());
    CHECK(Tokenize("   \t ").empty());
    // Reference output of the Moses tokenizer on the same string.
    CHECK(Tokenize("a-b c") == Tokens{"a-b", "c"});
    CHECK(Tokenize("„Ahoj“ řekl.") == Tokens{"„", "Ahoj", "“", "řekl", "."});
    CHECK(Tokenize("x y") == Tokens{"x", "y"});
  }

  TEST_CASE("tokenize is idempotent after joining") {
    Rng rng(11);
    const std::vector<std::string> pieces = {"a", "Bb", ",", ".", "\"", "(", ")", "x-y", "ž", "1.5", "?!", " ", "  "};
    for (int trial = 0; trial < 500; ++trial) {
      std::string line;
      const std::size_t n = rng.Below(12);
      for (std::size_t i = 0; i < n; ++i) line += pieces[rng.Below(pieces.size())];
      const Tokens once = Tokenize(line);
      CHECK(Tokenize(JoinTokens(once)) == once);
    }
  }

  TEST_CASE("truecaser majority casing away from sentence start") {
    auto m = TrainTruecaser(Corpus({"Die Katze .", "die Katze ."}));
    REQUIRE(m.Find("katze"));
    CHECK(m.Find("katze")->casing == "Katze");

    m = TrainTruecaser(Corpus({"x Bank", "x Bank", "x Bank", "x bank"}));
    CHECK(m.Find("bank")->casing == "Bank");
    CHECK(m.Find("BANK")->casing == "Bank");
  }

  TEST_CASE("truecaser falls back to initial counts") {
    // "Zebra" only ever starts a sentence: 2x "Zebra", 1x "zebra". Hand count.
    auto m = TrainTruecaser(Corpus({"Zebra a .", "Zebra b .", "zebra c .", "a Apple .", "b c ."}));
    REQUIRE(m.Find("zebra"));
    CHECK(m.Find("zebra")->casing == "Zebra");
    CHECK(m.Find("zebra")->count == 2);
    // "a" is seen mid-sentence once ("b c ." has none); mid counts win.
    CHECK(m.Find("a")->casing == "a");
    CHECK(m.Find("apple")->casing == "Apple");
  }

  TEST_CASE("apply truecase touches only the first token") {
    TruecaseModel m;
    m.Set("die", {"die", 5});
    m.Set("katze", {"Katze", 5});
    CHECK(ApplyTruecase(S("Die Katze"), m).tokens == Tokens{"die", "Katze"});
    CHECK(ApplyTruecase(S("Unknown katze"), m).tokens == Tokens{"Unknown", "katze"});
    Rng rng(3);
    const std::vector<std::string> vocab = {"Die", "die", "KATZE", "katze", "Hund"};
    for (int i = 0; i < 200; ++i) {
      Sentence s{testing::RandomSentence(&rng, vocab, 1, 6), 0};
      auto t = ApplyTruecase(s, m);
      REQUIRE(t.tokens.size() == s.tokens.size());
      for (std::size_t k = 1; k < s.tokens.size(); ++k) CHECK(t.tokens[k] == s.tokens[k]);
    }
  }

  TEST_CASE("truecase model round trip") {
    testing::TempDir dir;
    auto m = TrainTruecaser(Corpus({"Die Katze .", "x Bank ."}));
    m.Save(dir / "tc.tsv");
    auto back = TruecaseModel::Load(dir / "tc.tsv");
    CHECK(back.entries().size() == m.entries().size());
    for (const auto& [k, e] : m.entries()) {
      REQUIRE(back.Find(k));
      CHECK(back.Find(k)->casing == e.casing);
      CHECK(back.Find(k)->count == e.count);
    }
  }

  TEST_CASE("length filter boundaries") {
    auto make = [](std::size_t n) { return Sentence{Tokens(n, "w"), 0}; };
    CHECK_FALSE(KeepByLength(make(2)));
    CHECK(KeepByLength(make(3)));
    CHECK(KeepByLength(make(80)));
    CHECK_FALSE(KeepByLength(make(81)));
    CHECK_FALSE(KeepByLength(make(0)));
  }

  TEST_CASE("langid separates disjoint alphabets") {
    Rng rng(5);
    std::map<std::string, std::vector<Sentence>> train;
    train["A"] = Corpus(AlphabetLines(&rng, "abcde", 50));
    train["B"] = Corpus(AlphabetLines(&rng, "vwxyz", 50));
    const auto m = TrainLangId(train);
    int correct = 0, total = 0;
    for (const auto& line : AlphabetLines(&rng, "abcde", 40)) correct += ClassifyLanguage(S(line), m).label == "A", ++total;
    for (const auto& line : AlphabetLines(&rng, "vwxyz", 40)) correct += ClassifyLanguage(S(line), m).label == "B", ++total;
    CHECK(correct == total);
    for (const auto& [label, _] : m.labels()) CHECK(m.TotalMass(label) == doctest::Approx(1.0).epsilon(1e-9));
  }

  TEST_CASE("langid single sentence per label stays normalized") {
    std::map<std::string, std::vector<Sentence>> train;
    train["cs"] = {S("ahoj")};
    train["sk"] = {S("dobry den")};
    const auto m = TrainLangId(train);
    CHECK(std::fabs(m.TotalMass("cs") - 1.0) < 1e-6);
    CHECK(std::fabs(m.TotalMass("sk") - 1.0) < 1e-6);
  }

  TEST_CASE("langid posterior matches a hand-written naive Bayes") {
    std::map<std::string, std::vector<Sentence>> train;
    train["A"] = {S("ab ba"), S("aab")};
    train["B"] = {S("xy")};
    const auto m = TrainLangId(train, 3);
    // Mixed line, both alphabets in equal measure.
    const Sentence probe = S("ab xy");

    std::map<std::string, std::map<std::string, double>> counts;
    std::map<std::string, double> totals;
    std::set<std::string> inventory;
    for (const auto& [label, sents] : train) {
      for (const auto& s : sents) {
        for (const auto& g : CharNgrams(s.tokens, 3)) {
          counts[label][g] += 1;
          totals[label] += 1;
          inventory.insert(g);
        }
      }
    }
    std::map<std::string, double> score;
    for (const auto& [label, sents] : train) {
      const double denom = totals[label] + static_cast<double>(inventory.size()) + 1.0;
      double s = std::log(static_cast<double>(sents.size()) / 3.0);
      for (const auto& g : CharNgrams(probe.tokens, 3)) s += std::log((counts[label][g] + 1.0) / denom);
      score[label] = s;
    }
    const auto r = ClassifyLanguage(probe, m);
    const std::string best = score["A"] > score["B"] ? "A" : "B";
    CHECK(r.label == best);
    CHECK(r.margin == doctest::Approx(std::fabs(score["A"] - score["B"])).epsilon(1e-12));
  }

  TEST_CASE("langid empty sentence with uniform priors picks first label") {
    std::map<std::string, std::vector<Sentence>> train;
    train["b"] = {S("xyz")};
    train["a"] = {S("abc")};
    const auto m = TrainLangId(train, 3);
    // Padding alone forms no trigram, so only the priors speak.
    const auto r = ClassifyLanguage(Sentence{}, m);
    CHECK(r.label == "a");
    CHECK(r.margin == 0.0);
  }

  TEST_CASE("langid model round trip") {
    testing::TempDir dir;
    std::map<std::string, std::vector<Sentence>> train;
    train["A"] = {S("ab ba")};
    train["B"] = {S("xy")};
    const auto m = TrainLangId(train);
    m.Save(dir / "lid.tsv");
    const auto back = LangIdModel::Load(dir / "lid.tsv");
    for (const auto& line : {"ab", "xy yx", "abxy", ""}) {
      CHECK(ClassifyLanguage(S(line), back).label == ClassifyLanguage(S(line), m).label);
      CHECK(ClassifyLanguage(S(line), back).margin == ClassifyLanguage(S(line), m).margin);
    }
  }

  TEST_CASE("preprocess keeps order and filters by language") {
    Rng rng(9);
    std::map<std::string, std::vector<Sentence>> train;
    train["A"] = Corpus(AlphabetLines(&rng, "abcde", 40));
    train["B"] = Corpus(AlphabetLines(&rng, "vwxyz", 40));
    const auto lid = TrainLangId(train);
    std::vector<std::string> raw;
    std::vector<std::string> a_lines;
    for (int i = 0; i < 15; ++i) {
      if (i % 3 == 2) {
        raw.push_back("vwx yzv wxy");
      } else {
        raw.push_back("abc dea bcd " + std::string(1, static_cast<char>('a' + i % 5)));
        a_lines.push_back(raw.back());
      }
    }
    REQUIRE(a_lines.size() == 10);
    PreprocessOptions o;
    o.truecase = false;
    o.keep_lang = "A";
    PreprocessStats stats;
    const auto out = Preprocess(raw, o, nullptr, &lid, &stats);
    REQUIRE(out.size() == 10);
    for (std::size_t i = 0; i < out.size(); ++i) CHECK(JoinTokens(out[i].tokens) == a_lines[i]);
    for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i - 1].line_index < out[i].line_index);
    CHECK(stats.dropped_language == 5);
    CHECK(stats.kept == 10);
  }

  TEST_CASE("preprocess result does not depend on worker count") {
    Rng rng(21);
    auto raw = AlphabetLines(&rng, "abcdeXY", 9000);
    const auto tc = TrainTruecaser(TokenizeCorpus(raw));
    PreprocessOptions o;
    const auto one = Preprocess(raw, o, &tc, nullptr, nullptr);
    o.workers = 4;
    const auto four = Preprocess(raw, o, &tc, nullptr, nullptr);
    REQUIRE(one.size() == four.size());
    for (std::size_t i = 0; i < one.size(); ++i) CHECK(one[i].tokens == four[i].tokens);
  }
}
