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

#include <set>

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/cipher.hpp"
#include "umtx/synthfix.hpp"

using namespace umtx;
using namespace umtx::cipher;

TEST_SUITE("cipher") {
  TEST_CASE("the key is a bijection between disjoint vocabularies") {
    CipherOptions o;
    o.vocab_size = 150;
    const CipherPair pair(o);
    CHECK(pair.key().size() == 150);
    std::set<std::string> values;
    const auto czech = synthfix::DiacriticProfile::Czech();
    for (const auto& [a, b] : pair.key()) {
      values.insert(b);
      CHECK(pair.key().count(b) == 0);
      CHECK(czech.Matches(b));
      CHECK_FALSE(czech.Matches(a));
    }
    CHECK(values.size() == 150);
    CHECK(pair.names().size() == o.names);
  }

  TEST_CASE("sentences and encipherment") {
    CipherOptions o;
    o.vocab_size = 80;
    o.min_len = 3;
    o.max_len = 9;
    const CipherPair pair(o);
    Rng rng(4);
    std::set<std::string> names(pair.names().begin(), pair.names().end());
    for (int i = 0; i < 500; ++i) {
      const auto a = pair.SampleA(&rng);
      CHECK(a.size() >= 3);
      CHECK(a.size() <= 9);
      CHECK((a.back() == "." || a.back() == "?"));
      const auto b = pair.Encipher(a, &rng);
      REQUIRE(b.size() == a.size());
      for (std::size_t k = 0; k < a.size(); ++k) {
        if (names.count(a[k]) || a[k] == "," || a[k] == "." || a[k] == "?" || std::isdigit(a[k][0])) {
          CHECK(b[k] == a[k]);
        } else {
          CHECK(b[k] != a[k]);
        }
      }
      auto lower = a;
      for (auto& w : lower) w = ToLower(w);
      auto back = pair.Decipher(b);
      for (auto& w : back) w = ToLower(w);
      CHECK(back == lower);
    }
  }

  TEST_CASE("reordering keeps the gold permutation") {
    CipherOptions o;
    o.vocab_size = 60;
    o.reorder_rate = 0.5;
    const CipherPair pair(o);
    const auto g = GenerateGoldBitext(pair, 300, 9);
    std::size_t moved = 0;
    for (std::size_t i = 0; i < g.bitext.size(); ++i) {
      const auto& [a, b] = std::pair(g.bitext[i].src, g.bitext[i].tgt);
      REQUIRE(g.gold[i].size() == b.size());
      for (const auto& [s, t] : g.gold[i]) {
        CHECK(ToLower(pair.Decipher({b[t]})[0]) == ToLower(a[s]));
        CHECK(std::abs(s - t) <= 1);
        moved += s != t;
      }
    }
    CHECK(moved > 0);
  }

  TEST_CASE("corpus generation is seeded and splits are independent") {
    CipherOptions o;
    o.vocab_size = 50;
    const CipherPair pair(o);
    const auto c = GenerateCorpus(pair, 200, 20, 20, 3);
    const auto d = GenerateCorpus(pair, 200, 20, 20, 3);
    CHECK(c.mono_a == d.mono_a);
    CHECK(c.mono_b == d.mono_b);
    CHECK(c.dev_b == d.dev_b);
    CHECK(GenerateCorpus(pair, 200, 20, 20, 4).mono_a != c.mono_a);
    CHECK(c.mono_a.size() == 200);
    CHECK(c.test_b.size() == 20);
    for (std::size_t i = 0; i < c.dev_a.size(); ++i) {
      CHECK(Join(pair.Encipher(SplitWhitespace(c.dev_a[i]), nullptr), " ") == c.dev_b[i]);
    }
    // The monolingual B side enciphers a separate stream.
    std::set<std::string> deciphered;
    for (const auto& s : c.mono_b) deciphered.insert(Join(pair.Decipher(SplitWhitespace(s)), " "));
    std::size_t shared = 0;
    for (const auto& s : c.mono_a) {
      auto t = SplitWhitespace(s);
      t[0] = ToLower(t[0]);
      shared += deciphered.count(Join(t, " "));
    }
    CHECK(shared < 20);
  }

  TEST_CASE("options are validated") {
    CipherOptions o;
    o.vocab_size = 1;
    CHECK_THROWS_AS(CipherPair{o}, Error);
    o = {};
    o.min_len = 5;
    o.max_len = 4;
    CHECK_THROWS_AS(CipherPair{o}, Error);
    o = {};
    o.reorder_rate = 1.5;
    CHECK_THROWS_AS(CipherPair{o}, Error);
  }
}
