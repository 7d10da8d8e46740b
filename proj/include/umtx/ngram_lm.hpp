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

// Interpolated Kneser-Ney n-gram language model with ARPA text IO.

#ifndef UMTX_NGRAM_LM_HPP_
#define UMTX_NGRAM_LM_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "umtx/common.hpp"

namespace umtx::lm {

using WordId = std::uint32_t;
constexpr int kMaxOrder = 8;

inline constexpr char kBos[] = "<s>";
inline constexpr char kEos[] = "</s>";
inline constexpr char kUnk[] = "<unk>";

class Vocabulary {
 public:
  Vocabulary();
  WordId Intern(const std::string& w);
  // Returns the <unk> id for unknown words.
  WordId Lookup(const std::string& w) const;
  bool Contains(const std::string& w) const { return ids_.count(w) != 0; }
  const std::string& Word(WordId id) const { return words_[id]; }
  std::size_t size() const { return words_.size(); }

  WordId bos() const { return 0; }
  WordId eos() const { return 1; }
  WordId unk() const { return 2; }

 private:
  std::unordered_map<std::string, WordId> ids_;
  std::vector<std::string> words_;
};

struct NgramKey {
  std::array<WordId, kMaxOrder> w{};
  std::uint8_t n = 0;

  bool operator==(const NgramKey& o) const {
    if (n != o.n) return false;
    for (int i = 0; i < n; ++i) {
      if (w[i] != o.w[i]) return false;
    }
    return true;
  }
  // Drops the oldest word.
  NgramKey Suffix() const;
  // Drops the newest word.
  NgramKey Prefix() const;
};

struct NgramKeyHash {
  std::size_t operator()(const NgramKey& k) const {
    std::uint64_t h = 0x9E3779B97F4A7C15ULL ^ k.n;
    for (int i = 0; i < k.n; ++i) {
      h ^= k.w[i] + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h * 0xff51afd7ed558ccdULL);
  }
};

template <typename V>
using NgramMap = std::unordered_map<NgramKey, V, NgramKeyHash>;

// Raw n-gram counts for orders 1..order. Each sentence is padded with
// order-1 copies of <s> and one </s>; n-grams whose last word is <s> are not
// counted (<s> is never predicted).
struct NgramCounts {
  int order = 0;
  Vocabulary vocab;
  std::vector<NgramMap<std::uint64_t>> by_order;  // index k-1 holds k-grams

  std::uint64_t Count(const std::vector<std::string>& ngram) const;
};

NgramCounts CountNgrams(const std::vector<Tokens>& corpus, int order);
void AddToCounts(const Tokens& sentence, NgramCounts* counts);

struct ArpaEntry {
  double log10_prob = 0.0;
  double log10_backoff = 0.0;
  bool has_backoff = false;
};

class ArpaLM {
 public:
  int order() const { return order_; }
  const Vocabulary& vocab() const { return vocab_; }
  const std::vector<double>& discounts() const { return discounts_; }

  // log10 P(w | context) with standard backoff; context is oldest-first and
  // may be longer than order-1 (only the tail is used).
  double LogProb(const WordId* context, int context_len, WordId w) const;
  double LogProb(const std::vector<std::string>& context, const std::string& w) const;

  // Sum of log10 conditionals over the words and </s>, with order-1 <s> as
  // initial history; unknown words are scored as <unk>.
  double ScoreSentence(const Tokens& s) const;
  double ScoreIds(const std::vector<WordId>& ids, bool include_eos) const;

  // Probabilities of every predictable word (vocabulary minus <s>) after the
  // given context, summed in probability space.
  double ContextMass(const std::vector<WordId>& context) const;

  const ArpaEntry* Find(const NgramKey& k) const;
  const std::vector<NgramMap<ArpaEntry>>& tables() const { return tables_; }

  void WriteArpa(const std::string& path) const;
  std::string ArpaText() const;
  static ArpaLM ReadArpa(const std::string& path);

  // Builds a model directly from entries (used by tests and readers).
  static ArpaLM FromTables(int order, Vocabulary vocab, std::vector<NgramMap<ArpaEntry>> tables);

 private:
  friend ArpaLM EstimateKneserNey(const NgramCounts& counts);
  int order_ = 0;
  Vocabulary vocab_;
  std::vector<NgramMap<ArpaEntry>> tables_;
  std::vector<double> discounts_;
};

// Interpolated Kneser-Ney with one discount per order, D = n1 / (n1 + 2 n2)
// over the (continuation-adjusted) counts of that order. <unk> receives the
// unigram interpolation mass.
ArpaLM EstimateKneserNey(const NgramCounts& counts);

ArpaLM TrainLm(const std::vector<Tokens>& corpus, int order);

struct PerplexityResult {
  double perplexity = 0.0;
  double total_log10 = 0.0;
  std::size_t predicted_tokens = 0;
};

// 10^(-total log10 / predicted), counting </s> but not <s>.
PerplexityResult Perplexity(const ArpaLM& lm, const std::vector<Tokens>& corpus);

}  // namespace umtx::lm

#endif  // UMTX_NGRAM_LM_HPP_
