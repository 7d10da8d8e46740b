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

// Corpus ingestion: tokenization, truecasing, length and language filtering.

#ifndef UMTX_TEXTPROC_HPP_
#define UMTX_TEXTPROC_HPP_

#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "umtx/common.hpp"

namespace umtx::textproc {

struct Sentence {
  Tokens tokens;
  std::size_t line_index = 0;
};

// Splits on Unicode whitespace, then peels leading and trailing punctuation
// characters off each chunk as single-character tokens.
Tokens Tokenize(std::string_view raw_line);
Sentence TokenizeLine(std::string_view raw_line, std::size_t line_index);

class TruecaseModel {
 public:
  struct Entry {
    std::string casing;
    std::uint64_t count = 0;
  };

  // Returns nullptr when the lowercased form was never observed.
  const Entry* Find(std::string_view word) const;
  void Set(const std::string& lower, Entry e);
  const std::map<std::string, Entry>& entries() const { return entries_; }

  // Versioned TSV: header line, then "word\tCasing\tcount".
  void Save(const std::string& path) const;
  static TruecaseModel Load(const std::string& path);

 private:
  std::map<std::string, Entry> entries_;
};

// Majority casing per lowercased word, counted away from sentence-initial
// position; words seen only sentence-initially fall back to those counts.
TruecaseModel TrainTruecaser(const std::vector<Sentence>& corpus);
Sentence ApplyTruecase(const Sentence& s, const TruecaseModel& m);

struct LengthLimits {
  std::size_t min_tokens = 3;
  std::size_t max_tokens = 80;
};

inline bool KeepByLength(const Sentence& s, const LengthLimits& lim = {}) {
  return s.tokens.size() >= lim.min_tokens && s.tokens.size() <= lim.max_tokens;
}

// Multinomial Naive Bayes over character n-grams with add-one smoothing.
// Each label's distribution covers the shared n-gram inventory plus one
// bucket for unseen n-grams, so it sums to one.
class LangIdModel {
 public:
  struct Label {
    double log_prior = 0.0;
    double log_unseen = 0.0;
    std::unordered_map<std::string, double> log_prob;
  };

  int order() const { return order_; }
  const std::map<std::string, Label>& labels() const { return labels_; }

  // Sum over inventory plus unseen bucket, in probability space.
  double TotalMass(const std::string& label) const;

  void Save(const std::string& path) const;
  static LangIdModel Load(const std::string& path);

 private:
  friend LangIdModel TrainLangId(const std::map<std::string, std::vector<Sentence>>&, int);
  int order_ = 3;
  std::map<std::string, Label> labels_;
};

// Character n-grams of the space-joined sentence padded by one space each side.
std::vector<std::string> CharNgrams(const Tokens& tokens, int order);

LangIdModel TrainLangId(const std::map<std::string, std::vector<Sentence>>& labeled, int ngram_order = 3);

struct LangIdResult {
  std::string label;
  double margin = 0.0;  // best minus second-best log posterior
};

LangIdResult ClassifyLanguage(const Sentence& s, const LangIdModel& m);

struct PreprocessOptions {
  LengthLimits limits;
  bool truecase = true;
  std::string keep_lang;  // empty: no language filter
  int workers = 1;
};

struct PreprocessStats {
  std::size_t input_lines = 0;
  std::size_t dropped_length = 0;
  std::size_t dropped_language = 0;
  std::size_t kept = 0;
};

// tokenize -> truecase -> length filter -> language filter; order preserving.
// The truecaser is applied when `tc` is non-null, the language filter when
// `lid` is non-null and options.keep_lang is set.
std::vector<Sentence> Preprocess(const std::vector<std::string>& raw_lines,
                                 const PreprocessOptions& options,
                                 const TruecaseModel* tc, const LangIdModel* lid,
                                 PreprocessStats* stats);

std::vector<Sentence> TokenizeCorpus(const std::vector<std::string>& raw_lines);
std::string JoinTokens(const Tokens& t);

}  // namespace umtx::textproc

#endif  // UMTX_TEXTPROC_HPP_
