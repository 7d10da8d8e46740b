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

// Phrase tables: induction from mapped embeddings, extraction from aligned
// bitext, Moses text IO.

#ifndef UMTX_PTABLE_HPP_
#define UMTX_PTABLE_HPP_

#include <map>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "umtx/aligner.hpp"
#include "umtx/phrasevec.hpp"

namespace umtx::ptable {

enum class Provenance { kUnsupervised, kExtracted };

struct Candidate {
  std::string tgt;
  double fwd = 0.0;  // p(t|s)
  double bwd = 0.0;  // p(s|t)
  bool has_lex = false;
  double lex_fwd = 0.0;  // lex(t|s)
  double lex_bwd = 0.0;  // lex(s|t)
};

class PhraseTable {
 public:
  Provenance provenance = Provenance::kUnsupervised;
  // Candidates per source phrase, best forward probability first.
  std::map<std::string, std::vector<Candidate>> entries;

  const std::vector<Candidate>* Find(const std::string& src) const;
  std::size_t NumPairs() const;
  // Longest source phrase, in tokens.
  int MaxSourceLength() const;
};

struct InduceOptions {
  std::size_t k = 100;
  double temperature = 0.1;
  // Normalize the softmax over the whole target vocabulary instead of the k
  // retained candidates.
  bool softmax_full_vocab = false;
  int workers = 1;
};

// Softmax of cos/temperature, numerically stabilized.
std::vector<double> Softmax(const std::vector<double>& cosines, double temperature);

// Both matrices must already live in the shared space. Every target row is a
// candidate regardless of its n-gram order.
PhraseTable InduceUnsupervised(const phrasevec::EmbeddingMatrix& src, const phrasevec::EmbeddingMatrix& tgt,
                               const InduceOptions& options = {});

struct PhraseSpan {
  int s_begin = 0, s_end = 0;  // [begin, end)
  int t_begin = 0, t_end = 0;

  bool operator<(const PhraseSpan& o) const {
    return std::tie(s_begin, s_end, t_begin, t_end) < std::tie(o.s_begin, o.s_end, o.t_begin, o.t_end);
  }
  bool operator==(const PhraseSpan& o) const {
    return s_begin == o.s_begin && s_end == o.s_end && t_begin == o.t_begin && t_end == o.t_end;
  }
};

// Boxes consistent with the alignment, both sides at most max_len tokens,
// target side extended over unaligned boundary words. Sorted.
std::vector<PhraseSpan> ExtractPhrases(int src_len, int tgt_len, const align::Alignment& a, int max_len = 3);

struct ExtractedPhrase {
  std::string src;
  std::string tgt;
  double lex_fwd = -1.0;  // negative: not available
  double lex_bwd = -1.0;
};

// Relative-frequency scoring over phrase-pair occurrences. Lexical weights,
// when present, keep the largest value seen for a pair.
PhraseTable ScoreExtracted(const std::vector<ExtractedPhrase>& pairs);

// Word translation probabilities w(t|s), w(s|t) from aligned bitext, with
// unaligned words paired to NULL.
class LexicalTable {
 public:
  static LexicalTable FromBitext(const align::Bitext& bitext, const std::vector<align::Alignment>& alignments);
  double Fwd(const std::string& s, const std::string& t) const;  // w(t|s)
  double Bwd(const std::string& s, const std::string& t) const;  // w(s|t)
  static constexpr char kNull[] = "NULL";

 private:
  std::map<std::pair<std::string, std::string>, double> fwd_, bwd_;
};

// Lexical weight lex(t|s) for one extracted box.
double LexicalWeight(const Tokens& src, const Tokens& tgt, const align::Alignment& a, const PhraseSpan& box,
                     const LexicalTable& lex, bool forward);

// Extraction plus scoring, with lexical weights.
PhraseTable BuildExtractedTable(const align::Bitext& bitext, const std::vector<align::Alignment>& alignments,
                                int max_len = 3, int workers = 1);

// "src ||| tgt ||| p1 p2 [p3 p4]". Paths ending in .gz are gzip-compressed.
void WriteMoses(const PhraseTable& table, const std::string& path);
PhraseTable ReadMoses(const std::string& path);
std::string MosesText(const PhraseTable& table);

}  // namespace umtx::ptable

#endif  // UMTX_PTABLE_HPP_
