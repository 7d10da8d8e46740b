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

// Phrase vocabulary (1- to 3-grams) and skip-gram negative-sampling training
// where every vocabulary phrase acts as a center unit predicting the unigram
// contexts around its boundaries.

#ifndef UMTX_PHRASEVEC_HPP_
#define UMTX_PHRASEVEC_HPP_

#include <array>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "umtx/common.hpp"
#include "umtx/textproc.hpp"

namespace umtx::phrasevec {

constexpr int kMaxPhraseOrder = 3;

struct PhraseEntry {
  std::string phrase;  // tokens joined by single spaces
  int order = 1;
  std::uint64_t frequency = 0;
  std::size_t index = 0;
};

class PhraseVocab {
 public:
  using Caps = std::array<std::size_t, kMaxPhraseOrder>;

  std::size_t size() const { return entries_.size(); }
  const std::vector<PhraseEntry>& entries() const { return entries_; }
  const PhraseEntry& operator[](std::size_t i) const { return entries_[i]; }
  // -1 when absent.
  long long Find(const std::string& phrase) const;
  const Caps& caps() const { return caps_; }
  std::size_t CountOrder(int order) const;

  void Save(const std::string& path) const;
  static PhraseVocab Load(const std::string& path);

  // Entries must already satisfy the ordering invariant.
  static PhraseVocab FromEntries(std::vector<PhraseEntry> entries, Caps caps);

 private:
  std::vector<PhraseEntry> entries_;
  std::unordered_map<std::string, std::size_t> lookup_;
  Caps caps_{};
};

// Counts contiguous 1/2/3-grams and keeps the top `caps[n-1]` per order;
// within an order entries sort by descending frequency, then lexicographically.
// Indices are dense: unigrams first, then bigrams, then trigrams.
PhraseVocab BuildPhraseVocab(const std::vector<textproc::Sentence>& corpus,
                             const PhraseVocab::Caps& caps, int workers = 1);

enum class NormState { kRaw, kUnit, kCenteredUnit };

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct EmbeddingMatrix {
  std::vector<std::string> labels;  // phrase per row
  RowMatrix rows;
  NormState norm_state = NormState::kRaw;

  std::size_t size() const { return static_cast<std::size_t>(rows.rows()); }
  int dim() const { return static_cast<int>(rows.cols()); }
  bool AllFinite() const { return rows.allFinite(); }
};

// word2vec text format: "<count> <dim>" header, then one row per line with the
// phrase's tokens joined by '_'. Reading maps '_' back to spaces.
void SaveWord2Vec(const EmbeddingMatrix& m, const std::string& path);
EmbeddingMatrix LoadWord2Vec(const std::string& path);

struct SgnsConfig {
  int window = 5;
  int dim = 300;
  int negatives = 10;
  int epochs = 5;
  double initial_lr = 0.025;
  double min_lr = 1e-4;
  std::uint64_t seed = 1;
  // More than one worker switches to lock-free shared updates; results are
  // then not bit-reproducible.
  int workers = 1;

  // Values used for desk-scale runs.
  static SgnsConfig DeskDefaults();
  void Validate() const;
};

struct SgnsStats {
  std::size_t untrained_entries = 0;  // vocab entries never seen as a center
  std::uint64_t center_occurrences = 0;
  std::vector<bool> finite_per_epoch;
};

EmbeddingMatrix TrainSgns(const std::vector<textproc::Sentence>& corpus, const PhraseVocab& vocab,
                          const SgnsConfig& cfg, SgnsStats* stats = nullptr);

struct Neighbor {
  std::size_t index;
  double cosine;
};

// Top-k rows by cosine to row `query`, excluding the query, descending, ties by
// lower index. k beyond size-1 returns size-1 entries.
std::vector<Neighbor> NearestNeighbors(std::size_t query_index, const EmbeddingMatrix& m, std::size_t k);

// For every row of `queries`, its top-k rows of `keys` by cosine (same ordering
// rules, nothing excluded). Computed block-wise with a fixed block size so the
// result does not depend on the worker count.
std::vector<std::vector<Neighbor>> CrossNearest(const RowMatrix& queries, const RowMatrix& keys,
                                                std::size_t k, int workers = 1);

// Rows scaled to unit L2 norm (zero rows stay zero).
RowMatrix UnitRows(const RowMatrix& m);

}  // namespace umtx::phrasevec

#endif  // UMTX_PHRASEVEC_HPP_
