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

// Reparameterized IBM Model 2 (diagonal-favoring prior, fixed tension) trained
// by EM, alignment symmetrization and AER.

#ifndef UMTX_ALIGNER_HPP_
#define UMTX_ALIGNER_HPP_

#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "umtx/common.hpp"

namespace umtx::align {

struct SentencePair {
  Tokens src;
  Tokens tgt;
};

using Bitext = std::vector<SentencePair>;

// Set of 0-based (src index, tgt index) links.
using Alignment = std::set<std::pair<int, int>>;

struct FastAlignOptions {
  int iterations = 5;
  double lambda = 4.0;  // diagonal tension, held fixed
  double p0 = 0.08;     // null-alignment probability
  int workers = 1;
};

class AlignModel {
 public:
  // t(tgt | src); src id 0 is the null word. Unseen pairs return 0.
  double Prob(std::uint32_t src, std::uint32_t tgt) const;
  double Prob(const std::string& src, const std::string& tgt) const;

  std::uint32_t SrcId(const std::string& w) const;  // kUnknown when absent
  std::uint32_t TgtId(const std::string& w) const;
  static constexpr std::uint32_t kUnknown = 0xFFFFFFFFu;

  double lambda() const { return lambda_; }
  double p0() const { return p0_; }
  const std::vector<double>& log_likelihood() const { return log_likelihood_; }
  std::size_t skipped_pairs() const { return skipped_; }

  // Max deviation of Σ_tgt t(tgt|src) from 1 over all source words.
  double MaxRowSumError() const;

  // Diagonal prior P(a_j = i) for 1-based i in [1, m], j in [1, n], without
  // the null share.
  static double DiagonalScore(int i, int j, int m, int n, double lambda);

 private:
  friend AlignModel TrainFastAlign(const Bitext&, const FastAlignOptions&);
  friend Alignment AlignSentence(const AlignModel&, const Tokens&, const Tokens&);

  std::unordered_map<std::string, std::uint32_t> src_ids_, tgt_ids_;
  std::unordered_map<std::uint64_t, double> table_;
  std::vector<std::vector<std::uint32_t>> row_targets_;  // per src id
  double lambda_ = 4.0;
  double p0_ = 0.08;
  std::vector<double> log_likelihood_;  // per EM iteration, before its M-step
  std::size_t skipped_ = 0;
};

AlignModel TrainFastAlign(const Bitext& bitext, const FastAlignOptions& options = {});

// Viterbi link per target position over source positions and null; null links
// are omitted.
Alignment AlignSentence(const AlignModel& m, const Tokens& src, const Tokens& tgt);

// Swaps link orientation.
Alignment Transpose(const Alignment& a);

enum class Symmetrization { kIntersection, kUnion, kGrowDiagFinalAnd };

Symmetrization ParseSymmetrization(const std::string& name);

Alignment Symmetrize(const Alignment& fwd, const Alignment& rev, int src_len, int tgt_len,
                     Symmetrization heuristic);

// 1 - (|A∩S| + |A∩P|) / (|A| + |S|); 0 when both A and S are empty.
double Aer(const Alignment& pred, const Alignment& sure, const Alignment& possible);

// Trains both directions and symmetrizes every pair.
std::vector<Alignment> AlignBitext(const Bitext& bitext, const FastAlignOptions& options,
                                   Symmetrization heuristic);

std::string FormatPharaoh(const Alignment& a);
Alignment ParsePharaoh(const std::string& line);

// "src ||| tgt" lines.
Bitext ReadBitext(const std::string& path);
Bitext ReadBitext(const std::string& src_path, const std::string& tgt_path);
void WriteBitext(const Bitext& b, const std::string& path);
SentencePair ParseBitextLine(const std::string& line, std::size_t line_no);

}  // namespace umtx::align

#endif  // UMTX_ALIGNER_HPP_
