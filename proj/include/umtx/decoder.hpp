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

// Phrase-based stack decoding with a log-linear model, n-best extraction and
// minimum error rate training.

#ifndef UMTX_DECODER_HPP_
#define UMTX_DECODER_HPP_

#include <array>
#include <string>
#include <unordered_map>
#include <vector>

#include "umtx/aligner.hpp"
#include "umtx/mteval.hpp"
#include "umtx/ngram_lm.hpp"
#include "umtx/ptable.hpp"

namespace umtx::decoder {

enum Feature : int {
  kFwd = 0,        // ln p(t|s)
  kBwd,            // ln p(s|t)
  kLm,             // ln P_lm
  kWordPenalty,    // -|t|
  kPhrasePenalty,  // -1 per phrase
  kDistortion,     // -|start - previous end|
  kNumFeatures
};

using FeatureVector = std::array<double, kNumFeatures>;

const std::array<const char*, kNumFeatures>& FeatureNames();

struct FeatureWeights {
  FeatureVector w{0.2, 0.2, 0.5, -0.3, 0.2, 0.3};

  double Score(const FeatureVector& f) const;
  // key=value lines, one per feature.
  std::string ToText() const;
  static FeatureWeights FromText(const std::string& text);
  void Save(const std::string& path) const;
  static FeatureWeights Load(const std::string& path);
};

struct DecodeParams {
  int beam_size = 100;
  // < 0: unlimited; 0: monotone.
  int distortion_limit = 6;
  int nbest_n = 1;
};

struct PhraseStep {
  int src_begin = 0, src_end = 0;  // [begin, end)
  int tgt_begin = 0, tgt_end = 0;
  bool unknown = false;
};

struct Translation {
  Tokens tokens;
  std::string text;
  FeatureVector features{};
  double score = 0.0;  // weights . features
  std::vector<PhraseStep> steps;  // in target order
};

// Distinct translations, best first (ties: lexicographic on the text).
using NBestList = std::vector<Translation>;

struct ModelOptions {
  int table_limit = 20;        // candidates kept per source phrase
  double unknown_prob = 1e-7;  // phrase probabilities of copied unknown words
  int max_phrase_len = 0;      // 0: longest source phrase in the table
};

class Decoder {
 public:
  Decoder(const ptable::PhraseTable& table, const lm::ArpaLM& lm, const ModelOptions& options = {});

  NBestList Decode(const Tokens& src, const FeatureWeights& w, const DecodeParams& params) const;
  std::vector<NBestList> DecodeCorpus(const std::vector<Tokens>& src, const FeatureWeights& w,
                                      const DecodeParams& params, int workers = 1) const;

  struct Option {
    int src_begin = 0, src_end = 0;
    Tokens tgt;
    std::vector<lm::WordId> ids;
    double ln_fwd = 0.0, ln_bwd = 0.0;
    bool unknown = false;
  };
  // All options for the sentence, grouped per span.
  std::vector<Option> Options(const Tokens& src) const;

  const lm::ArpaLM& lm() const { return lm_; }
  const ModelOptions& options() const { return options_; }

 private:
  struct Prepared {
    Tokens tgt;
    std::vector<lm::WordId> ids;
    double ln_fwd, ln_bwd;
  };
  const lm::ArpaLM& lm_;
  ModelOptions options_;
  int max_len_ = 1;
  std::unordered_map<std::string, std::vector<Prepared>> table_;
};

// Links every target word of a phrase to every source word of that phrase.
align::Alignment PhraseAlignment(const Translation& t);

// "sent_id ||| translation ||| f1 .. fk ||| score" lines.
std::string FormatNBest(const std::vector<NBestList>& lists);

// ---------------------------------------------------------------------------
// MERT

struct PoolEntry {
  std::vector<double> features;
  mteval::BleuStats stats;
  std::string text;
};

// Per dev sentence, its accumulated distinct hypotheses.
using NBestPool = std::vector<std::vector<PoolEntry>>;

// Corpus BLEU of the argmax hypotheses under w (ties: first in pool order).
double PoolBleu(const NBestPool& pool, const std::vector<double>& w);

struct LineSearchResult {
  double gamma = 0.0;
  double bleu = 0.0;
};

// Exact maximization of pool BLEU along w + gamma d via per-sentence upper
// envelopes. Picks the midpoint of the best interval.
LineSearchResult LineSearch(const NBestPool& pool, const std::vector<double>& w, const std::vector<double>& d);

struct OptimizeResult {
  std::vector<double> weights;
  double bleu = 0.0;
  bool improved = false;
};

// Coordinate-wise line searches from `initial` and from `restarts` random
// points. Returns `initial` unchanged unless some start strictly improves the
// pool BLEU; otherwise the best point, L1-normalized.
OptimizeResult OptimizePool(const NBestPool& pool, const std::vector<double>& initial, int restarts,
                            std::uint64_t seed);

struct MertOptions {
  int rounds = 10;
  int nbest_n = 100;
  int random_restarts = 20;
  std::uint64_t seed = 1;
  double min_improvement = 0.01;
  bool cased = false;
  DecodeParams decode;
  int workers = 1;
};

struct MertResult {
  FeatureWeights weights;
  // Pool BLEU of the initial weights, then of each accepted round.
  std::vector<double> accepted_bleu;
  int rounds_run = 0;
};

MertResult MertTune(const Decoder& decoder, const std::vector<Tokens>& dev_src, const std::vector<Tokens>& dev_ref,
                    const FeatureWeights& initial, const MertOptions& options);

}  // namespace umtx::decoder

#endif  // UMTX_DECODER_HPP_
