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

// Iterative back-translation: systems, one refinement step, model selection
// and resumable corpus translation.

#ifndef UMTX_BACKTRANS_HPP_
#define UMTX_BACKTRANS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "umtx/aligner.hpp"
#include "umtx/decoder.hpp"
#include "umtx/ngram_lm.hpp"
#include "umtx/ptable.hpp"

namespace umtx::backtrans {

// On-disk description of a translation system.
struct SystemSnapshot {
  std::string direction;   // e.g. "a-b"
  std::string provenance;  // "initial" or "bt-iteration-<k>"
  std::string table_path;
  std::string lm_path;
  std::string weights_path;
  int distortion_limit = 0;
};

struct IterationRecord {
  int iteration = 0;  // 0 for the initial system
  std::string direction;
  std::string synthetic_path;
  std::size_t synthetic_size = 0;
  double dev_bleu = 0.0;
  SystemSnapshot system;
};

// Highest dev BLEU; ties go to the earlier record.
const IterationRecord& SelectBest(const std::vector<IterationRecord>& records);

// True when the last two records each dropped by more than delta.
bool Diverging(const std::vector<IterationRecord>& records, double delta);

struct DecodeSettings {
  decoder::DecodeParams params;
  decoder::ModelOptions model;
};

// A loaded, ready-to-use system.
class System {
 public:
  System(ptable::PhraseTable table, std::shared_ptr<const lm::ArpaLM> lm, decoder::FeatureWeights weights,
         const DecodeSettings& settings);
  static std::unique_ptr<System> Load(const SystemSnapshot& snap, std::shared_ptr<const lm::ArpaLM> lm,
                                      const DecodeSettings& settings);

  Tokens Translate(const Tokens& src) const;
  // Order preserving; a line that fails to decode is copied verbatim and
  // counted.
  std::vector<Tokens> TranslateAll(const std::vector<Tokens>& src, int workers, std::size_t* failures = nullptr) const;

  const decoder::Decoder& decoder() const { return *decoder_; }
  const decoder::FeatureWeights& weights() const { return weights_; }
  void set_weights(const decoder::FeatureWeights& w) { weights_ = w; }
  const DecodeSettings& settings() const { return settings_; }
  const ptable::PhraseTable& table() const { return table_; }

 private:
  ptable::PhraseTable table_;
  std::shared_ptr<const lm::ArpaLM> lm_;
  decoder::FeatureWeights weights_;
  DecodeSettings settings_;
  std::unique_ptr<decoder::Decoder> decoder_;
};

struct TrainOptions {
  align::FastAlignOptions align;
  align::Symmetrization symmetrization = align::Symmetrization::kGrowDiagFinalAnd;
  int max_phrase_len = 3;
  decoder::MertOptions mert;
  bool tune = true;
  int workers = 1;
};

struct TrainedSystem {
  std::unique_ptr<System> system;
  std::vector<double> mert_trace;
};

// Extracts and scores a phrase table from the synthetic bitext
// (synthetic source, authentic target), then tunes on `tune_set`.
TrainedSystem TrainFromSynthetic(const align::Bitext& synthetic, std::shared_ptr<const lm::ArpaLM> target_lm,
                                 const align::Bitext& tune_set, const decoder::FeatureWeights& initial,
                                 const DecodeSettings& settings, const TrainOptions& options);

struct BtIterationResult {
  align::Bitext synthetic;  // (synthetic, authentic)
  TrainedSystem trained;
  double dev_bleu = 0.0;
};

// One refinement step: `current` (X->Y) translates the authentic X subset;
// (synthetic Y, authentic X) trains the Y->X system, which is tuned on
// `tune_set` and scored on `dev`.
BtIterationResult RunBtIteration(const System& current, const std::vector<Tokens>& mono_subset,
                                 std::shared_ptr<const lm::ArpaLM> lm_reverse_target, const align::Bitext& tune_set,
                                 const align::Bitext& dev, const decoder::FeatureWeights& initial,
                                 const DecodeSettings& settings, const TrainOptions& options, bool cased = false);

// Corpus BLEU of a system on a bitext.
double DevBleu(const System& s, const align::Bitext& dev, int workers, bool cased = false);

// Seeded uniform sample without replacement; indices returned sorted.
std::vector<std::size_t> SampleSubset(std::size_t population, std::size_t size, std::uint64_t seed);

struct ChunkedTranslation {
  std::vector<Tokens> output;
  std::size_t chunks_total = 0;
  std::size_t chunks_reused = 0;
  std::size_t failures = 0;
  bool complete = false;
};

// Translates chunk by chunk into `dir`, keeping a checkpoint file with the
// digests of every finished chunk; finished chunks are reused on re-runs.
// max_new_chunks > 0 stops after that many freshly translated chunks.
ChunkedTranslation TranslateFullCorpus(const System& system, const std::vector<Tokens>& corpus, const std::string& dir,
                                       std::size_t chunk_size, int workers, std::size_t max_new_chunks = 0);

// Share of reference positions reproduced exactly by the hypothesis.
double DeciphermentAccuracy(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs);

}  // namespace umtx::backtrans

#endif  // UMTX_BACKTRANS_HPP_
