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

// File-to-file operations. The subcommands and the pipeline both go through
// these, so a manual run and a pipeline run write the same bytes.

#ifndef UMTX_STAGES_HPP_
#define UMTX_STAGES_HPP_

#include <string>
#include <utility>
#include <vector>

#include "umtx/backtrans.hpp"
#include "umtx/cipher.hpp"
#include "umtx/decoder.hpp"
#include "umtx/phrasevec.hpp"
#include "umtx/ptable.hpp"
#include "umtx/synthfix.hpp"
#include "umtx/textproc.hpp"
#include "umtx/xmap.hpp"

namespace umtx::stages {

using Metrics = std::vector<std::pair<std::string, std::string>>;

// Tokenized corpora on disk: one sentence per line, tokens joined by spaces.
std::vector<Tokens> ReadTokenized(const std::string& path);
void WriteTokenized(const std::string& path, const std::vector<Tokens>& corpus);

struct GenerateArgs {
  cipher::CipherOptions cipher;
  std::size_t mono_size = 20000, dev_size = 300, test_size = 300;
  std::uint64_t seed = 1;
  std::string out_dir;  // mono.a mono.b dev.a dev.b test.a test.b
};
Metrics GenerateCipher(const GenerateArgs& a);

struct PreprocessArgs {
  std::string input, output;
  // Used when set; trained from the input and written here when
  // train_truecaser is true.
  std::string truecase_model;
  bool train_truecaser = false;
  bool truecase = true;
  bool length_filter = true;
  textproc::LengthLimits limits;
  std::string langid_model;
  std::string keep_lang;
  int workers = 1;
};
Metrics Preprocess(const PreprocessArgs& a);

struct EmbedArgs {
  std::string corpus, output;
  phrasevec::SgnsConfig sgns;
  phrasevec::PhraseVocab::Caps caps{200000, 400000, 400000};
};
Metrics Embed(const EmbedArgs& a);

struct MapArgs {
  std::string src_vec, tgt_vec;
  std::string out_src, out_tgt, dict_out;
  std::string seed_method = "identical";  // identical|numerals|frequency|file
  std::string seed_file;
  std::size_t seed_size = 0;  // frequency seed size, or a cap on identical pairs
  xmap::Retrieval retrieval = xmap::Retrieval::kCsls;
  int csls_k = 10;
  xmap::MappingOptions mapping;
};
Metrics Map(const MapArgs& a);

struct InduceArgs {
  std::string src_vec, tgt_vec, output;
  ptable::InduceOptions options;
};
Metrics InduceTable(const InduceArgs& a);

struct LmArgs {
  std::string corpus, output;
  int order = 5;
};
Metrics TrainLm(const LmArgs& a);

struct AlignArgs {
  std::string bitext, output;  // "src ||| tgt" lines in, Pharaoh lines out
  align::FastAlignOptions options;
  align::Symmetrization symmetrization = align::Symmetrization::kGrowDiagFinalAnd;
};
Metrics Align(const AlignArgs& a);

struct ExtractArgs {
  std::string bitext, alignment, output;
  int max_len = 3;
  int workers = 1;
};
Metrics ExtractTable(const ExtractArgs& a);

struct DecodeArgs {
  std::string table, lm, weights;  // weights optional
  std::string input, output;
  std::string nbest_output;  // optional
  backtrans::DecodeSettings settings;
  int workers = 1;
};
Metrics Decode(const DecodeArgs& a);

struct TuneArgs {
  std::string table, lm, initial_weights;  // initial optional
  std::string dev_src, dev_ref;
  std::string output, trace_output;  // trace optional
  backtrans::DecodeSettings settings;
  decoder::MertOptions mert;
  std::size_t max_sentences = 0;  // 0: whole dev set
};
Metrics Tune(const TuneArgs& a);

// One refinement step from files: the current system translates the
// monolingual subset; the reverse system is trained, tuned and scored.
struct BacktranslateArgs {
  std::string current_table, current_lm, current_weights;
  std::string mono;  // authentic side, tokenized
  std::size_t subset = 0;  // 0: everything
  std::uint64_t seed = 1;
  std::string reverse_lm;  // LM of the authentic side
  std::string tune_src, tune_ref;  // reverse direction; empty disables tuning
  std::string dev_src, dev_ref;    // reverse direction, for the score
  std::size_t tune_max_sentences = 0;
  std::string out_synthetic, out_table, out_weights;
  backtrans::DecodeSettings current_settings, reverse_settings;
  backtrans::TrainOptions train;
  bool cased = false;
};
Metrics Backtranslate(const BacktranslateArgs& a);

// Synthetic dev set for "synthetic" tuning: the given system translates the
// held-out authentic slice; pairs come out as (synthetic, authentic).
struct SyntheticDevArgs {
  std::string table, lm, weights;
  std::string mono;
  std::size_t size = 10000;
  std::string out_src, out_ref;
  backtrans::DecodeSettings settings;
  int workers = 1;
};
Metrics SyntheticDev(const SyntheticDevArgs& a);

struct TranslateCorpusArgs {
  std::string table, lm, weights;
  std::string input;
  std::string chunk_dir;
  std::string output_bitext;  // "authentic ||| synthetic"
  std::size_t chunk_size = 1000;
  std::size_t max_new_chunks = 0;
  backtrans::DecodeSettings settings;
  int workers = 1;
};
Metrics TranslateCorpus(const TranslateCorpusArgs& a);

struct FixArgs {
  std::string input, output;  // bitext files; the synthetic side is the target
  bool strip_untranslated = false;
  std::string profile = "czech";  // "czech" or a literal letter set
  std::string unk = "unk";
  bool reorder = false;
  int reorder_window = 5;
  std::uint64_t seed = 1;
  bool ner = false;
  std::string spans;      // optional TSV; default tagger on the source side otherwise
  std::string gazetteer;  // optional
  std::string policy;     // optional policy file; Table 2 defaults otherwise
  std::string alignment;  // optional Pharaoh file; intersection fast_align otherwise
  synthfix::PretreatOptions pretreat;
  std::string log_output;  // optional replacement log
  bool quotes = false;
  align::FastAlignOptions align;
};
Metrics Fix(const FixArgs& a);

struct BleuArgs {
  std::string hyp, ref;
  bool cased = true;
  std::string output;  // optional report file
};
mteval::BleuReport Bleu(const BleuArgs& a);

}  // namespace umtx::stages

#endif  // UMTX_STAGES_HPP_
