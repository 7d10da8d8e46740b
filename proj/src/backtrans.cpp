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

#include "umtx/backtrans.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <map>

#include "umtx/mteval.hpp"

namespace umtx::backtrans {

namespace fs = std::filesystem;

const IterationRecord& SelectBest(const std::vector<IterationRecord>& records) {
  if (records.empty()) Fail(ErrorKind::kInvalidArgument, "select_best: no iteration records");
  std::size_t best = 0;
  for (std::size_t i = 1; i < records.size(); ++i) {
    if (records[i].dev_bleu > records[best].dev_bleu) best = i;
  }
  return records[best];
}

bool Diverging(const std::vector<IterationRecord>& records, double delta) {
  const std::size_t n = records.size();
  if (n < 3) return false;
  return records[n - 2].dev_bleu < records[n - 3].dev_bleu - delta &&
         records[n - 1].dev_bleu < records[n - 2].dev_bleu - delta;
}

System::System(ptable::PhraseTable table, std::shared_ptr<const lm::ArpaLM> lm, decoder::FeatureWeights weights,
               const DecodeSettings& settings)
    : table_(std::move(table)), lm_(std::move(lm)), weights_(weights), settings_(settings) {
  if (!lm_) Fail(ErrorKind::kInvalidArgument, "system: missing language model");
  decoder_ = std::make_unique<decoder::Decoder>(table_, *lm_, settings_.model);
}

std::unique_ptr<System> System::Load(const SystemSnapshot& snap, std::shared_ptr<const lm::ArpaLM> lm,
                                     const DecodeSettings& settings) {
  DecodeSettings s = settings;
  s.params.distortion_limit = snap.distortion_limit;
  return std::make_unique<System>(ptable::ReadMoses(snap.table_path), std::move(lm),
                                  decoder::FeatureWeights::Load(snap.weights_path), s);
}

Tokens System::Translate(const Tokens& src) const {
  decoder::DecodeParams p = settings_.params;
  p.nbest_n = 1;
  auto nb = decoder_->Decode(src, weights_, p);
  return nb.empty() ? Tokens{} : nb.front().tokens;
}

std::vector<Tokens> System::TranslateAll(const std::vector<Tokens>& src, int workers, std::size_t* failures) const {
  std::vector<Tokens> out(src.size());
  std::vector<char> failed(src.size(), 0);
  ParallelChunks(src.size(), 16, workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      try {
        out[i] = Translate(src[i]);
      } catch (const std::exception&) {
        out[i] = src[i];
        failed[i] = 1;
      }
    }
  });
  std::size_t n = 0;
  for (std::size_t i = 0; i < failed.size(); ++i) {
    if (!failed[i]) continue;
    ++n;
    LogWarning("decoding failed on line " + std::to_string(i + 1) + "; copied verbatim");
  }
  if (failures) *failures = n;
  return out;
}

TrainedSystem TrainFromSynthetic(const align::Bitext& synthetic, std::shared_ptr<const lm::ArpaLM> target_lm,
                                 const align::Bitext& tune_set, const decoder::FeatureWeights& initial,
                                 const DecodeSettings& settings, const TrainOptions& options) {
  if (synthetic.empty()) Fail(ErrorKind::kInvalidArgument, "back-translation: empty synthetic corpus");
  align::FastAlignOptions ao = options.align;
  ao.workers = options.workers;
  const auto alignments = align::AlignBitext(synthetic, ao, options.symmetrization);
  ptable::PhraseTable table = ptable::BuildExtractedTable(synthetic, alignments, options.max_phrase_len, options.workers);
  TrainedSystem out;
  out.system = std::make_unique<System>(std::move(table), std::move(target_lm), initial, settings);
  if (options.tune && !tune_set.empty()) {
    std::vector<Tokens> src, ref;
    for (const auto& p : tune_set) {
      src.push_back(p.src);
      ref.push_back(p.tgt);
    }
    decoder::MertOptions mo = options.mert;
    mo.decode = settings.params;
    mo.workers = options.workers;
    auto mr = decoder::MertTune(out.system->decoder(), src, ref, initial, mo);
    out.system->set_weights(mr.weights);
    out.mert_trace = mr.accepted_bleu;
  }
  return out;
}

double DevBleu(const System& s, const align::Bitext& dev, int workers, bool cased) {
  std::vector<Tokens> src, ref;
  for (const auto& p : dev) {
    src.push_back(p.src);
    ref.push_back(p.tgt);
  }
  return mteval::CorpusBleu(s.TranslateAll(src, workers), ref, cased).bleu;
}

BtIterationResult RunBtIteration(const System& current, const std::vector<Tokens>& mono_subset,
                                 std::shared_ptr<const lm::ArpaLM> lm_reverse_target, const align::Bitext& tune_set,
                                 const align::Bitext& dev, const decoder::FeatureWeights& initial,
                                 const DecodeSettings& settings, const TrainOptions& options, bool cased) {
  if (mono_subset.empty()) Fail(ErrorKind::kInvalidArgument, "back-translation: empty monolingual subset");
  BtIterationResult res;
  const auto synthetic = current.TranslateAll(mono_subset, options.workers);
  res.synthetic.resize(mono_subset.size());
  for (std::size_t i = 0; i < mono_subset.size(); ++i) res.synthetic[i] = {synthetic[i], mono_subset[i]};
  res.trained = TrainFromSynthetic(res.synthetic, std::move(lm_reverse_target), tune_set, initial, settings, options);
  res.dev_bleu = DevBleu(*res.trained.system, dev, options.workers, cased);
  return res;
}

std::vector<std::size_t> SampleSubset(std::size_t population, std::size_t size, std::uint64_t seed) {
  std::vector<std::size_t> idx(population);
  for (std::size_t i = 0; i < population; ++i) idx[i] = i;
  if (size >= population) return idx;
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.Below(population - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(size);
  std::sort(idx.begin(), idx.end());
  return idx;
}

ChunkedTranslation TranslateFullCorpus(const System& system, const std::vector<Tokens>& corpus, const std::string& dir,
                                       std::size_t chunk_size, int workers, std::size_t max_new_chunks) {
  if (chunk_size < 1) Fail(ErrorKind::kInvalidArgument, "translate: chunk size must be >= 1");
  fs::create_directories(dir);
  const std::string ckpt_path = (fs::path(dir) / "checkpoint.tsv").string();
  // chunk index -> (input digest, output digest)
  std::map<std::size_t, std::pair<std::string, std::string>> ckpt;
  if (FileExists(ckpt_path)) {
    for (const auto& line : ReadLines(ckpt_path)) {
      auto f = Split(line, "\t");
      long long k;
      if (f.size() != 3 || !ParseInt(f[0], &k) || k < 0) continue;
      ckpt[static_cast<std::size_t>(k)] = {f[1], f[2]};
    }
  }
  auto save_ckpt = [&]() {
    std::vector<std::string> lines;
    for (const auto& [k, d] : ckpt) lines.push_back(std::to_string(k) + "\t" + d.first + "\t" + d.second);
    WriteLines(ckpt_path, lines);
  };

  ChunkedTranslation res;
  res.chunks_total = (corpus.size() + chunk_size - 1) / chunk_size;
  res.output.reserve(corpus.size());
  std::size_t fresh = 0;
  for (std::size_t c = 0; c < res.chunks_total; ++c) {
    const std::size_t b = c * chunk_size, e = std::min(corpus.size(), b + chunk_size);
    std::vector<std::string> input_lines;
    for (std::size_t i = b; i < e; ++i) input_lines.push_back(Join(corpus[i], " "));
    Digest in_digest;
    for (const auto& l : input_lines) {
      in_digest.Update(l);
      in_digest.Update("\n");
    }
    char name[32];
    std::snprintf(name, sizeof(name), "chunk_%06zu.txt", c);
    const std::string chunk_path = (fs::path(dir) / name).string();
    auto it = ckpt.find(c);
    if (it != ckpt.end() && it->second.first == in_digest.Hex() && FileExists(chunk_path) &&
        DigestFile(chunk_path) == it->second.second) {
      auto lines = ReadLines(chunk_path);
      if (lines.size() == e - b) {
        for (const auto& l : lines) res.output.push_back(SplitWhitespace(l));
        res.chunks_reused++;
        continue;
      }
    }
    if (max_new_chunks > 0 && fresh >= max_new_chunks) return res;
    std::vector<Tokens> slice(corpus.begin() + static_cast<std::ptrdiff_t>(b), corpus.begin() + static_cast<std::ptrdiff_t>(e));
    std::size_t failures = 0;
    auto out = system.TranslateAll(slice, workers, &failures);
    res.failures += failures;
    std::vector<std::string> out_lines;
    for (auto& t : out) {
      out_lines.push_back(Join(t, " "));
      res.output.push_back(std::move(t));
    }
    WriteLines(chunk_path, out_lines);
    ckpt[c] = {in_digest.Hex(), DigestFile(chunk_path)};
    save_ckpt();
    ++fresh;
  }
  res.complete = true;
  return res;
}

double DeciphermentAccuracy(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs) {
  if (hyps.size() != refs.size()) Fail(ErrorKind::kInvalidArgument, "decipherment: size mismatch");
  std::size_t total = 0, correct = 0;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    total += refs[i].size();
    for (std::size_t j = 0; j < refs[i].size() && j < hyps[i].size(); ++j) correct += hyps[i][j] == refs[i][j];
  }
  return total == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace umtx::backtrans
