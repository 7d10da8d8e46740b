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

#include "umtx/stages.hpp"

#include <filesystem>
#include <limits>

#include "umtx/mteval.hpp"
#include "umtx/ngram_lm.hpp"

namespace umtx::stages {

namespace fs = std::filesystem;

namespace {

std::string Num(double v) { return FormatDouble(v); }
std::string Num(std::size_t v) { return std::to_string(v); }

void EnsureParent(const std::string& path) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::shared_ptr<const lm::ArpaLM> LoadLm(const std::string& path) {
  return std::make_shared<const lm::ArpaLM>(lm::ArpaLM::ReadArpa(path));
}

decoder::FeatureWeights LoadWeightsOrDefault(const std::string& path) {
  return path.empty() ? decoder::FeatureWeights{} : decoder::FeatureWeights::Load(path);
}

std::pair<std::vector<Tokens>, std::vector<Tokens>> Unzip(const align::Bitext& b) {
  std::pair<std::vector<Tokens>, std::vector<Tokens>> out;
  for (const auto& p : b) {
    out.first.push_back(p.src);
    out.second.push_back(p.tgt);
  }
  return out;
}

align::Bitext ReadParallel(const std::string& src, const std::string& ref, std::size_t max_sentences) {
  auto b = synthfix::ZipBitext(ReadTokenized(src), ReadTokenized(ref));
  if (max_sentences > 0 && b.size() > max_sentences) b.resize(max_sentences);
  return b;
}

}  // namespace

std::vector<Tokens> ReadTokenized(const std::string& path) {
  std::vector<Tokens> out;
  for (const auto& line : ReadLines(path)) out.push_back(SplitWhitespace(line));
  return out;
}

void WriteTokenized(const std::string& path, const std::vector<Tokens>& corpus) {
  EnsureParent(path);
  std::vector<std::string> lines;
  lines.reserve(corpus.size());
  for (const auto& s : corpus) lines.push_back(Join(s, " "));
  WriteLines(path, lines);
}

Metrics GenerateCipher(const GenerateArgs& a) {
  cipher::CipherPair pair(a.cipher);
  auto c = cipher::GenerateCorpus(pair, a.mono_size, a.dev_size, a.test_size, a.seed);
  fs::create_directories(a.out_dir);
  const fs::path d(a.out_dir);
  WriteLines((d / "mono.a").string(), c.mono_a);
  WriteLines((d / "mono.b").string(), c.mono_b);
  WriteLines((d / "dev.a").string(), c.dev_a);
  WriteLines((d / "dev.b").string(), c.dev_b);
  WriteLines((d / "test.a").string(), c.test_a);
  WriteLines((d / "test.b").string(), c.test_b);
  std::vector<std::string> key;
  for (const auto& [k, v] : pair.key()) key.push_back(k + "\t" + v);
  WriteLines((d / "key.tsv").string(), key);
  return {{"cipher_vocab", Num(pair.key().size())}, {"mono_sentences", Num(c.mono_a.size())}};
}

Metrics Preprocess(const PreprocessArgs& a) {
  const auto raw = ReadLines(a.input);
  textproc::TruecaseModel tc;
  const textproc::TruecaseModel* tc_ptr = nullptr;
  if (a.truecase) {
    if (a.train_truecaser) {
      tc = textproc::TrainTruecaser(textproc::TokenizeCorpus(raw));
      if (!a.truecase_model.empty()) {
        EnsureParent(a.truecase_model);
        tc.Save(a.truecase_model);
      }
    } else if (!a.truecase_model.empty()) {
      tc = textproc::TruecaseModel::Load(a.truecase_model);
    } else {
      Fail(ErrorKind::kInvalidArgument, "preprocess: truecasing needs a model or --train-truecaser");
    }
    tc_ptr = &tc;
  }
  textproc::LangIdModel lid;
  const textproc::LangIdModel* lid_ptr = nullptr;
  if (!a.langid_model.empty()) {
    lid = textproc::LangIdModel::Load(a.langid_model);
    lid_ptr = &lid;
  }
  textproc::PreprocessOptions o;
  o.limits = a.limits;
  if (!a.length_filter) o.limits = {0, std::numeric_limits<std::size_t>::max()};
  o.truecase = a.truecase;
  o.keep_lang = a.keep_lang;
  o.workers = a.workers;
  textproc::PreprocessStats st;
  auto out = textproc::Preprocess(raw, o, tc_ptr, lid_ptr, &st);
  std::vector<Tokens> toks;
  toks.reserve(out.size());
  for (auto& s : out) toks.push_back(std::move(s.tokens));
  WriteTokenized(a.output, toks);
  return {{"input_lines", Num(st.input_lines)},
          {"dropped_length", Num(st.dropped_length)},
          {"dropped_language", Num(st.dropped_language)},
          {"kept", Num(st.kept)}};
}

Metrics Embed(const EmbedArgs& a) {
  std::vector<textproc::Sentence> corpus;
  std::size_t i = 0;
  for (auto& t : ReadTokenized(a.corpus)) corpus.push_back({std::move(t), i++});
  auto vocab = phrasevec::BuildPhraseVocab(corpus, a.caps, a.sgns.workers);
  phrasevec::SgnsStats st;
  auto m = phrasevec::TrainSgns(corpus, vocab, a.sgns, &st);
  if (!m.AllFinite()) Fail(ErrorKind::kRuntime, "embed: non-finite vectors");
  EnsureParent(a.output);
  phrasevec::SaveWord2Vec(m, a.output);
  return {{"vocab", Num(vocab.size())},
          {"unigrams", Num(vocab.CountOrder(1))},
          {"bigrams", Num(vocab.CountOrder(2))},
          {"trigrams", Num(vocab.CountOrder(3))},
          {"untrained", Num(st.untrained_entries)}};
}

Metrics Map(const MapArgs& a) {
  const auto x = xmap::NormalizeEmbeddings(phrasevec::LoadWord2Vec(a.src_vec));
  const auto z = xmap::NormalizeEmbeddings(phrasevec::LoadWord2Vec(a.tgt_vec));
  xmap::SeedDictionary seed;
  if (a.seed_method == "identical") {
    seed = xmap::IdenticalSeed(x, z, a.seed_size);
  } else if (a.seed_method == "numerals") {
    seed = xmap::NumeralSeed(x, z);
  } else if (a.seed_method == "frequency") {
    seed = xmap::FrequencySeed(x, z, a.seed_size == 0 ? 1000 : a.seed_size);
  } else if (a.seed_method == "file") {
    seed = xmap::LoadDictionary(a.seed_file, x, z);
  } else {
    Fail(ErrorKind::kInvalidArgument, "map: unknown seed method '" + a.seed_method + "'");
  }
  if (seed.pairs.empty()) Fail(ErrorKind::kRuntime, "map: empty seed dictionary");
  auto sol = xmap::SelfLearningMap(x.rows, z.rows, seed, a.mapping);
  const auto mx = xmap::ApplyTransform(x, sol.wx);
  const auto mz = xmap::ApplyTransform(z, sol.wz);
  EnsureParent(a.out_src);
  EnsureParent(a.out_tgt);
  phrasevec::SaveWord2Vec(mx, a.out_src);
  phrasevec::SaveWord2Vec(mz, a.out_tgt);
  if (!a.dict_out.empty()) {
    auto dict = xmap::InduceDictionary(mx.rows, mz.rows, a.retrieval, a.csls_k, a.mapping.workers);
    EnsureParent(a.dict_out);
    xmap::SaveDictionary(dict, mx, mz, a.dict_out);
  }
  return {{"seed_pairs", Num(seed.pairs.size())},
          {"iterations", std::to_string(sol.iterations)},
          {"objective", sol.objective_trace.empty() ? "0" : Num(sol.objective_trace.back())},
          {"retrieval", a.retrieval == xmap::Retrieval::kCsls ? "csls" : "nn"}};
}

Metrics InduceTable(const InduceArgs& a) {
  const auto src = phrasevec::LoadWord2Vec(a.src_vec);
  const auto tgt = phrasevec::LoadWord2Vec(a.tgt_vec);
  auto t = ptable::InduceUnsupervised(src, tgt, a.options);
  EnsureParent(a.output);
  ptable::WriteMoses(t, a.output);
  return {{"sources", Num(t.entries.size())}, {"pairs", Num(t.NumPairs())}};
}

Metrics TrainLm(const LmArgs& a) {
  const auto corpus = ReadTokenized(a.corpus);
  auto m = lm::TrainLm(corpus, a.order);
  EnsureParent(a.output);
  m.WriteArpa(a.output);
  return {{"order", std::to_string(a.order)}, {"vocab", Num(m.vocab().size())}};
}

Metrics Align(const AlignArgs& a) {
  const auto bitext = align::ReadBitext(a.bitext);
  const auto al = align::AlignBitext(bitext, a.options, a.symmetrization);
  std::vector<std::string> lines;
  std::size_t links = 0;
  for (const auto& x : al) {
    lines.push_back(align::FormatPharaoh(x));
    links += x.size();
  }
  EnsureParent(a.output);
  WriteLines(a.output, lines);
  return {{"pairs", Num(bitext.size())}, {"links", Num(links)}};
}

Metrics ExtractTable(const ExtractArgs& a) {
  const auto bitext = align::ReadBitext(a.bitext);
  const auto lines = ReadLines(a.alignment);
  if (lines.size() != bitext.size()) Fail(ErrorKind::kInvalidArgument, "extract: alignment and bitext sizes differ");
  std::vector<align::Alignment> al;
  for (const auto& l : lines) al.push_back(align::ParsePharaoh(l));
  auto t = ptable::BuildExtractedTable(bitext, al, a.max_len, a.workers);
  EnsureParent(a.output);
  ptable::WriteMoses(t, a.output);
  return {{"sources", Num(t.entries.size())}, {"pairs", Num(t.NumPairs())}};
}

Metrics Decode(const DecodeArgs& a) {
  backtrans::System sys(ptable::ReadMoses(a.table), LoadLm(a.lm), LoadWeightsOrDefault(a.weights), a.settings);
  const auto input = ReadTokenized(a.input);
  std::size_t failures = 0;
  const auto out = sys.TranslateAll(input, a.workers, &failures);
  WriteTokenized(a.output, out);
  if (!a.nbest_output.empty()) {
    auto p = a.settings.params;
    auto lists = sys.decoder().DecodeCorpus(input, sys.weights(), p, a.workers);
    EnsureParent(a.nbest_output);
    WriteFile(a.nbest_output, decoder::FormatNBest(lists));
  }
  return {{"sentences", Num(input.size())}, {"failures", Num(failures)}};
}

Metrics Tune(const TuneArgs& a) {
  const auto dev = ReadParallel(a.dev_src, a.dev_ref, a.max_sentences);
  auto [src, ref] = Unzip(dev);
  auto lmp = LoadLm(a.lm);
  const auto table = ptable::ReadMoses(a.table);
  decoder::Decoder dec(table, *lmp, a.settings.model);
  decoder::MertOptions mo = a.mert;
  mo.decode = a.settings.params;
  auto r = decoder::MertTune(dec, src, ref, LoadWeightsOrDefault(a.initial_weights), mo);
  EnsureParent(a.output);
  r.weights.Save(a.output);
  if (!a.trace_output.empty()) {
    std::vector<std::string> lines;
    for (double b : r.accepted_bleu) lines.push_back(FormatDouble(b));
    WriteLines(a.trace_output, lines);
  }
  return {{"rounds", std::to_string(r.rounds_run)},
          {"pool_bleu", r.accepted_bleu.empty() ? "0" : Num(r.accepted_bleu.back())}};
}

Metrics Backtranslate(const BacktranslateArgs& a) {
  backtrans::System current(ptable::ReadMoses(a.current_table), LoadLm(a.current_lm),
                            LoadWeightsOrDefault(a.current_weights), a.current_settings);
  const auto mono = ReadTokenized(a.mono);
  std::vector<Tokens> subset;
  for (std::size_t i : backtrans::SampleSubset(mono.size(), a.subset == 0 ? mono.size() : a.subset, a.seed)) {
    subset.push_back(mono[i]);
  }
  align::Bitext tune;
  if (!a.tune_src.empty()) tune = ReadParallel(a.tune_src, a.tune_ref, a.tune_max_sentences);
  align::Bitext dev;
  if (!a.dev_src.empty()) dev = ReadParallel(a.dev_src, a.dev_ref, 0);
  backtrans::TrainOptions to = a.train;
  to.tune = !tune.empty();
  // The initial weights of the reverse system are the defaults.
  backtrans::BtIterationResult res;
  {
    if (subset.empty()) Fail(ErrorKind::kInvalidArgument, "back-translation: empty monolingual subset");
    const auto synthetic = current.TranslateAll(subset, to.workers);
    res.synthetic.resize(subset.size());
    for (std::size_t i = 0; i < subset.size(); ++i) res.synthetic[i] = {synthetic[i], subset[i]};
    res.trained = backtrans::TrainFromSynthetic(res.synthetic, LoadLm(a.reverse_lm), tune, decoder::FeatureWeights{},
                                                a.reverse_settings, to);
    if (!dev.empty()) res.dev_bleu = backtrans::DevBleu(*res.trained.system, dev, to.workers, a.cased);
  }
  EnsureParent(a.out_synthetic);
  align::WriteBitext(res.synthetic, a.out_synthetic);
  EnsureParent(a.out_table);
  ptable::WriteMoses(res.trained.system->table(), a.out_table);
  EnsureParent(a.out_weights);
  res.trained.system->weights().Save(a.out_weights);
  Metrics m = {{"subset", Num(subset.size())}, {"pairs", Num(res.trained.system->table().NumPairs())}};
  if (!dev.empty()) m.emplace_back("dev_bleu", Num(res.dev_bleu));
  if (!res.trained.mert_trace.empty()) m.emplace_back("tune_pool_bleu", Num(res.trained.mert_trace.back()));
  return m;
}

Metrics SyntheticDev(const SyntheticDevArgs& a) {
  backtrans::System sys(ptable::ReadMoses(a.table), LoadLm(a.lm), LoadWeightsOrDefault(a.weights), a.settings);
  auto mono = ReadTokenized(a.mono);
  if (mono.size() > a.size) mono.erase(mono.begin(), mono.end() - static_cast<std::ptrdiff_t>(a.size));
  const auto synthetic = sys.TranslateAll(mono, a.workers);
  WriteTokenized(a.out_src, synthetic);
  WriteTokenized(a.out_ref, mono);
  return {{"sentences", Num(mono.size())}};
}

Metrics TranslateCorpus(const TranslateCorpusArgs& a) {
  backtrans::System sys(ptable::ReadMoses(a.table), LoadLm(a.lm), LoadWeightsOrDefault(a.weights), a.settings);
  const auto input = ReadTokenized(a.input);
  auto r = backtrans::TranslateFullCorpus(sys, input, a.chunk_dir, a.chunk_size, a.workers, a.max_new_chunks);
  Metrics m = {{"chunks", Num(r.chunks_total)},
               {"chunks_reused", Num(r.chunks_reused)},
               {"failures", Num(r.failures)},
               {"complete", r.complete ? "true" : "false"}};
  if (!r.complete) return m;
  EnsureParent(a.output_bitext);
  align::WriteBitext(synthfix::ZipBitext(input, r.output), a.output_bitext);
  return m;
}

Metrics Fix(const FixArgs& a) {
  auto bitext = align::ReadBitext(a.input);
  Metrics m = {{"input_pairs", Num(bitext.size())}};
  if (a.strip_untranslated) {
    const auto profile = a.profile == "czech" ? synthfix::DiacriticProfile::Czech()
                                              : synthfix::DiacriticProfile::FromString(a.profile);
    std::size_t replaced = 0;
    bitext = synthfix::StripUntranslated(bitext, profile, a.unk, &replaced);
    m.emplace_back("stripped_tokens", Num(replaced));
  }
  if (a.reorder) {
    std::vector<Tokens> tgt;
    for (const auto& p : bitext) tgt.push_back(p.tgt);
    const auto aug = synthfix::ReorderAugment(tgt, a.reorder_window, a.seed);
    align::Bitext out;
    out.reserve(aug.size());
    for (const auto& s : aug) out.push_back({bitext[s.source_index].src, s.tokens});
    bitext = std::move(out);
    m.emplace_back("reordered_pairs", Num(bitext.size()));
  }
  if (a.ner) {
    std::vector<synthfix::NESpan> spans;
    if (!a.spans.empty()) {
      spans = synthfix::ParseSpans(ReadFile(a.spans));
    } else {
      synthfix::Gazetteer gaz;
      if (!a.gazetteer.empty()) gaz = synthfix::LoadGazetteer(a.gazetteer);
      for (std::size_t i = 0; i < bitext.size(); ++i) {
        auto s = synthfix::TagNesDefault(bitext[i].src, a.gazetteer.empty() ? nullptr : &gaz, i);
        spans.insert(spans.end(), s.begin(), s.end());
      }
    }
    std::vector<align::Alignment> al;
    if (!a.alignment.empty()) {
      for (const auto& l : ReadLines(a.alignment)) al.push_back(align::ParsePharaoh(l));
    } else {
      al = align::AlignBitext(bitext, a.align, align::Symmetrization::kIntersection);
    }
    const auto policy = a.policy.empty() ? synthfix::NEPolicy::Default()
                                         : synthfix::NEPolicy::FromText(ReadFile(a.policy));
    auto r = synthfix::NePretreat(bitext, spans, al, policy, a.pretreat);
    bitext = std::move(r.bitext);
    if (!a.log_output.empty()) {
      std::vector<std::string> lines;
      for (const auto& x : r.log) {
        lines.push_back(std::to_string(x.sentence) + "\t" + std::to_string(x.begin) + "\t" + std::to_string(x.end) +
                        "\t" + x.action + "\t" + Join(x.original, " ") + "\t" + Join(x.replacement, " "));
      }
      EnsureParent(a.log_output);
      WriteLines(a.log_output, lines);
    }
    m.insert(m.end(), {{"ne_spans", Num(spans.size())},
                       {"ne_trusted", Num(r.stats.trusted)},
                       {"ne_copied", Num(r.stats.copied)},
                       {"ne_removed", Num(r.stats.removed)},
                       {"ne_ignored", Num(r.stats.ignored)},
                       {"ne_unaligned", Num(r.stats.unaligned)},
                       {"ne_overlapping", Num(r.stats.overlapping)}});
  }
  if (a.quotes) {
    std::size_t odd = 0;
    for (auto& p : bitext) p.tgt = synthfix::NormalizeQuotes(p.tgt, &odd);
    m.emplace_back("odd_quote_warnings", Num(odd));
  }
  EnsureParent(a.output);
  align::WriteBitext(bitext, a.output);
  m.emplace_back("output_pairs", Num(bitext.size()));
  return m;
}

mteval::BleuReport Bleu(const BleuArgs& a) {
  const auto hyp = ReadTokenized(a.hyp);
  const auto ref = ReadTokenized(a.ref);
  auto r = mteval::CorpusBleu(hyp, ref, a.cased);
  if (!a.output.empty()) {
    EnsureParent(a.output);
    WriteFile(a.output, mteval::FormatReport(r));
  }
  return r;
}

}  // namespace umtx::stages
