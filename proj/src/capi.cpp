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

#include "umtx/umtx.h"

#include <cstdlib>
#include <cstring>
#include <map>
#include <memory>
#include <new>
#include <string>

#include "umtx/config.hpp"
#include "umtx/pipeline.hpp"
#include "umtx/stages.hpp"

struct umtx_lm {
  std::shared_ptr<const umtx::lm::ArpaLM> lm;
};

struct umtx_ptable {
  umtx::ptable::PhraseTable table;
};

struct umtx_decoder {
  std::unique_ptr<umtx::backtrans::System> system;
  int nbest = 1;
};

struct umtx_config {
  umtx::PipelineConfig config;
};

namespace {

using namespace umtx;

thread_local std::string g_last_error;

umtx_log_fn g_log_fn = nullptr;
void* g_log_user = nullptr;

template <typename F>
umtx_status Guard(F&& fn) {
  try {
    fn();
    g_last_error.clear();
    return UMTX_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    switch (e.kind()) {
      case ErrorKind::kInvalidArgument:
        return UMTX_E_INVALID_ARGUMENT;
      case ErrorKind::kIo:
        return UMTX_E_IO;
      case ErrorKind::kFormat:
        return UMTX_E_FORMAT;
      case ErrorKind::kRuntime:
        return UMTX_E_RUNTIME;
    }
    return UMTX_E_INTERNAL;
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return UMTX_E_RUNTIME;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return UMTX_E_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return UMTX_E_INTERNAL;
  }
}

char* Dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

void Out(char** dst, const std::string& s) {
  if (dst) *dst = Dup(s);
}

void Require(const void* p, const char* what) {
  if (!p) Fail(ErrorKind::kInvalidArgument, std::string(what) + " is required");
}

std::string Str(const char* s) { return s ? std::string(s) : std::string(); }

std::string MetricsText(const stages::Metrics& m) {
  std::string out;
  for (const auto& [k, v] : m) out += k + "=" + v + "\n";
  return out;
}

backtrans::DecodeSettings Settings(const umtx_decode_options& o) {
  backtrans::DecodeSettings s;
  s.params.beam_size = o.beam_size;
  s.params.distortion_limit = o.distortion_limit;
  s.params.nbest_n = o.nbest;
  s.model.table_limit = o.table_limit;
  s.model.unknown_prob = o.unknown_prob;
  if (o.beam_size < 1) Fail(ErrorKind::kInvalidArgument, "beam size must be positive");
  if (o.nbest < 1) Fail(ErrorKind::kInvalidArgument, "n-best size must be positive");
  if (o.table_limit < 1) Fail(ErrorKind::kInvalidArgument, "table limit must be positive");
  if (!(o.unknown_prob > 0.0 && o.unknown_prob <= 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "unknown-word probability must be in (0, 1]");
  }
  return s;
}

}  // namespace

extern "C" {

const char* umtx_version(void) { return "0.1.0"; }

const char* umtx_last_error(void) { return g_last_error.c_str(); }

const char* umtx_status_name(umtx_status s) {
  switch (s) {
    case UMTX_OK:
      return "ok";
    case UMTX_E_INVALID_ARGUMENT:
      return "invalid argument";
    case UMTX_E_IO:
      return "i/o error";
    case UMTX_E_FORMAT:
      return "format error";
    case UMTX_E_RUNTIME:
      return "runtime error";
    case UMTX_E_INTERNAL:
      return "internal error";
  }
  return "unknown status";
}

void umtx_string_free(char* s) { std::free(s); }

void umtx_set_log_callback(umtx_log_fn fn, void* user) {
  g_log_fn = fn;
  g_log_user = user;
  if (fn) {
    SetLogSink([](const std::string& msg) { g_log_fn(msg.c_str(), g_log_user); });
  } else {
    SetLogSink(nullptr);
  }
}

void umtx_set_verbose(int verbose) { SetVerbose(verbose != 0); }

// ---- language models

umtx_status umtx_lm_load(const char* arpa_path, umtx_lm** out) {
  return Guard([&] {
    Require(arpa_path, "path");
    Require(out, "output handle");
    auto h = std::make_unique<umtx_lm>();
    h->lm = std::make_shared<const lm::ArpaLM>(lm::ArpaLM::ReadArpa(arpa_path));
    *out = h.release();
  });
}

umtx_status umtx_lm_score(const umtx_lm* h, const char* sentence, double* log10_prob) {
  return Guard([&] {
    Require(h, "model");
    Require(sentence, "sentence");
    Require(log10_prob, "output");
    *log10_prob = h->lm->ScoreSentence(SplitWhitespace(sentence));
  });
}

umtx_status umtx_lm_order(const umtx_lm* h, int* order) {
  return Guard([&] {
    Require(h, "model");
    Require(order, "output");
    *order = h->lm->order();
  });
}

void umtx_lm_free(umtx_lm* h) { delete h; }

// ---- phrase tables

umtx_status umtx_ptable_load(const char* path, umtx_ptable** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "output handle");
    auto h = std::make_unique<umtx_ptable>();
    h->table = ptable::ReadMoses(path);
    *out = h.release();
  });
}

umtx_status umtx_ptable_pairs(const umtx_ptable* t, size_t* pairs) {
  return Guard([&] {
    Require(t, "table");
    Require(pairs, "output");
    *pairs = t->table.NumPairs();
  });
}

void umtx_ptable_free(umtx_ptable* t) { delete t; }

// ---- decoding

void umtx_decode_options_init(umtx_decode_options* o) {
  if (!o) return;
  o->beam_size = 100;
  o->distortion_limit = 6;
  o->nbest = 1;
  o->table_limit = 20;
  o->unknown_prob = 1e-7;
  o->workers = 1;
}

umtx_status umtx_decoder_create(const umtx_ptable* table, const umtx_lm* lm, const char* weights_path,
                                const umtx_decode_options* options, umtx_decoder** out) {
  return Guard([&] {
    Require(table, "table");
    Require(lm, "language model");
    Require(out, "output handle");
    umtx_decode_options o;
    umtx_decode_options_init(&o);
    if (options) o = *options;
    const auto settings = Settings(o);
    decoder::FeatureWeights w;
    if (weights_path) w = decoder::FeatureWeights::Load(weights_path);
    auto h = std::make_unique<umtx_decoder>();
    h->system = std::make_unique<backtrans::System>(table->table, lm->lm, w, settings);
    h->nbest = o.nbest;
    *out = h.release();
  });
}

umtx_status umtx_decoder_translate(const umtx_decoder* d, const char* sentence, char** translation) {
  return Guard([&] {
    Require(d, "decoder");
    Require(sentence, "sentence");
    Require(translation, "output");
    *translation = Dup(Join(d->system->Translate(SplitWhitespace(sentence)), " "));
  });
}

umtx_status umtx_decoder_nbest(const umtx_decoder* d, const char* sentence, char** nbest) {
  return Guard([&] {
    Require(d, "decoder");
    Require(sentence, "sentence");
    Require(nbest, "output");
    auto params = d->system->settings().params;
    params.nbest_n = d->nbest;
    auto list = d->system->decoder().Decode(SplitWhitespace(sentence), d->system->weights(), params);
    *nbest = Dup(decoder::FormatNBest({list}));
  });
}

void umtx_decoder_free(umtx_decoder* d) { delete d; }

// ---- file operations

void umtx_generate_options_init(umtx_generate_options* o) {
  if (!o) return;
  const cipher::CipherOptions c;
  o->out_dir = nullptr;
  o->cipher_seed = c.seed;
  o->seed = 1;
  o->vocab_size = c.vocab_size;
  o->successors = c.successors;
  o->names = c.names;
  o->numbers = c.numbers;
  o->comma_rate = c.comma_rate;
  o->min_len = c.min_len;
  o->max_len = c.max_len;
  o->reorder_rate = c.reorder_rate;
  o->mono_size = 20000;
  o->dev_size = 300;
  o->test_size = 300;
}

umtx_status umtx_generate(const umtx_generate_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->out_dir, "output directory");
    stages::GenerateArgs a;
    a.cipher.seed = o->cipher_seed;
    a.cipher.vocab_size = o->vocab_size;
    a.cipher.successors = o->successors;
    a.cipher.names = o->names;
    a.cipher.numbers = o->numbers;
    a.cipher.comma_rate = o->comma_rate;
    a.cipher.min_len = o->min_len;
    a.cipher.max_len = o->max_len;
    a.cipher.reorder_rate = o->reorder_rate;
    a.mono_size = o->mono_size;
    a.dev_size = o->dev_size;
    a.test_size = o->test_size;
    a.seed = o->seed;
    a.out_dir = o->out_dir;
    Out(metrics, MetricsText(stages::GenerateCipher(a)));
  });
}

void umtx_preprocess_options_init(umtx_preprocess_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  o->truecase = 1;
  o->length_filter = 1;
  o->min_len = 3;
  o->max_len = 80;
  o->workers = 1;
}

umtx_status umtx_preprocess(const umtx_preprocess_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->input, "input");
    Require(o->output, "output");
    stages::PreprocessArgs a;
    a.input = o->input;
    a.output = o->output;
    a.truecase_model = Str(o->truecase_model);
    a.train_truecaser = o->train_truecaser != 0;
    a.truecase = o->truecase != 0;
    a.length_filter = o->length_filter != 0;
    a.limits.min_tokens = o->min_len;
    a.limits.max_tokens = o->max_len;
    a.langid_model = Str(o->langid_model);
    a.keep_lang = Str(o->keep_lang);
    a.workers = o->workers;
    Out(metrics, MetricsText(stages::Preprocess(a)));
  });
}

umtx_status umtx_langid_train(const char* const* labels, const char* const* corpus_paths, size_t n, int order,
                              const char* output) {
  return Guard([&] {
    Require(output, "output");
    if (n == 0) Fail(ErrorKind::kInvalidArgument, "at least one labelled corpus is required");
    Require(labels, "labels");
    Require(corpus_paths, "corpora");
    std::map<std::string, std::vector<textproc::Sentence>> labeled;
    for (size_t i = 0; i < n; ++i) {
      Require(labels[i], "label");
      Require(corpus_paths[i], "corpus path");
      auto& dst = labeled[labels[i]];
      for (auto& t : stages::ReadTokenized(corpus_paths[i])) dst.push_back({std::move(t), dst.size()});
    }
    textproc::TrainLangId(labeled, order).Save(output);
  });
}

void umtx_embed_options_init(umtx_embed_options* o) {
  if (!o) return;
  const phrasevec::SgnsConfig c;
  o->corpus = nullptr;
  o->output = nullptr;
  o->window = c.window;
  o->dim = c.dim;
  o->negatives = c.negatives;
  o->epochs = c.epochs;
  o->lr = c.initial_lr;
  o->min_lr = c.min_lr;
  o->unigrams = 200000;
  o->bigrams = 400000;
  o->trigrams = 400000;
  o->seed = c.seed;
  o->workers = 1;
}

umtx_status umtx_embed(const umtx_embed_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->corpus, "corpus");
    Require(o->output, "output");
    stages::EmbedArgs a;
    a.corpus = o->corpus;
    a.output = o->output;
    a.sgns.window = o->window;
    a.sgns.dim = o->dim;
    a.sgns.negatives = o->negatives;
    a.sgns.epochs = o->epochs;
    a.sgns.initial_lr = o->lr;
    a.sgns.min_lr = o->min_lr;
    a.sgns.seed = o->seed;
    a.sgns.workers = o->workers;
    a.caps = {o->unigrams, o->bigrams, o->trigrams};
    Out(metrics, MetricsText(stages::Embed(a)));
  });
}

void umtx_map_options_init(umtx_map_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  o->seed_method = "identical";
  o->retrieval = "csls";
  o->csls_k = 10;
  o->max_iters = 50;
  o->tol = 1e-6;
  o->workers = 1;
}

umtx_status umtx_map(const umtx_map_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->src_vec, "source embeddings");
    Require(o->tgt_vec, "target embeddings");
    Require(o->out_src, "mapped source output");
    Require(o->out_tgt, "mapped target output");
    stages::MapArgs a;
    a.src_vec = o->src_vec;
    a.tgt_vec = o->tgt_vec;
    a.out_src = o->out_src;
    a.out_tgt = o->out_tgt;
    a.dict_out = Str(o->dict_out);
    a.seed_method = o->seed_method ? o->seed_method : "identical";
    a.seed_file = Str(o->seed_file);
    a.seed_size = o->seed_size;
    const std::string r = o->retrieval ? o->retrieval : "csls";
    if (r == "csls") {
      a.retrieval = xmap::Retrieval::kCsls;
    } else if (r == "nn") {
      a.retrieval = xmap::Retrieval::kNearest;
    } else {
      Fail(ErrorKind::kInvalidArgument, "retrieval must be csls or nn");
    }
    a.csls_k = o->csls_k;
    a.mapping.max_iters = o->max_iters;
    a.mapping.tol = o->tol;
    a.mapping.workers = o->workers;
    Out(metrics, MetricsText(stages::Map(a)));
  });
}

void umtx_table_options_init(umtx_table_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  o->k = 100;
  o->temperature = 0.1;
  o->max_phrase_len = 3;
  o->workers = 1;
}

umtx_status umtx_table(const umtx_table_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->output, "output");
    const bool induce = o->src_vec || o->tgt_vec;
    const bool extract = o->bitext || o->alignment;
    if (induce == extract) Fail(ErrorKind::kInvalidArgument, "give either embeddings or a bitext with alignments");
    if (induce) {
      Require(o->src_vec, "source embeddings");
      Require(o->tgt_vec, "target embeddings");
      stages::InduceArgs a;
      a.src_vec = o->src_vec;
      a.tgt_vec = o->tgt_vec;
      a.output = o->output;
      a.options.k = o->k;
      a.options.temperature = o->temperature;
      a.options.softmax_full_vocab = o->softmax_full_vocab != 0;
      a.options.workers = o->workers;
      Out(metrics, MetricsText(stages::InduceTable(a)));
    } else {
      Require(o->bitext, "bitext");
      Require(o->alignment, "alignment");
      stages::ExtractArgs a;
      a.bitext = o->bitext;
      a.alignment = o->alignment;
      a.output = o->output;
      a.max_len = o->max_phrase_len;
      a.workers = o->workers;
      Out(metrics, MetricsText(stages::ExtractTable(a)));
    }
  });
}

umtx_status umtx_lm_train(const char* corpus, const char* output, int order, char** metrics) {
  return Guard([&] {
    Require(corpus, "corpus");
    Require(output, "output");
    stages::LmArgs a;
    a.corpus = corpus;
    a.output = output;
    a.order = order;
    Out(metrics, MetricsText(stages::TrainLm(a)));
  });
}

void umtx_align_options_init(umtx_align_options* o) {
  if (!o) return;
  const align::FastAlignOptions f;
  o->bitext = nullptr;
  o->output = nullptr;
  o->iterations = f.iterations;
  o->lambda = f.lambda;
  o->p0 = f.p0;
  o->symmetrization = "grow-diag-final-and";
  o->workers = 1;
}

umtx_status umtx_align(const umtx_align_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->bitext, "bitext");
    Require(o->output, "output");
    stages::AlignArgs a;
    a.bitext = o->bitext;
    a.output = o->output;
    a.options.iterations = o->iterations;
    a.options.lambda = o->lambda;
    a.options.p0 = o->p0;
    a.options.workers = o->workers;
    a.symmetrization = align::ParseSymmetrization(o->symmetrization ? o->symmetrization : "grow-diag-final-and");
    Out(metrics, MetricsText(stages::Align(a)));
  });
}

void umtx_translate_options_init(umtx_translate_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  umtx_decode_options_init(&o->decode);
}

umtx_status umtx_translate_file(const umtx_translate_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->table, "table");
    Require(o->lm, "language model");
    Require(o->input, "input");
    Require(o->output, "output");
    stages::DecodeArgs a;
    a.table = o->table;
    a.lm = o->lm;
    a.weights = Str(o->weights);
    a.input = o->input;
    a.output = o->output;
    a.nbest_output = Str(o->nbest_output);
    a.settings = Settings(o->decode);
    a.workers = o->decode.workers;
    Out(metrics, MetricsText(stages::Decode(a)));
  });
}

void umtx_tune_options_init(umtx_tune_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  const decoder::MertOptions m;
  o->rounds = m.rounds;
  o->nbest = m.nbest_n;
  o->restarts = m.random_restarts;
  o->min_improvement = m.min_improvement;
  o->seed = m.seed;
  umtx_decode_options_init(&o->decode);
}

umtx_status umtx_tune(const umtx_tune_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->table, "table");
    Require(o->lm, "language model");
    Require(o->dev_src, "dev source");
    Require(o->dev_ref, "dev reference");
    Require(o->output, "output");
    stages::TuneArgs a;
    a.table = o->table;
    a.lm = o->lm;
    a.initial_weights = Str(o->initial_weights);
    a.dev_src = o->dev_src;
    a.dev_ref = o->dev_ref;
    a.output = o->output;
    a.trace_output = Str(o->trace_output);
    a.settings = Settings(o->decode);
    a.mert.rounds = o->rounds;
    a.mert.nbest_n = o->nbest;
    a.mert.random_restarts = o->restarts;
    a.mert.min_improvement = o->min_improvement;
    a.mert.seed = o->seed;
    a.mert.cased = o->cased != 0;
    a.mert.workers = o->decode.workers;
    a.max_sentences = o->max_sentences;
    Out(metrics, MetricsText(stages::Tune(a)));
  });
}

void umtx_backtranslate_options_init(umtx_backtranslate_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  const decoder::MertOptions m;
  const align::FastAlignOptions f;
  o->seed = 1;
  o->iterations = f.iterations;
  o->symmetrization = "grow-diag-final-and";
  o->max_phrase_len = 3;
  o->rounds = m.rounds;
  o->nbest = m.nbest_n;
  o->restarts = m.random_restarts;
  o->min_improvement = m.min_improvement;
  umtx_decode_options_init(&o->decode);
}

umtx_status umtx_backtranslate(const umtx_backtranslate_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->current_table, "current table");
    Require(o->current_lm, "current language model");
    Require(o->mono, "monolingual corpus");
    Require(o->reverse_lm, "reverse language model");
    Require(o->out_synthetic, "synthetic output");
    Require(o->out_table, "table output");
    Require(o->out_weights, "weights output");
    if (o->tune_src) Require(o->tune_ref, "tuning reference");
    if (o->dev_src) Require(o->dev_ref, "dev reference");
    stages::BacktranslateArgs a;
    a.current_table = o->current_table;
    a.current_lm = o->current_lm;
    a.current_weights = Str(o->current_weights);
    a.mono = o->mono;
    a.subset = o->subset;
    a.seed = o->seed;
    a.reverse_lm = o->reverse_lm;
    a.tune_src = Str(o->tune_src);
    a.tune_ref = Str(o->tune_ref);
    a.tune_max_sentences = o->tune_max_sentences;
    a.dev_src = Str(o->dev_src);
    a.dev_ref = Str(o->dev_ref);
    a.out_synthetic = o->out_synthetic;
    a.out_table = o->out_table;
    a.out_weights = o->out_weights;
    a.reverse_settings = Settings(o->decode);
    a.current_settings = a.reverse_settings;
    a.current_settings.params.distortion_limit = o->current_distortion_limit;
    a.current_settings.params.nbest_n = 1;
    a.train.align.iterations = o->iterations;
    a.train.align.workers = o->decode.workers;
    a.train.symmetrization =
        align::ParseSymmetrization(o->symmetrization ? o->symmetrization : "grow-diag-final-and");
    a.train.max_phrase_len = o->max_phrase_len;
    a.train.mert.rounds = o->rounds;
    a.train.mert.nbest_n = o->nbest;
    a.train.mert.random_restarts = o->restarts;
    a.train.mert.min_improvement = o->min_improvement;
    a.train.mert.seed = o->seed;
    a.train.mert.cased = o->cased != 0;
    a.train.mert.workers = o->decode.workers;
    a.train.workers = o->decode.workers;
    a.cased = o->cased != 0;
    Out(metrics, MetricsText(stages::Backtranslate(a)));
  });
}

void umtx_fix_options_init(umtx_fix_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  o->profile = "czech";
  o->unk = "unk";
  o->reorder_window = 5;
  o->seed = 1;
  o->lev_threshold = 3;
}

umtx_status umtx_fix(const umtx_fix_options* o, char** metrics) {
  return Guard([&] {
    Require(o, "options");
    Require(o->input, "input");
    Require(o->output, "output");
    stages::FixArgs a;
    a.input = o->input;
    a.output = o->output;
    a.strip_untranslated = o->strip_untranslated != 0;
    a.profile = o->profile ? o->profile : "czech";
    a.unk = o->unk ? o->unk : "unk";
    a.reorder = o->reorder != 0;
    a.reorder_window = o->reorder_window;
    a.seed = o->seed;
    a.ner = o->ner != 0;
    a.spans = Str(o->spans);
    a.gazetteer = Str(o->gazetteer);
    a.policy = Str(o->policy);
    a.alignment = Str(o->alignment);
    a.pretreat.lev_threshold = o->lev_threshold;
    a.pretreat.unk = a.unk;
    a.pretreat.full_deletion = o->full_deletion != 0;
    a.log_output = Str(o->log_output);
    a.quotes = o->quotes != 0;
    Out(metrics, MetricsText(stages::Fix(a)));
  });
}

umtx_status umtx_bleu(const char* hyp_path, const char* ref_path, int cased, char** report) {
  return Guard([&] {
    Require(hyp_path, "hypothesis");
    Require(ref_path, "reference");
    stages::BleuArgs a;
    a.hyp = hyp_path;
    a.ref = ref_path;
    a.cased = cased != 0;
    Out(report, mteval::FormatReport(stages::Bleu(a)));
  });
}

// ---- pipeline

umtx_status umtx_config_new(umtx_config** out) {
  return Guard([&] {
    Require(out, "output handle");
    *out = new umtx_config();
  });
}

umtx_status umtx_config_load(const char* path, umtx_config** out) {
  return Guard([&] {
    Require(path, "path");
    Require(out, "output handle");
    auto h = std::make_unique<umtx_config>();
    h->config = PipelineConfig::Load(path);
    *out = h.release();
  });
}

umtx_status umtx_config_set(umtx_config* c, const char* key, const char* value) {
  return Guard([&] {
    Require(c, "config");
    Require(key, "key");
    Require(value, "value");
    c->config.Set(key, value);
  });
}

umtx_status umtx_config_get(const umtx_config* c, const char* key, char** value) {
  return Guard([&] {
    Require(c, "config");
    Require(key, "key");
    Require(value, "output");
    *value = Dup(c->config.Str(key));
  });
}

umtx_status umtx_config_text(const umtx_config* c, char** text) {
  return Guard([&] {
    Require(c, "config");
    Require(text, "output");
    *text = Dup(c->config.ToText());
  });
}

void umtx_config_free(umtx_config* c) { delete c; }

void umtx_pipeline_options_init(umtx_pipeline_options* o) {
  if (!o) return;
  std::memset(o, 0, sizeof(*o));
  o->resume = 1;
}

umtx_status umtx_pipeline_run(const umtx_config* c, const umtx_pipeline_options* o, umtx_pipeline_summary* summary) {
  return Guard([&] {
    Require(c, "config");
    PipelineOptions p;
    if (o) {
      p.workspace = Str(o->workspace);
      p.resume = o->resume != 0;
      p.stop_after = Str(o->stop_after);
      p.max_new_chunks = o->max_new_chunks;
    }
    if (p.workspace.empty()) p.workspace = DefaultWorkspace();
    const auto r = RunPipeline(c->config, p);
    if (summary) {
      summary->stages_ran = r.ran;
      summary->stages_reused = r.reused;
      summary->complete = r.complete ? 1 : 0;
    }
  });
}

}  // extern "C"
