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

// umtx command line. Everything goes through the C interface.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "CLI11.hpp"
#include "umtx/umtx.h"

namespace fs = std::filesystem;

namespace {

struct Globals {
  std::uint64_t seed = 1;
  int workers = 1;
  bool resume = true;
  bool verbose = false;
  std::string workspace;
};

struct CommandFailed {
  umtx_status status;
};

void Check(umtx_status s) {
  if (s != UMTX_OK) throw CommandFailed{s};
}

// Takes ownership of a library string.
std::string Take(char* s) {
  std::string out = s ? s : "";
  umtx_string_free(s);
  return out;
}

const char* CStr(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

// Stdin and stdout are staged through temporary files, since the library
// works on paths.
class StdStreams {
 public:
  ~StdStreams() {
    for (const auto& p : temps_) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  std::string Input(const std::string& path) {
    if (!path.empty() && path != "-") return path;
    const std::string tmp = Temp("in");
    std::ofstream out(tmp, std::ios::binary);
    out << std::cin.rdbuf();
    return tmp;
  }

  std::string Output(const std::string& path) {
    if (!path.empty() && path != "-") return path;
    stdout_file_ = Temp("out");
    return stdout_file_;
  }

  bool to_stdout() const { return !stdout_file_.empty(); }

  void Flush() {
    if (stdout_file_.empty()) return;
    std::ifstream in(stdout_file_, std::ios::binary);
    std::cout << in.rdbuf();
    std::cout.flush();
  }

 private:
  std::string Temp(const char* tag) {
    static int counter = 0;
    const fs::path p = fs::temp_directory_path() /
                       ("umtx-" + std::to_string(::getpid()) + "-" + tag + std::to_string(counter++));
    temps_.push_back(p);
    return p.string();
  }

  std::vector<fs::path> temps_;
  std::string stdout_file_;
};

void PrintMetrics(const std::string& metrics, bool data_on_stdout) {
  (data_on_stdout ? std::cerr : std::cout) << metrics;
}

void AddDecodeFlags(CLI::App* cmd, umtx_decode_options* d) {
  cmd->add_option("--beam", d->beam_size, "Beam size");
  cmd->add_option("--distortion_limit", d->distortion_limit, "Maximum jump; 0 monotone, negative unlimited");
  cmd->add_option("--table_limit", d->table_limit, "Candidates kept per source phrase");
  cmd->add_option("--unknown_prob", d->unknown_prob, "Phrase probability of copied unknown words");
}

void AddMertFlags(CLI::App* cmd, int* rounds, int* nbest, int* restarts, double* min_improvement) {
  cmd->add_option("--rounds", *rounds, "MERT rounds");
  cmd->add_option("--nbest", *nbest, "n-best size per round");
  cmd->add_option("--restarts", *restarts, "Random restarts per round");
  cmd->add_option("--min_improvement", *min_improvement, "Pool BLEU gain needed to accept a round");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Unsupervised phrase-based MT toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(umtx_version()));

  Globals g;
  if (const char* ws = std::getenv("UMTX_WORKSPACE")) g.workspace = ws;
  app.add_option("--seed", g.seed, "Random seed")->capture_default_str();
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  app.add_flag("--resume,!--no-resume", g.resume, "Reuse finished pipeline stages");
  app.add_option("--workspace", g.workspace, "Pipeline workspace (default $UMTX_WORKSPACE or .)");
  app.add_flag("-v,--verbose", g.verbose, "Progress messages");

  std::function<void()> run;

  // generate
  umtx_generate_options gen;
  umtx_generate_options_init(&gen);
  std::string gen_out;
  {
    auto* c = app.add_subcommand("generate", "Write a cipher language pair (mono, dev, test, key)");
    c->add_option("-o,--output", gen_out, "Output directory")->required();
    c->add_option("--cipher_seed", gen.cipher_seed, "Seed of the language pair");
    c->add_option("--vocab_size", gen.vocab_size);
    c->add_option("--successors", gen.successors);
    c->add_option("--names", gen.names);
    c->add_option("--numbers", gen.numbers);
    c->add_option("--comma_rate", gen.comma_rate);
    c->add_option("--min_len", gen.min_len);
    c->add_option("--max_len", gen.max_len);
    c->add_option("--reorder_rate", gen.reorder_rate);
    c->add_option("--mono_size", gen.mono_size);
    c->add_option("--dev_size", gen.dev_size);
    c->add_option("--test_size", gen.test_size);
    c->callback([&] {
      run = [&] {
        gen.out_dir = gen_out.c_str();
        gen.seed = g.seed;
        char* m = nullptr;
        Check(umtx_generate(&gen, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // preprocess
  umtx_preprocess_options pre;
  umtx_preprocess_options_init(&pre);
  std::string pre_in, pre_out, pre_tc, pre_lid, pre_keep;
  bool pre_train_tc = false, pre_truecase = true, pre_no_filter = false;
  {
    auto* c = app.add_subcommand("preprocess", "Tokenize, truecase and filter raw text");
    c->add_option("-i,--input", pre_in, "Raw text (default stdin)");
    c->add_option("-o,--output", pre_out, "Tokenized output (default stdout)");
    c->add_option("--truecase_model", pre_tc, "Truecasing model to apply, or to write with --train_truecaser");
    c->add_flag("--train_truecaser", pre_train_tc, "Train the truecaser on the input");
    c->add_flag("--truecase,!--no-truecase", pre_truecase, "Apply truecasing");
    c->add_flag("--no-length-filter", pre_no_filter, "Keep sentences of any length");
    c->add_option("--min_len", pre.min_len, "Minimum tokens");
    c->add_option("--max_len", pre.max_len, "Maximum tokens");
    c->add_option("--langid_model", pre_lid, "Language identification model");
    c->add_option("--keep_lang", pre_keep, "Keep only sentences classified as this label");
    c->callback([&] {
      run = [&] {
        StdStreams io;
        const std::string in = io.Input(pre_in), out = io.Output(pre_out);
        pre.input = in.c_str();
        pre.output = out.c_str();
        pre.truecase_model = CStr(pre_tc);
        pre.train_truecaser = pre_train_tc;
        pre.truecase = pre_truecase;
        pre.length_filter = !pre_no_filter;
        pre.langid_model = CStr(pre_lid);
        pre.keep_lang = CStr(pre_keep);
        pre.workers = g.workers;
        char* m = nullptr;
        Check(umtx_preprocess(&pre, &m));
        io.Flush();
        PrintMetrics(Take(m), io.to_stdout());
      };
    });
  }

  // langid
  std::vector<std::string> lid_specs;
  std::string lid_out;
  int lid_order = 3;
  {
    auto* c = app.add_subcommand("langid", "Train a character n-gram language identifier");
    c->add_option("--corpus", lid_specs, "label=path of a tokenized corpus; repeatable")->required();
    c->add_option("--order", lid_order, "Character n-gram order");
    c->add_option("-o,--output", lid_out, "Model file")->required();
    c->callback([&] {
      run = [&] {
        std::vector<std::string> labels, paths;
        for (const auto& s : lid_specs) {
          const auto eq = s.find('=');
          if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--corpus", "expected label=path");
          labels.push_back(s.substr(0, eq));
          paths.push_back(s.substr(eq + 1));
        }
        std::vector<const char*> lp, pp;
        for (std::size_t i = 0; i < labels.size(); ++i) {
          lp.push_back(labels[i].c_str());
          pp.push_back(paths[i].c_str());
        }
        Check(umtx_langid_train(lp.data(), pp.data(), lp.size(), lid_order, lid_out.c_str()));
      };
    });
  }

  // embed
  umtx_embed_options emb;
  umtx_embed_options_init(&emb);
  std::string emb_in, emb_out;
  {
    auto* c = app.add_subcommand("embed", "Train phrase embeddings (skip-gram, negative sampling)");
    c->add_option("-i,--input", emb_in, "Tokenized corpus")->required();
    c->add_option("-o,--output", emb_out, "word2vec text output")->required();
    c->add_option("--window", emb.window);
    c->add_option("--dim", emb.dim);
    c->add_option("--negatives", emb.negatives);
    c->add_option("--epochs", emb.epochs);
    c->add_option("--lr", emb.lr);
    c->add_option("--min_lr", emb.min_lr);
    c->add_option("--unigrams", emb.unigrams, "Unigram vocabulary cap");
    c->add_option("--bigrams", emb.bigrams, "Bigram vocabulary cap");
    c->add_option("--trigrams", emb.trigrams, "Trigram vocabulary cap");
    c->callback([&] {
      run = [&] {
        emb.corpus = emb_in.c_str();
        emb.output = emb_out.c_str();
        emb.seed = g.seed;
        emb.workers = g.workers;
        char* m = nullptr;
        Check(umtx_embed(&emb, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // map
  umtx_map_options map;
  umtx_map_options_init(&map);
  std::string map_src, map_tgt, map_out_src, map_out_tgt, map_dict, map_seed = "identical", map_seed_file,
                                                                     map_retrieval = "csls";
  {
    auto* c = app.add_subcommand("map", "Map two embedding spaces into a shared space");
    c->add_option("--src", map_src, "Source embeddings")->required();
    c->add_option("--tgt", map_tgt, "Target embeddings")->required();
    c->add_option("--out_src", map_out_src, "Mapped source embeddings")->required();
    c->add_option("--out_tgt", map_out_tgt, "Mapped target embeddings")->required();
    c->add_option("--dict_out", map_dict, "Final induced dictionary");
    c->add_option("--seed_dictionary", map_seed, "identical|numerals|frequency|file")
        ->check(CLI::IsMember({"identical", "numerals", "frequency", "file"}));
    c->add_option("--seed_file", map_seed_file, "Seed dictionary with --seed_dictionary file");
    c->add_option("--seed_size", map.seed_size);
    c->add_option("--retrieval", map_retrieval, "csls|nn")->check(CLI::IsMember({"csls", "nn"}));
    c->add_option("--csls_k", map.csls_k);
    c->add_option("--max_iters", map.max_iters);
    c->add_option("--tol", map.tol);
    c->callback([&] {
      run = [&] {
        map.src_vec = map_src.c_str();
        map.tgt_vec = map_tgt.c_str();
        map.out_src = map_out_src.c_str();
        map.out_tgt = map_out_tgt.c_str();
        map.dict_out = CStr(map_dict);
        map.seed_method = map_seed.c_str();
        map.seed_file = CStr(map_seed_file);
        map.retrieval = map_retrieval.c_str();
        map.workers = g.workers;
        char* m = nullptr;
        Check(umtx_map(&map, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // table
  umtx_table_options tab;
  umtx_table_options_init(&tab);
  std::string tab_src, tab_tgt, tab_bitext, tab_align, tab_out;
  bool tab_full = false;
  {
    auto* c = app.add_subcommand("table", "Induce a phrase table from mapped embeddings, or extract one");
    c->add_option("--src", tab_src, "Mapped source embeddings");
    c->add_option("--tgt", tab_tgt, "Mapped target embeddings");
    c->add_option("--k", tab.k, "Candidates per source phrase");
    c->add_option("--temperature", tab.temperature);
    c->add_flag("--full_vocab", tab_full, "Normalize over the whole target vocabulary");
    c->add_option("--bitext", tab_bitext, "Parallel text to extract from");
    c->add_option("--alignment", tab_align, "Pharaoh alignment of the bitext");
    c->add_option("--max_phrase_len", tab.max_phrase_len);
    c->add_option("-o,--output", tab_out, "Moses phrase table")->required();
    c->callback([&] {
      run = [&] {
        tab.src_vec = CStr(tab_src);
        tab.tgt_vec = CStr(tab_tgt);
        tab.bitext = CStr(tab_bitext);
        tab.alignment = CStr(tab_align);
        tab.softmax_full_vocab = tab_full;
        tab.output = tab_out.c_str();
        tab.workers = g.workers;
        char* m = nullptr;
        Check(umtx_table(&tab, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // lm
  std::string lm_in, lm_out;
  int lm_order = 5;
  {
    auto* c = app.add_subcommand("lm", "Estimate a Kneser-Ney language model");
    c->add_option("-i,--input", lm_in, "Tokenized corpus")->required();
    c->add_option("-o,--output", lm_out, "ARPA output")->required();
    c->add_option("--order", lm_order)->check(CLI::PositiveNumber);
    c->callback([&] {
      run = [&] {
        char* m = nullptr;
        Check(umtx_lm_train(lm_in.c_str(), lm_out.c_str(), lm_order, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // align
  umtx_align_options al;
  umtx_align_options_init(&al);
  std::string al_in, al_out, al_sym = "grow-diag-final-and";
  {
    auto* c = app.add_subcommand("align", "Word-align a bitext");
    c->add_option("-i,--input", al_in, "\"src ||| tgt\" lines")->required();
    c->add_option("-o,--output", al_out, "Pharaoh output")->required();
    c->add_option("--iterations", al.iterations);
    c->add_option("--lambda", al.lambda);
    c->add_option("--p0", al.p0);
    c->add_option("--symmetrization", al_sym)
        ->check(CLI::IsMember({"intersection", "union", "grow-diag-final-and"}));
    c->callback([&] {
      run = [&] {
        al.bitext = al_in.c_str();
        al.output = al_out.c_str();
        al.symmetrization = al_sym.c_str();
        al.workers = g.workers;
        char* m = nullptr;
        Check(umtx_align(&al, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // decode
  umtx_translate_options dec;
  umtx_translate_options_init(&dec);
  std::string dec_table, dec_lm, dec_w, dec_in, dec_out, dec_nbest;
  {
    auto* c = app.add_subcommand("decode", "Translate with a phrase-based system");
    c->add_option("--table", dec_table)->required();
    c->add_option("--lm", dec_lm)->required();
    c->add_option("--weights", dec_w, "Feature weights (default weights otherwise)");
    c->add_option("-i,--input", dec_in, "Tokenized input (default stdin)");
    c->add_option("-o,--output", dec_out, "Translations (default stdout)");
    c->add_option("--nbest_output", dec_nbest, "n-best list file");
    c->add_option("--nbest", dec.decode.nbest, "n-best size");
    AddDecodeFlags(c, &dec.decode);
    c->callback([&] {
      run = [&] {
        StdStreams io;
        const std::string in = io.Input(dec_in), out = io.Output(dec_out);
        dec.table = dec_table.c_str();
        dec.lm = dec_lm.c_str();
        dec.weights = CStr(dec_w);
        dec.input = in.c_str();
        dec.output = out.c_str();
        dec.nbest_output = CStr(dec_nbest);
        dec.decode.workers = g.workers;
        char* m = nullptr;
        Check(umtx_translate_file(&dec, &m));
        io.Flush();
        PrintMetrics(Take(m), io.to_stdout());
      };
    });
  }

  // tune
  umtx_tune_options tun;
  umtx_tune_options_init(&tun);
  std::string tun_table, tun_lm, tun_init, tun_src, tun_ref, tun_out, tun_trace;
  bool tun_cased = false;
  {
    auto* c = app.add_subcommand("tune", "MERT on a dev set");
    c->add_option("--table", tun_table)->required();
    c->add_option("--lm", tun_lm)->required();
    c->add_option("--initial", tun_init, "Initial weights");
    c->add_option("--dev_src", tun_src)->required();
    c->add_option("--dev_ref", tun_ref)->required();
    c->add_option("-o,--output", tun_out, "Tuned weights")->required();
    c->add_option("--trace", tun_trace, "Accepted pool BLEU per round");
    c->add_option("--max_sentences", tun.max_sentences, "Dev prefix used; 0 all");
    c->add_flag("--cased", tun_cased);
    AddMertFlags(c, &tun.rounds, &tun.nbest, &tun.restarts, &tun.min_improvement);
    AddDecodeFlags(c, &tun.decode);
    c->callback([&] {
      run = [&] {
        tun.table = tun_table.c_str();
        tun.lm = tun_lm.c_str();
        tun.initial_weights = CStr(tun_init);
        tun.dev_src = tun_src.c_str();
        tun.dev_ref = tun_ref.c_str();
        tun.output = tun_out.c_str();
        tun.trace_output = CStr(tun_trace);
        tun.seed = g.seed;
        tun.cased = tun_cased;
        tun.decode.workers = g.workers;
        char* m = nullptr;
        Check(umtx_tune(&tun, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // backtranslate
  umtx_backtranslate_options bt;
  umtx_backtranslate_options_init(&bt);
  std::string bt_table, bt_lm, bt_w, bt_mono, bt_rlm, bt_tsrc, bt_tref, bt_dsrc, bt_dref, bt_osyn, bt_otab, bt_ow,
      bt_sym = "grow-diag-final-and";
  bool bt_cased = false;
  {
    auto* c = app.add_subcommand("backtranslate", "One back-translation step: translate, train and tune the reverse system");
    c->add_option("--table", bt_table, "Current system table")->required();
    c->add_option("--lm", bt_lm, "Current system language model")->required();
    c->add_option("--weights", bt_w, "Current system weights");
    c->add_option("--initial_distortion_limit", bt.current_distortion_limit, "Distortion limit of the current system");
    c->add_option("--mono", bt_mono, "Authentic monolingual text")->required();
    c->add_option("--subset", bt.subset, "Sentences sampled; 0 all");
    c->add_option("--reverse_lm", bt_rlm, "Language model of the authentic side")->required();
    c->add_option("--tune_src", bt_tsrc);
    c->add_option("--tune_ref", bt_tref);
    c->add_option("--max_sentences", bt.tune_max_sentences, "Tuning prefix used; 0 all");
    c->add_option("--dev_src", bt_dsrc);
    c->add_option("--dev_ref", bt_dref);
    c->add_option("--out_synthetic", bt_osyn)->required();
    c->add_option("--out_table", bt_otab)->required();
    c->add_option("--out_weights", bt_ow)->required();
    c->add_option("--iterations", bt.iterations, "Aligner EM iterations");
    c->add_option("--symmetrization", bt_sym)->check(CLI::IsMember({"intersection", "union", "grow-diag-final-and"}));
    c->add_option("--max_phrase_len", bt.max_phrase_len);
    c->add_flag("--cased", bt_cased);
    AddMertFlags(c, &bt.rounds, &bt.nbest, &bt.restarts, &bt.min_improvement);
    AddDecodeFlags(c, &bt.decode);
    c->callback([&] {
      run = [&] {
        bt.current_table = bt_table.c_str();
        bt.current_lm = bt_lm.c_str();
        bt.current_weights = CStr(bt_w);
        bt.mono = bt_mono.c_str();
        bt.seed = g.seed;
        bt.reverse_lm = bt_rlm.c_str();
        bt.tune_src = CStr(bt_tsrc);
        bt.tune_ref = CStr(bt_tref);
        bt.dev_src = CStr(bt_dsrc);
        bt.dev_ref = CStr(bt_dref);
        bt.out_synthetic = bt_osyn.c_str();
        bt.out_table = bt_otab.c_str();
        bt.out_weights = bt_ow.c_str();
        bt.symmetrization = bt_sym.c_str();
        bt.cased = bt_cased;
        bt.decode.workers = g.workers;
        char* m = nullptr;
        Check(umtx_backtranslate(&bt, &m));
        PrintMetrics(Take(m), false);
      };
    });
  }

  // fix
  umtx_fix_options fx;
  umtx_fix_options_init(&fx);
  std::string fx_in, fx_out, fx_profile = "czech", fx_unk = "unk", fx_spans, fx_gaz, fx_policy, fx_align, fx_log;
  bool fx_strip = false, fx_reorder = false, fx_ner = false, fx_full = false, fx_quotes = false;
  {
    auto* c = app.add_subcommand("fix", "Repair a synthetic bitext (\"authentic ||| synthetic\")");
    c->add_option("-i,--input", fx_in, "Bitext (default stdin)");
    c->add_option("-o,--output", fx_out, "Repaired bitext (default stdout)");
    c->add_flag("--strip-untranslated,--strip_untranslated", fx_strip, "Replace words lacking target letters");
    c->add_option("--profile", fx_profile, "\"czech\" or a literal set of target letters");
    c->add_option("--unk", fx_unk, "Replacement token");
    c->add_flag("--reorder", fx_reorder, "Append a locally shuffled copy of the synthetic side");
    c->add_option("--reorder_window", fx.reorder_window);
    c->add_flag("--ner", fx_ner, "Named-entity pre-treatment");
    c->add_option("--spans", fx_spans, "Entity spans TSV (default tagger otherwise)");
    c->add_option("--gazetteer", fx_gaz);
    c->add_option("--policy", fx_policy, "Per-type actions");
    c->add_option("--alignment", fx_align, "Pharaoh alignment of the bitext");
    c->add_option("--lev_threshold", fx.lev_threshold);
    c->add_flag("--full_deletion", fx_full, "\"remove\" drops the hull instead of writing the unk token");
    c->add_option("--log", fx_log, "Replacement log");
    c->add_flag("--quotes", fx_quotes, "Normalize quotation marks");
    c->callback([&] {
      run = [&] {
        StdStreams io;
        const std::string in = io.Input(fx_in), out = io.Output(fx_out);
        fx.input = in.c_str();
        fx.output = out.c_str();
        fx.strip_untranslated = fx_strip;
        fx.profile = fx_profile.c_str();
        fx.unk = fx_unk.c_str();
        fx.reorder = fx_reorder;
        fx.seed = g.seed;
        fx.ner = fx_ner;
        fx.spans = CStr(fx_spans);
        fx.gazetteer = CStr(fx_gaz);
        fx.policy = CStr(fx_policy);
        fx.alignment = CStr(fx_align);
        fx.full_deletion = fx_full;
        fx.log_output = CStr(fx_log);
        fx.quotes = fx_quotes;
        char* m = nullptr;
        Check(umtx_fix(&fx, &m));
        io.Flush();
        PrintMetrics(Take(m), io.to_stdout());
      };
    });
  }

  // bleu
  std::string bl_hyp, bl_ref;
  bool bl_cased = false, bl_uncased = false;
  {
    auto* c = app.add_subcommand("bleu", "Corpus BLEU of tokenized text");
    c->add_option("hyp", bl_hyp, "Hypothesis")->required();
    c->add_option("ref", bl_ref, "Reference")->required();
    auto* cased = c->add_flag("--cased", bl_cased, "Case-sensitive (default)");
    c->add_flag("--uncased", bl_uncased, "Lowercase both sides")->excludes(cased);
    c->callback([&] {
      run = [&] {
        char* r = nullptr;
        Check(umtx_bleu(bl_hyp.c_str(), bl_ref.c_str(), bl_uncased ? 0 : 1, &r));
        std::cout << Take(r);
      };
    });
  }

  // pipeline
  std::string pl_config, pl_stop, pl_dump;
  std::size_t pl_max_chunks = 0;
  std::map<std::string, std::string> pl_overrides;
  std::vector<std::string> pl_keys;
  {
    auto* c = app.add_subcommand("pipeline", "Run the full training pipeline in the workspace");
    c->add_option("-c,--config", pl_config, "Configuration file");
    c->add_option("--stop_after", pl_stop, "Stop after this stage");
    c->add_option("--max_new_chunks", pl_max_chunks, "Translate at most this many new chunks");
    c->add_option("--print_config", pl_dump, "Write the effective configuration here and exit");
    // One flag per configuration key.
    umtx_config* defaults = nullptr;
    Check(umtx_config_new(&defaults));
    std::string text = Take([&] {
      char* t = nullptr;
      Check(umtx_config_text(defaults, &t));
      return t;
    }());
    umtx_config_free(defaults);
    std::istringstream lines(text);
    std::string line, section;
    while (std::getline(lines, line)) {
      if (line.empty() || line[0] == '#') continue;
      if (line[0] == '[') {
        section = line.substr(1, line.size() - 2);
        continue;
      }
      pl_keys.push_back(section + "." + line.substr(0, line.find(' ')));
    }
    for (const auto& key : pl_keys) {
      if (key == "global.seed" || key == "global.workers") continue;  // global flags
      c->add_option_function<std::string>(
          "--" + key, [&pl_overrides, key](const std::string& v) { pl_overrides[key] = v; }, "Config key " + key);
    }
    c->callback([&] {
      run = [&] {
        umtx_config* cfg = nullptr;
        Check(pl_config.empty() ? umtx_config_new(&cfg) : umtx_config_load(pl_config.c_str(), &cfg));
        std::unique_ptr<umtx_config, decltype(&umtx_config_free)> guard(cfg, umtx_config_free);
        if (app.count("--seed") || pl_config.empty()) {
          Check(umtx_config_set(cfg, "global.seed", std::to_string(g.seed).c_str()));
        }
        if (app.count("--workers") || pl_config.empty()) {
          Check(umtx_config_set(cfg, "global.workers", std::to_string(g.workers).c_str()));
        }
        for (const auto& [k, v] : pl_overrides) Check(umtx_config_set(cfg, k.c_str(), v.c_str()));
        if (!pl_dump.empty()) {
          char* t = nullptr;
          Check(umtx_config_text(cfg, &t));
          std::ofstream(pl_dump, std::ios::binary) << Take(t);
          return;
        }
        umtx_pipeline_options po;
        umtx_pipeline_options_init(&po);
        po.workspace = CStr(g.workspace);
        po.resume = g.resume;
        po.stop_after = CStr(pl_stop);
        po.max_new_chunks = pl_max_chunks;
        umtx_pipeline_summary s{};
        Check(umtx_pipeline_run(cfg, &po, &s));
        std::cout << "stages_ran=" << s.stages_ran << "\nstages_reused=" << s.stages_reused
                  << "\ncomplete=" << (s.complete ? "true" : "false") << "\n";
      };
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  umtx_set_verbose(g.verbose ? 1 : 0);
  try {
    run();
  } catch (const CommandFailed& f) {
    std::cerr << "umtx: " << umtx_status_name(f.status) << ": " << umtx_last_error() << "\n";
    return 1;
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  return 0;
}
