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

#include "umtx/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>

#include "umtx/backtrans.hpp"
#include "umtx/mteval.hpp"
#include "umtx/stages.hpp"

namespace umtx {

namespace fs = std::filesystem;

std::string DefaultWorkspace() {
  const char* env = std::getenv("UMTX_WORKSPACE");
  return (env && *env) ? env : ".";
}

namespace {

using stages::Metrics;

struct StopRequested {};

class Runner {
 public:
  Runner(const PipelineConfig& cfg, const PipelineOptions& opt) : cfg_(cfg), opt_(opt) {
    ws_ = fs::absolute(opt.workspace.empty() ? DefaultWorkspace() : opt.workspace).lexically_normal();
    fs::create_directories(ws_);
    manifest_path_ = (ws_ / kManifestFile).string();
    result_.manifest = PipelineManifest::Load(manifest_path_);
    previous_runs_ = result_.manifest.runs.size();
    result_.manifest.runs.push_back({cfg.ToText(), {}});
    result_.manifest.Save(manifest_path_);
  }

  std::string Path(const std::string& rel) const { return (ws_ / rel).string(); }

  std::string Rel(const std::string& p) const {
    const fs::path abs = fs::absolute(p).lexically_normal();
    const fs::path rel = abs.lexically_relative(ws_);
    if (!rel.empty() && *rel.begin() != "..") return rel.generic_string();
    return abs.generic_string();
  }

  std::vector<FileDigest> Digests(const std::vector<std::string>& paths) const {
    std::vector<FileDigest> out;
    for (const auto& p : paths) {
      if (!FileExists(p)) Fail(ErrorKind::kIo, "missing artifact " + p);
      out.push_back({Rel(p), DigestFile(p)});
    }
    return out;
  }

  // Runs or reuses one stage; returns its record.
  const StageRecord& Stage(const std::string& name, const std::string& hash, const std::vector<std::string>& inputs,
                           const std::vector<std::string>& outputs, const std::function<Metrics()>& fn) {
    result_.stage_names.push_back(name);
    StageRecord rec;
    rec.name = name;
    rec.config_hash = hash;
    rec.inputs = Digests(inputs);
    if (const StageRecord* prev = PreviousRecord(name); opt_.resume && prev && Reusable(*prev, rec, outputs)) {
      rec.status = "reused";
      rec.outputs = prev->outputs;
      rec.metrics = prev->metrics;
      LogInfo("stage " + name + ": reused");
      ++result_.reused;
      return Append(std::move(rec));
    }
    LogInfo("stage " + name + ": running");
    const auto t0 = std::chrono::steady_clock::now();
    try {
      rec.metrics = fn();
      rec.outputs = Digests(outputs);
      rec.status = "ran";
    } catch (const std::exception& e) {
      rec.status = "failed";
      rec.error = e.what();
      std::replace(rec.error.begin(), rec.error.end(), '\n', ' ');
      Append(std::move(rec));
      throw;
    }
    if (cfg_.Bool("global.record_wall_time")) {
      rec.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    ++result_.ran;
    return Append(std::move(rec));
  }

  // Records a stage that stopped early; never reusable.
  void Partial(const std::string& name, const std::string& hash, Metrics metrics) {
    StageRecord rec;
    rec.name = name;
    rec.status = "partial";
    rec.config_hash = hash;
    rec.metrics = std::move(metrics);
    Append(std::move(rec));
  }

  void MaybeStop(const std::string& name) const {
    if (!opt_.stop_after.empty() && name == opt_.stop_after) throw StopRequested{};
  }

  PipelineResult& result() { return result_; }

 private:
  const StageRecord* PreviousRecord(const std::string& name) const {
    for (std::size_t r = previous_runs_; r-- > 0;) {
      const auto& stages = result_.manifest.runs[r].stages;
      for (auto s = stages.rbegin(); s != stages.rend(); ++s) {
        if (s->name == name && (s->status == "ran" || s->status == "reused")) return &*s;
      }
    }
    return nullptr;
  }

  bool Reusable(const StageRecord& prev, const StageRecord& now, const std::vector<std::string>& outputs) const {
    if (prev.config_hash != now.config_hash || prev.inputs != now.inputs) return false;
    if (prev.outputs.size() != outputs.size()) return false;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      if (prev.outputs[i].path != Rel(outputs[i]) || !FileExists(outputs[i])) return false;
      if (DigestFile(outputs[i]) != prev.outputs[i].digest) return false;
    }
    return true;
  }

  const StageRecord& Append(StageRecord rec) {
    auto& stages = result_.manifest.runs.back().stages;
    stages.push_back(std::move(rec));
    result_.manifest.Save(manifest_path_);
    return stages.back();
  }

  const PipelineConfig& cfg_;
  const PipelineOptions& opt_;
  fs::path ws_;
  std::string manifest_path_;
  std::size_t previous_runs_ = 0;
  PipelineResult result_;
};

backtrans::DecodeSettings Settings(const PipelineConfig& c, int distortion_limit) {
  backtrans::DecodeSettings s;
  s.params.beam_size = static_cast<int>(c.Int("decode.beam"));
  s.params.distortion_limit = distortion_limit;
  s.params.nbest_n = 1;
  s.model.table_limit = static_cast<int>(c.Int("decode.table_limit"));
  s.model.unknown_prob = c.Real("decode.unknown_prob");
  return s;
}

decoder::MertOptions Mert(const PipelineConfig& c) {
  decoder::MertOptions m;
  m.rounds = static_cast<int>(c.Int("tune.rounds"));
  m.nbest_n = static_cast<int>(c.Int("tune.nbest"));
  m.random_restarts = static_cast<int>(c.Int("tune.restarts"));
  m.seed = static_cast<std::uint64_t>(c.Int("global.seed"));
  m.min_improvement = c.Real("tune.min_improvement");
  m.cased = c.Bool("eval.cased");
  m.workers = static_cast<int>(c.Int("global.workers"));
  return m;
}

align::FastAlignOptions AlignOpts(const PipelineConfig& c) {
  align::FastAlignOptions a;
  a.iterations = static_cast<int>(c.Int("align.iterations"));
  a.lambda = c.Real("align.lambda");
  a.p0 = c.Real("align.p0");
  a.workers = static_cast<int>(c.Int("global.workers"));
  return a;
}

double ParseMetric(const StageRecord& r, const std::string& key) {
  const std::string* v = r.Metric(key);
  double d = 0.0;
  if (!v || !ParseDouble(*v, &d)) Fail(ErrorKind::kRuntime, "stage " + r.name + " has no metric " + key);
  return d;
}

std::string SnapshotText(const backtrans::IterationRecord& r) {
  return "direction " + r.direction + "\nprovenance " + r.system.provenance + "\ntable " + r.system.table_path +
         "\nlm " + r.system.lm_path + "\nweights " + r.system.weights_path + "\ndistortion_limit " +
         std::to_string(r.system.distortion_limit) + "\niteration " + std::to_string(r.iteration) + "\ndev_bleu " +
         FormatDouble(r.dev_bleu) + "\n";
}

// Direction "x-y": X is the source language of the system.
struct Side {
  std::string self, other;
};

}  // namespace

PipelineResult RunPipeline(const PipelineConfig& cfg, const PipelineOptions& opt) {
  Runner r(cfg, opt);
  const int workers = static_cast<int>(cfg.Int("global.workers"));
  const auto seed = static_cast<std::uint64_t>(cfg.Int("global.seed"));
  const bool cased = cfg.Bool("eval.cased");
  const int dl_initial = static_cast<int>(cfg.Int("decode.initial_distortion_limit"));
  const int dl_bt = static_cast<int>(cfg.Int("decode.distortion_limit"));
  const std::string synth_tune = cfg.Str("tune.mode");
  if (synth_tune != "authentic" && synth_tune != "synthetic") {
    Fail(ErrorKind::kInvalidArgument, "config: tune.mode must be authentic or synthetic");
  }
  const bool tune_enabled = cfg.Bool("tune.enabled");

  try {
    // ---- data
    std::map<std::string, std::string> raw;  // "mono.a" -> path
    if (cfg.Bool("cipher.enabled")) {
      stages::GenerateArgs g;
      g.cipher.seed = static_cast<std::uint64_t>(cfg.Int("cipher.seed"));
      g.cipher.vocab_size = static_cast<std::size_t>(cfg.Int("cipher.vocab_size"));
      g.cipher.successors = static_cast<std::size_t>(cfg.Int("cipher.successors"));
      g.cipher.names = static_cast<std::size_t>(cfg.Int("cipher.names"));
      g.cipher.numbers = static_cast<std::size_t>(cfg.Int("cipher.numbers"));
      g.cipher.comma_rate = cfg.Real("cipher.comma_rate");
      g.cipher.min_len = static_cast<std::size_t>(cfg.Int("cipher.min_len"));
      g.cipher.max_len = static_cast<std::size_t>(cfg.Int("cipher.max_len"));
      g.cipher.reorder_rate = cfg.Real("cipher.reorder_rate");
      g.mono_size = static_cast<std::size_t>(cfg.Int("cipher.mono_size"));
      g.dev_size = static_cast<std::size_t>(cfg.Int("cipher.dev_size"));
      g.test_size = static_cast<std::size_t>(cfg.Int("cipher.test_size"));
      g.seed = seed;
      g.out_dir = r.Path("corpus");
      std::vector<std::string> outs;
      for (const char* n : {"mono.a", "mono.b", "dev.a", "dev.b", "test.a", "test.b", "key.tsv"}) {
        raw[n] = r.Path(std::string("corpus/") + n);
        outs.push_back(raw[n]);
      }
      r.Stage("generate", cfg.Hash({"cipher", "global.seed"}), {}, outs, [&] { return stages::GenerateCipher(g); });
      r.MaybeStop("generate");
    } else {
      const std::pair<const char*, const char*> keys[] = {{"mono.a", "data.mono_src"}, {"mono.b", "data.mono_tgt"},
                                                          {"dev.a", "data.dev_src"},   {"dev.b", "data.dev_tgt"},
                                                          {"test.a", "data.test_src"}, {"test.b", "data.test_tgt"}};
      for (const auto& [n, key] : keys) {
        if (!cfg.Str(key).empty()) raw[n] = cfg.Str(key);
      }
      for (const char* n : {"mono.a", "mono.b", "dev.a", "dev.b"}) {
        if (!raw.count(n)) Fail(ErrorKind::kInvalidArgument, std::string("config: missing data path for ") + n);
      }
      if (raw.count("test.a") != raw.count("test.b")) {
        Fail(ErrorKind::kInvalidArgument, "config: data.test_src and data.test_tgt go together");
      }
    }
    const bool have_test = raw.count("test.a") != 0;

    // ---- preprocess
    for (const char* x : {"a", "b"}) {
      const std::string X = x;
      std::vector<std::string> ins = {raw["mono." + X], raw["dev." + X]};
      std::vector<std::string> outs = {r.Path("prep/mono." + X), r.Path("prep/dev." + X)};
      if (have_test) {
        ins.push_back(raw["test." + X]);
        outs.push_back(r.Path("prep/test." + X));
      }
      const bool tc = cfg.Bool("preprocess.truecase");
      if (tc) outs.push_back(r.Path("prep/truecase." + X));
      r.Stage("preprocess." + X, cfg.Hash({"preprocess"}), ins, outs, [&] {
        stages::PreprocessArgs p;
        p.truecase = tc;
        p.truecase_model = tc ? r.Path("prep/truecase." + X) : "";
        p.limits.min_tokens = static_cast<std::size_t>(cfg.Int("preprocess.min_len"));
        p.limits.max_tokens = static_cast<std::size_t>(cfg.Int("preprocess.max_len"));
        p.workers = workers;
        p.input = ins[0];
        p.output = outs[0];
        p.train_truecaser = true;
        Metrics m = stages::Preprocess(p);
        p.train_truecaser = false;
        p.length_filter = false;
        for (std::size_t i = 1; i < ins.size(); ++i) {
          p.input = ins[i];
          p.output = outs[i];
          stages::Preprocess(p);
        }
        return m;
      });
      r.MaybeStop("preprocess." + X);
    }

    // ---- embeddings, mapping, initial tables, language models
    for (const char* x : {"a", "b"}) {
      const std::string X = x;
      r.Stage("embed." + X, cfg.Hash({"embed", "global.seed", "global.workers"}), {r.Path("prep/mono." + X)},
              {r.Path("emb/" + X + ".vec")}, [&] {
                stages::EmbedArgs e;
                e.corpus = r.Path("prep/mono." + X);
                e.output = r.Path("emb/" + X + ".vec");
                e.sgns.window = static_cast<int>(cfg.Int("embed.window"));
                e.sgns.dim = static_cast<int>(cfg.Int("embed.dim"));
                e.sgns.negatives = static_cast<int>(cfg.Int("embed.negatives"));
                e.sgns.epochs = static_cast<int>(cfg.Int("embed.epochs"));
                e.sgns.initial_lr = cfg.Real("embed.lr");
                e.sgns.min_lr = cfg.Real("embed.min_lr");
                e.sgns.seed = seed + (X == "a" ? 11 : 23);
                e.sgns.workers = workers;
                e.caps = {static_cast<std::size_t>(cfg.Int("embed.unigrams")),
                          static_cast<std::size_t>(cfg.Int("embed.bigrams")),
                          static_cast<std::size_t>(cfg.Int("embed.trigrams"))};
                return stages::Embed(e);
              });
      r.MaybeStop("embed." + X);
    }

    r.Stage("map", cfg.Hash({"map"}), {r.Path("emb/a.vec"), r.Path("emb/b.vec")},
            {r.Path("map/a.vec"), r.Path("map/b.vec"), r.Path("map/dict.a-b.tsv")}, [&] {
              stages::MapArgs m;
              m.src_vec = r.Path("emb/a.vec");
              m.tgt_vec = r.Path("emb/b.vec");
              m.out_src = r.Path("map/a.vec");
              m.out_tgt = r.Path("map/b.vec");
              m.dict_out = r.Path("map/dict.a-b.tsv");
              m.seed_method = cfg.Str("map.seed_dictionary");
              m.seed_size = static_cast<std::size_t>(cfg.Int("map.seed_size"));
              const std::string ret = cfg.Str("map.retrieval");
              if (ret != "csls" && ret != "nn") Fail(ErrorKind::kInvalidArgument, "config: map.retrieval is csls or nn");
              m.retrieval = ret == "csls" ? xmap::Retrieval::kCsls : xmap::Retrieval::kNearest;
              m.csls_k = static_cast<int>(cfg.Int("map.csls_k"));
              m.mapping.max_iters = static_cast<int>(cfg.Int("map.max_iters"));
              m.mapping.tol = cfg.Real("map.tol");
              m.mapping.workers = workers;
              return stages::Map(m);
            });
    r.MaybeStop("map");

    r.Stage("table", cfg.Hash({"table"}), {r.Path("map/a.vec"), r.Path("map/b.vec")},
            {r.Path("tables/initial.a-b.pt"), r.Path("tables/initial.b-a.pt")}, [&] {
              stages::InduceArgs t;
              t.options.k = static_cast<std::size_t>(cfg.Int("table.k"));
              t.options.temperature = cfg.Real("table.temperature");
              t.options.softmax_full_vocab = cfg.Bool("table.full_vocab");
              t.options.workers = workers;
              t.src_vec = r.Path("map/a.vec");
              t.tgt_vec = r.Path("map/b.vec");
              t.output = r.Path("tables/initial.a-b.pt");
              Metrics m = stages::InduceTable(t);
              std::swap(t.src_vec, t.tgt_vec);
              t.output = r.Path("tables/initial.b-a.pt");
              Metrics m2 = stages::InduceTable(t);
              return Metrics{{"pairs_a_b", m[1].second}, {"pairs_b_a", m2[1].second}};
            });
    r.MaybeStop("table");

    for (const char* x : {"a", "b"}) {
      const std::string X = x;
      r.Stage("lm." + X, cfg.Hash({"lm"}), {r.Path("prep/mono." + X)}, {r.Path("lm/" + X + ".arpa")}, [&] {
        return stages::TrainLm({r.Path("prep/mono." + X), r.Path("lm/" + X + ".arpa"),
                                static_cast<int>(cfg.Int("lm.order"))});
      });
      r.MaybeStop("lm." + X);
    }

    // ---- initial systems
    const std::size_t tune_cap = static_cast<std::size_t>(cfg.Int("tune.max_sentences"));
    const std::size_t syn_size = static_cast<std::size_t>(cfg.Int("tune.synthetic_size"));
    std::map<std::string, std::vector<backtrans::IterationRecord>> records;  // per direction

    auto dev_score = [&](const std::string& table, const std::string& lm, const std::string& weights, int dl,
                         const std::string& src, const std::string& ref) {
      backtrans::System sys(ptable::ReadMoses(table), std::make_shared<const lm::ArpaLM>(lm::ArpaLM::ReadArpa(lm)),
                            decoder::FeatureWeights::Load(weights), Settings(cfg, dl));
      return backtrans::DevBleu(sys, synthfix::ZipBitext(stages::ReadTokenized(src), stages::ReadTokenized(ref)),
                                workers, cased);
    };

    // Synthetic tuning set for direction x-y: the y-x system translates the
    // held-out tail of mono y. Returns {src, ref} paths.
    auto synthetic_dev = [&](const std::string& name, const Side& s, const std::string& table,
                             const std::string& weights, int dl) {
      const std::string src = r.Path("tune/" + name + "." + s.self), ref = r.Path("tune/" + name + "." + s.other);
      std::vector<std::string> ins = {table, r.Path("lm/" + s.self + ".arpa"), r.Path("prep/mono." + s.other)};
      if (!weights.empty()) ins.push_back(weights);
      r.Stage("syndev." + name, cfg.Hash({"decode", "tune.synthetic_size"}) + "/" + std::to_string(dl), ins,
              {src, ref}, [&] {
                stages::SyntheticDevArgs a;
                a.table = table;
                a.lm = r.Path("lm/" + s.self + ".arpa");
                a.weights = weights;
                a.mono = r.Path("prep/mono." + s.other);
                a.size = syn_size;
                a.out_src = src;
                a.out_ref = ref;
                a.settings = Settings(cfg, dl);
                a.workers = workers;
                return stages::SyntheticDev(a);
              });
      return std::make_pair(src, ref);
    };

    for (const Side& s : {Side{"a", "b"}, Side{"b", "a"}}) {
      const std::string dir = s.self + "-" + s.other;
      const std::string table = r.Path("tables/initial." + dir + ".pt");
      const std::string lm = r.Path("lm/" + s.other + ".arpa");
      const std::string weights = r.Path("sys/initial." + dir + ".weights");
      std::string tune_src = r.Path("prep/dev." + s.self), tune_ref = r.Path("prep/dev." + s.other);
      if (tune_enabled && synth_tune == "synthetic") {
        // The reverse initial system, untuned.
        std::tie(tune_src, tune_ref) = synthetic_dev("initial." + dir, s,
                                                     r.Path("tables/initial." + s.other + "-" + s.self + ".pt"), "",
                                                     dl_initial);
      }
      r.Stage("initial." + dir, cfg.Hash({"decode", "tune", "eval", "global.seed"}),
              {table, lm, tune_src, tune_ref, r.Path("prep/dev." + s.self), r.Path("prep/dev." + s.other)},
              {weights}, [&] {
                Metrics m;
                if (tune_enabled) {
                  stages::TuneArgs t;
                  t.table = table;
                  t.lm = lm;
                  t.dev_src = tune_src;
                  t.dev_ref = tune_ref;
                  t.output = weights;
                  t.settings = Settings(cfg, dl_initial);
                  t.mert = Mert(cfg);
                  t.max_sentences = tune_cap;
                  m = stages::Tune(t);
                } else {
                  fs::create_directories(fs::path(weights).parent_path());
                  decoder::FeatureWeights{}.Save(weights);
                }
                m.emplace_back("dev_bleu", FormatDouble(dev_score(table, lm, weights, dl_initial,
                                                                  r.Path("prep/dev." + s.self),
                                                                  r.Path("prep/dev." + s.other))));
                return m;
              });
      const auto& rec = r.result().manifest.runs.back().stages.back();
      backtrans::IterationRecord ir;
      ir.iteration = 0;
      ir.direction = dir;
      ir.dev_bleu = ParseMetric(rec, "dev_bleu");
      ir.system = {dir, "initial", r.Rel(table), r.Rel(lm), r.Rel(weights), dl_initial};
      records[dir].push_back(ir);
      r.MaybeStop("initial." + dir);
    }

    // ---- back-translation iterations
    const int iters = static_cast<int>(cfg.Int("backtrans.iterations"));
    const double delta = cfg.Real("backtrans.divergence_delta");
    const std::size_t subset = static_cast<std::size_t>(cfg.Int("backtrans.subset"));
    // Current system per direction: (table, weights, distortion limit).
    struct Current {
      std::string table, weights;
      int dl;
    };
    std::map<std::string, Current> current = {
        {"a-b", {r.Path("tables/initial.a-b.pt"), r.Path("sys/initial.a-b.weights"), dl_initial}},
        {"b-a", {r.Path("tables/initial.b-a.pt"), r.Path("sys/initial.b-a.weights"), dl_initial}}};
    bool diverged = false;
    for (int k = 1; k <= iters && !diverged; ++k) {
      // B->A first: it consumes the A->B system of the previous iteration.
      for (const Side& s : {Side{"b", "a"}, Side{"a", "b"}}) {
        const std::string dir = s.self + "-" + s.other;  // the system being trained
        const std::string rev = s.other + "-" + s.self;  // the system translating
        const std::string name = "bt." + std::to_string(k) + "." + dir;
        const Current cur = current[rev];
        std::string tune_src = r.Path("prep/dev." + s.self), tune_ref = r.Path("prep/dev." + s.other);
        if (tune_enabled && synth_tune == "synthetic") {
          std::tie(tune_src, tune_ref) = synthetic_dev(name, s, cur.table, cur.weights, cur.dl);
        }
        // The held-out tail used for synthetic tuning stays out of training.
        const std::string mono = r.Path("prep/mono." + s.other);
        const std::string out_syn = r.Path("bt/" + name + ".bitext");
        const std::string out_table = r.Path("tables/" + name + ".pt");
        const std::string out_weights = r.Path("sys/" + name + ".weights");
        std::vector<std::string> ins = {cur.table,        cur.weights,
                                        r.Path("lm/" + s.self + ".arpa"), r.Path("lm/" + s.other + ".arpa"),
                                        mono,             r.Path("prep/dev." + s.self),
                                        r.Path("prep/dev." + s.other)};
        if (tune_enabled && synth_tune == "synthetic") {
          ins.push_back(tune_src);
          ins.push_back(tune_ref);
        }
        const auto& rec = r.Stage(
            name, cfg.Hash({"decode", "tune", "eval", "align", "backtrans.subset", "global.seed"}) + "/" +
                      std::to_string(cur.dl),
            ins, {out_syn, out_table, out_weights}, [&] {
              std::string mono_path = mono;
              if (synth_tune == "synthetic") {
                auto lines = ReadLines(mono);
                const std::size_t keep = lines.size() > syn_size ? lines.size() - syn_size : 0;
                lines.resize(keep);
                mono_path = r.Path("bt/" + name + ".pool");
                WriteLines(mono_path, lines);
              }
              stages::BacktranslateArgs b;
              b.current_table = cur.table;
              b.current_lm = r.Path("lm/" + s.self + ".arpa");
              b.current_weights = cur.weights;
              b.mono = mono_path;
              b.subset = subset;
              b.seed = seed * 1000003ULL + static_cast<std::uint64_t>(k) * 2 + (dir == "b-a" ? 0 : 1);
              b.reverse_lm = r.Path("lm/" + s.other + ".arpa");
              if (tune_enabled) {
                b.tune_src = tune_src;
                b.tune_ref = tune_ref;
                b.tune_max_sentences = tune_cap;
              }
              b.dev_src = r.Path("prep/dev." + s.self);
              b.dev_ref = r.Path("prep/dev." + s.other);
              b.out_synthetic = out_syn;
              b.out_table = out_table;
              b.out_weights = out_weights;
              b.current_settings = Settings(cfg, cur.dl);
              b.reverse_settings = Settings(cfg, dl_bt);
              b.train.align = AlignOpts(cfg);
              b.train.symmetrization = align::ParseSymmetrization(cfg.Str("align.symmetrization"));
              b.train.max_phrase_len = static_cast<int>(cfg.Int("align.max_phrase_len"));
              b.train.mert = Mert(cfg);
              b.train.workers = workers;
              b.cased = cased;
              auto m = stages::Backtranslate(b);
              if (mono_path != mono) fs::remove(mono_path);
              return m;
            });
        backtrans::IterationRecord ir;
        ir.iteration = k;
        ir.direction = dir;
        ir.synthetic_path = r.Rel(out_syn);
        ir.synthetic_size = static_cast<std::size_t>(ParseMetric(rec, "subset"));
        ir.dev_bleu = ParseMetric(rec, "dev_bleu");
        ir.system = {dir, "bt-iteration-" + std::to_string(k), r.Rel(out_table),
                     r.Rel(r.Path("lm/" + s.other + ".arpa")), r.Rel(out_weights), dl_bt};
        records[dir].push_back(ir);
        current[dir] = {out_table, out_weights, dl_bt};
        r.MaybeStop(name);
        if (backtrans::Diverging(records[dir], delta)) {
          LogWarning("back-translation diverging in direction " + dir + "; stopping after iteration " +
                     std::to_string(k));
          diverged = true;
        }
      }
    }

    // ---- selection
    std::map<std::string, backtrans::IterationRecord> best;
    {
      std::vector<std::string> ins;
      std::string material;
      for (const auto& [dir, recs] : records) {
        for (const auto& x : recs) {
          ins.push_back(r.Path(x.system.table_path));
          ins.push_back(r.Path(x.system.weights_path));
          material += dir + ":" + std::to_string(x.iteration) + ":" + FormatDouble(x.dev_bleu) + ";";
        }
        best[dir] = backtrans::SelectBest(recs);
      }
      const std::vector<std::string> outs = {r.Path("select/best.b-a.txt"), r.Path("select/best.a-b.txt"),
                                             r.Path("select/records.tsv")};
      r.Stage("select", DigestString(material), ins, outs, [&] {
        fs::create_directories(r.Path("select"));
        WriteFile(outs[0], SnapshotText(best["b-a"]));
        WriteFile(outs[1], SnapshotText(best["a-b"]));
        std::vector<std::string> lines = {"direction\titeration\tdev_bleu\tsynthetic_size\ttable\tweights"};
        for (const auto& [dir, recs] : records) {
          for (const auto& x : recs) {
            lines.push_back(dir + "\t" + std::to_string(x.iteration) + "\t" + FormatDouble(x.dev_bleu) + "\t" +
                            std::to_string(x.synthetic_size) + "\t" + x.system.table_path + "\t" +
                            x.system.weights_path);
          }
        }
        WriteLines(outs[2], lines);
        return Metrics{{"best_b_a", best["b-a"].system.provenance},
                       {"best_b_a_dev_bleu", FormatDouble(best["b-a"].dev_bleu)},
                       {"best_a_b", best["a-b"].system.provenance},
                       {"best_a_b_dev_bleu", FormatDouble(best["a-b"].dev_bleu)}};
      });
      r.MaybeStop("select");
    }

    // ---- full-corpus translation with the selected B->A system
    const auto& sel = best["b-a"];
    const std::string sel_table = r.Path(sel.system.table_path), sel_weights = r.Path(sel.system.weights_path);
    const std::string sel_lm = r.Path(sel.system.lm_path);
    {
      const std::size_t chunk = static_cast<std::size_t>(cfg.Int("backtrans.chunk_size"));
      const std::size_t n = ReadLines(r.Path("prep/mono.b")).size();
      std::vector<std::string> outs;
      for (std::size_t c = 0; c * chunk < n; ++c) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "chunk_%06zu.txt", c);
        outs.push_back(r.Path(std::string("synth/chunks/") + buf));
      }
      outs.push_back(r.Path("synth/chunks/checkpoint.tsv"));
      outs.push_back(r.Path("synth/original.bitext"));
      const std::string hash = cfg.Hash({"decode", "backtrans.chunk_size"}) + "/" + std::to_string(sel.system.distortion_limit);
      stages::TranslateCorpusArgs t;
      t.table = sel_table;
      t.lm = sel_lm;
      t.weights = sel_weights;
      t.input = r.Path("prep/mono.b");
      t.chunk_dir = r.Path("synth/chunks");
      t.output_bitext = r.Path("synth/original.bitext");
      t.chunk_size = chunk;
      t.max_new_chunks = opt.max_new_chunks;
      t.settings = Settings(cfg, sel.system.distortion_limit);
      t.workers = workers;
      Metrics partial;
      try {
        r.Stage("translate", hash, {sel_table, sel_weights, sel_lm, t.input}, outs, [&]() -> Metrics {
          auto m = stages::TranslateCorpus(t);
          for (const auto& [k, v] : m) {
            if (k == "complete" && v != "true") {
              partial = m;
              throw StopRequested{};
            }
          }
          return m;
        });
      } catch (const StopRequested&) {
        r.Partial("translate", hash, partial);
        throw;
      }
      r.MaybeStop("translate");
    }

    // ---- synthfix variants: noCzech, then reordered, then NER
    stages::FixArgs fx;
    fx.profile = cfg.Str("synthfix.profile");
    fx.unk = cfg.Str("synthfix.unk");
    fx.reorder_window = static_cast<int>(cfg.Int("synthfix.reorder_window"));
    fx.seed = seed;
    fx.pretreat.lev_threshold = static_cast<int>(cfg.Int("synthfix.lev_threshold"));
    fx.pretreat.unk = fx.unk;
    fx.pretreat.full_deletion = cfg.Bool("synthfix.full_deletion");
    fx.align = AlignOpts(cfg);
    {
      stages::FixArgs a = fx;
      a.input = r.Path("synth/original.bitext");
      a.output = r.Path("synth/nocz.bitext");
      a.strip_untranslated = true;
      r.Stage("fix.nocz", cfg.Hash({"synthfix.profile", "synthfix.unk"}), {a.input}, {a.output},
              [&] { return stages::Fix(a); });
      r.MaybeStop("fix.nocz");
    }
    {
      stages::FixArgs a = fx;
      a.input = r.Path("synth/nocz.bitext");
      a.output = r.Path("synth/reordered.bitext");
      a.reorder = true;
      r.Stage("fix.reordered", cfg.Hash({"synthfix.reorder_window", "global.seed"}), {a.input}, {a.output},
              [&] { return stages::Fix(a); });
      r.MaybeStop("fix.reordered");
    }
    {
      stages::FixArgs a = fx;
      a.input = r.Path("synth/reordered.bitext");
      a.output = r.Path("synth/ner.bitext");
      a.log_output = r.Path("synth/ner.log");
      a.ner = true;
      a.gazetteer = cfg.Str("data.gazetteer");
      a.policy = cfg.Str("synthfix.policy");
      std::vector<std::string> ins = {a.input};
      if (!a.gazetteer.empty()) ins.push_back(a.gazetteer);
      if (!a.policy.empty()) ins.push_back(a.policy);
      r.Stage("fix.ner", cfg.Hash({"synthfix", "align"}), ins, {a.output, a.log_output},
              [&] { return stages::Fix(a); });
      r.MaybeStop("fix.ner");
    }

    // ---- evaluation on the test set
    if (have_test) {
      const auto& ab = best["a-b"];
      const std::vector<std::string> outs = {r.Path("eval/test.b-a.hyp"), r.Path("eval/test.a-b.hyp"),
                                             r.Path("eval/report.txt")};
      r.Stage("eval", cfg.Hash({"decode", "eval"}) + "/" + std::to_string(sel.system.distortion_limit) + "/" +
                          std::to_string(ab.system.distortion_limit),
              {sel_table, sel_weights, sel_lm, r.Path(ab.system.table_path), r.Path(ab.system.weights_path),
               r.Path(ab.system.lm_path), r.Path("prep/test.a"), r.Path("prep/test.b")},
              outs, [&] {
                const auto test_a = stages::ReadTokenized(r.Path("prep/test.a"));
                const auto test_b = stages::ReadTokenized(r.Path("prep/test.b"));
                auto run = [&](const backtrans::IterationRecord& x, const std::vector<Tokens>& in,
                               const std::string& out) {
                  backtrans::System sys(ptable::ReadMoses(r.Path(x.system.table_path)),
                                        std::make_shared<const lm::ArpaLM>(lm::ArpaLM::ReadArpa(r.Path(x.system.lm_path))),
                                        decoder::FeatureWeights::Load(r.Path(x.system.weights_path)),
                                        Settings(cfg, x.system.distortion_limit));
                  auto hyp = sys.TranslateAll(in, workers);
                  stages::WriteTokenized(out, hyp);
                  return hyp;
                };
                const auto hyp_ba = run(sel, test_b, outs[0]);
                const auto hyp_ab = run(ab, test_a, outs[1]);
                const auto bleu_ba = mteval::CorpusBleu(hyp_ba, test_a, cased);
                const auto bleu_ab = mteval::CorpusBleu(hyp_ab, test_b, cased);
                const double acc = backtrans::DeciphermentAccuracy(hyp_ba, test_a);
                std::string report = "system_b_a=" + sel.system.provenance + "\n" + "decipherment_accuracy=" +
                                     FormatDouble(acc) + "\n" + "[b-a]\n" + mteval::FormatReport(bleu_ba) +
                                     "[a-b]\nsystem_a_b=" + ab.system.provenance + "\n" +
                                     mteval::FormatReport(bleu_ab);
                WriteFile(outs[2], report);
                return Metrics{{"test_bleu_b_a", FormatDouble(bleu_ba.bleu)},
                               {"test_bleu_a_b", FormatDouble(bleu_ab.bleu)},
                               {"decipherment_accuracy", FormatDouble(acc)}};
              });
    }
    r.result().complete = true;
  } catch (const StopRequested&) {
    // Partial run requested; the manifest already holds everything done.
  }
  return std::move(r.result());
}

}  // namespace umtx
