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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/pipeline.hpp"

using namespace umtx;

namespace {

struct Outcome {
  int rc = -1;
  std::string out, err;
};

// Runs the umtx binary through the shell with stdout and stderr captured.
Outcome Umtx(const testing::TempDir& dir, const std::string& args, const std::string& stdin_file = "") {
  const std::string out = dir / "stdout.txt", err = dir / "stderr.txt";
  std::string cmd = std::string("'") + UMTX_CLI_PATH + "' " + args + " >'" + out + "' 2>'" + err + "'";
  cmd += stdin_file.empty() ? " </dev/null" : " <'" + stdin_file + "'";
  const int status = std::system(cmd.c_str());
  Outcome o;
  o.rc = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  o.out = ReadFile(out);
  o.err = ReadFile(err);
  return o;
}

std::string Q(const std::string& s) { return "'" + s + "'"; }

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("bleu prints a report") {
    testing::TempDir dir;
    WriteFile(dir / "hyp", "the cat sat\n");
    WriteFile(dir / "ref", "the cat sat down\n");
    auto o = Umtx(dir, "bleu " + Q(dir / "hyp") + " " + Q(dir / "ref"));
    CHECK(o.rc == 0);
    CHECK(o.out.rfind("bleu=", 0) == 0);
    CHECK(o.out.find("bp=0.7165313105737893\n") != std::string::npos);
    CHECK(o.out.find("hyp_len=3\n") != std::string::npos);
    WriteFile(dir / "HYP", "THE CAT SAT DOWN\n");
    CHECK(Umtx(dir, "bleu --uncased " + Q(dir / "HYP") + " " + Q(dir / "ref")).out.rfind("bleu=100\n", 0) == 0);
    CHECK(Umtx(dir, "bleu " + Q(dir / "HYP") + " " + Q(dir / "ref")).out.rfind("bleu=0\n", 0) == 0);

    o = Umtx(dir, "bleu " + Q(dir / "hyp") + " " + Q(dir / "missing"));
    CHECK(o.rc != 0);
    CHECK(o.err.find("missing") != std::string::npos);
  }

  TEST_CASE("fix reads stdin and writes stdout") {
    testing::TempDir dir;
    WriteFile(dir / "in.bitext", "am sandigen Strand ||| auf písčitém Küste\nder Tee ||| čaj\n");
    const auto o = Umtx(dir, "fix --strip-untranslated --profile czech", dir / "in.bitext");
    CHECK(o.rc == 0);
    CHECK(o.out == "am sandigen Strand ||| auf unk Küste\nder Tee ||| unk\n");
    CHECK(o.err.find("stripped_tokens=2") != std::string::npos);
  }

  TEST_CASE("usage errors") {
    testing::TempDir dir;
    auto o = Umtx(dir, "bleu --no-such-flag a b");
    CHECK(o.rc == 109);
    CHECK(o.err.find("--no-such-flag") != std::string::npos);
    o = Umtx(dir, "bleu");
    CHECK(o.rc != 0);
    o = Umtx(dir, "frobnicate");
    CHECK(o.rc != 0);
    o = Umtx(dir, "pipeline --embed.nope 3");
    CHECK(o.rc == 109);
    o = Umtx(dir, "--help");
    CHECK(o.rc == 0);
    for (const char* sub : {"preprocess", "embed", "map", "table", "lm", "align", "decode", "tune", "backtranslate",
                            "fix", "bleu", "pipeline"}) {
      CHECK_MESSAGE(o.out.find(sub) != std::string::npos, sub);
    }
  }

  TEST_CASE("pipeline flags override config keys") {
    testing::TempDir dir;
    WriteFile(dir / "c.ini", "[embed]\ndim = 32\n");
    const auto o = Umtx(dir, "--seed 5 pipeline --config " + Q(dir / "c.ini") + " --table.k 7 --print_config " +
                                 Q(dir / "out.ini"));
    CHECK(o.rc == 0);
    const auto c = PipelineConfig::Load(dir / "out.ini");
    CHECK(c.Int("embed.dim") == 32);
    CHECK(c.Int("table.k") == 7);
    CHECK(c.Int("global.seed") == 5);
    CHECK(Umtx(dir, "pipeline --lm.order x --print_config " + Q(dir / "bad.ini")).rc != 0);
  }

  TEST_CASE("pipeline matches the subcommands run by hand") {
    testing::TempDir dir;
    WriteFile(dir / "c.ini", testing::TinyPipelineConfig());
    const std::string ws = dir / "ws";
    auto o = Umtx(dir, "--workspace " + Q(ws) + " pipeline --config " + Q(dir / "c.ini") + " --stop_after lm.b");
    REQUIRE(o.rc == 0);
    CHECK(o.out.find("complete=false") != std::string::npos);

    const std::string m = dir / "manual";
    auto ok = [&](const std::string& args) {
      const auto r = Umtx(dir, args);
      CHECK_MESSAGE(r.rc == 0, std::string(args + ": " + r.err));
    };
    ok("generate -o " + Q(m + "/corpus") +
       " --vocab_size 60 --names 6 --numbers 4 --mono_size 1500 --dev_size 40 --test_size 40");
    for (const std::string x : {"a", "b"}) {
      const std::string tc = Q(m + "/prep/truecase." + x);
      ok("preprocess --train_truecaser --truecase_model " + tc + " -i " + Q(m + "/corpus/mono." + x) + " -o " +
         Q(m + "/prep/mono." + x));
      for (const std::string split : {"dev", "test"}) {
        ok("preprocess --no-length-filter --truecase_model " + tc + " -i " + Q(m + "/corpus/" + split + "." + x) +
           " -o " + Q(m + "/prep/" + split + "." + x));
      }
      ok(std::string("--seed ") + (x == "a" ? "12" : "24") + " embed --dim 16 --epochs 3 --unigrams 2000 " +
         "--bigrams 500 --trigrams 200 -i " + Q(m + "/prep/mono." + x) + " -o " + Q(m + "/emb/" + x + ".vec"));
      ok("lm --order 3 -i " + Q(m + "/prep/mono." + x) + " -o " + Q(m + "/lm/" + x + ".arpa"));
    }
    ok("map --src " + Q(m + "/emb/a.vec") + " --tgt " + Q(m + "/emb/b.vec") + " --out_src " + Q(m + "/map/a.vec") +
       " --out_tgt " + Q(m + "/map/b.vec") + " --dict_out " + Q(m + "/map/dict.a-b.tsv"));
    ok("table --k 5 --src " + Q(m + "/map/a.vec") + " --tgt " + Q(m + "/map/b.vec") + " -o " +
       Q(m + "/tables/initial.a-b.pt"));
    ok("table --k 5 --src " + Q(m + "/map/b.vec") + " --tgt " + Q(m + "/map/a.vec") + " -o " +
       Q(m + "/tables/initial.b-a.pt"));

    const auto manifest = PipelineManifest::Load(ws + "/" + kManifestFile);
    REQUIRE(manifest.runs.size() == 1);
    std::size_t compared = 0;
    for (const auto& s : manifest.runs[0].stages) {
      for (const auto& f : s.outputs) {
        CHECK_MESSAGE(DigestFile(m + "/" + f.path) == f.digest, f.path);
        ++compared;
      }
    }
    CHECK(compared == 24);
  }
}
