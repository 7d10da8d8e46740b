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

// Exhaustive-search oracle for the phrase-based decoder.

#ifndef UMTX_TESTS_SUPPORT_DECODER_ORACLE_HPP_
#define UMTX_TESTS_SUPPORT_DECODER_ORACLE_HPP_

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "test_util.hpp"
#include "umtx/decoder.hpp"

namespace umtx::testing {

using decoder::FeatureVector;
using decoder::FeatureWeights;
using decoder::ModelOptions;

struct Instance {
  ptable::PhraseTable table;
  lm::ArpaLM lm;
  Tokens src;
  FeatureWeights w;
  int dl = -1;
};

// Small random model: source phrases up to 3 words, at most 3 candidates each,
// some source words left out of the table.
inline Instance RandomInstance(Rng* rng) {
  Instance in;
  const auto sw = Letters(5);
  std::vector<std::string> tw;
  for (const auto& w : Letters(6)) tw.push_back("T" + w);
  std::vector<Tokens> lm_corpus;
  for (int i = 0; i < 30; ++i) lm_corpus.push_back(RandomSentence(rng, tw, 1, 6));
  in.lm = lm::TrainLm(lm_corpus, 2 + static_cast<int>(rng->Below(2)));

  in.src = RandomSentence(rng, sw, 1, 5);
  for (std::size_t b = 0; b < in.src.size(); ++b) {
    for (std::size_t len = 1; len <= 3 && b + len <= in.src.size(); ++len) {
      if (rng->Uniform() < (len == 1 ? 0.2 : 0.6)) continue;
      const std::string s = Join(Tokens(in.src.begin() + b, in.src.begin() + b + len), " ");
      if (in.table.entries.count(s)) continue;
      auto& cands = in.table.entries[s];
      const std::size_t k = 1 + rng->Below(3);
      for (std::size_t c = 0; c < k; ++c) {
        ptable::Candidate x;
        x.tgt = Join(RandomSentence(rng, tw, 1, 2), " ");
        bool dup = false;
        for (const auto& y : cands) dup |= y.tgt == x.tgt;
        if (dup) continue;
        x.fwd = 0.05 + 0.95 * rng->Uniform();
        x.bwd = 0.05 + 0.95 * rng->Uniform();
        cands.push_back(x);
      }
    }
  }
  for (int k = 0; k < decoder::kNumFeatures; ++k) in.w.w[k] = rng->Uniform() * 2 - 0.5;
  const int dls[] = {-1, 0, 1, 2};
  in.dl = dls[rng->Below(4)];
  return in;
}

struct Derivation {
  std::string text;
  FeatureVector f{};
  std::vector<std::pair<int, int>> spans;
};

// Every legal derivation, enumerated depth-first from the rules: each source
// word covered once, jumps |start - previous end| <= dl, and no step may leave
// the first gap more than dl words behind its end.
inline std::vector<Derivation> Enumerate(const Instance& in, const ModelOptions& mo) {
  struct Opt {
    int b, e;
    Tokens tgt;
    double lf, lb;
  };
  const int n = static_cast<int>(in.src.size());
  std::vector<Opt> opts;
  for (int b = 0; b < n; ++b) {
    bool single = false;
    for (int e = b + 1; e <= n; ++e) {
      const auto* c = in.table.Find(Join(Tokens(in.src.begin() + b, in.src.begin() + e), " "));
      if (!c) continue;
      single |= e == b + 1;
      for (std::size_t k = 0; k < c->size() && static_cast<int>(k) < mo.table_limit; ++k) {
        opts.push_back({b, e, SplitWhitespace((*c)[k].tgt), std::log((*c)[k].fwd), std::log((*c)[k].bwd)});
      }
    }
    if (!single) opts.push_back({b, b + 1, {in.src[b]}, std::log(mo.unknown_prob), std::log(mo.unknown_prob)});
  }
  std::vector<Derivation> out;
  std::vector<char> cov(n, 0);
  std::vector<int> path;
  std::function<void(int, int)> rec = [&](int covered, int last_end) {
    if (covered == n) {
      Derivation d;
      Tokens t;
      int prev = 0;
      for (int oi : path) {
        const auto& o = opts[oi];
        d.f[decoder::kFwd] += o.lf;
        d.f[decoder::kBwd] += o.lb;
        d.f[decoder::kWordPenalty] -= static_cast<double>(o.tgt.size());
        d.f[decoder::kPhrasePenalty] -= 1;
        d.f[decoder::kDistortion] -= std::abs(o.b - prev);
        prev = o.e;
        t.insert(t.end(), o.tgt.begin(), o.tgt.end());
        d.spans.emplace_back(o.b, o.e);
      }
      d.f[decoder::kLm] = in.lm.ScoreSentence(t) * std::log(10.0);
      d.text = Join(t, " ");
      out.push_back(d);
      return;
    }
    for (int oi = 0; oi < static_cast<int>(opts.size()); ++oi) {
      const auto& o = opts[oi];
      bool free = true;
      for (int p = o.b; p < o.e; ++p) free &= !cov[p];
      if (!free) continue;
      if (in.dl >= 0 && std::abs(o.b - last_end) > in.dl) continue;
      for (int p = o.b; p < o.e; ++p) cov[p] = 1;
      const int now = covered + (o.e - o.b);
      int gap = 0;
      while (gap < n && cov[gap]) ++gap;
      const bool stranded = in.dl >= 0 && now < n && gap < o.e && o.e - gap > in.dl;
      if (!stranded) {
        path.push_back(oi);
        rec(now, o.e);
        path.pop_back();
      }
      for (int p = o.b; p < o.e; ++p) cov[p] = 0;
    }
  };
  rec(0, 0);
  return out;
}

inline double Dot(const FeatureWeights& w, const FeatureVector& f) {
  double s = 0;
  for (int k = 0; k < decoder::kNumFeatures; ++k) s += w.w[k] * f[k];
  return s;
}

}  // namespace umtx::testing

#endif  // UMTX_TESTS_SUPPORT_DECODER_ORACLE_HPP_
