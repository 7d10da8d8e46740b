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

// Single-reference BLEU.

#ifndef UMTX_MTEVAL_HPP_
#define UMTX_MTEVAL_HPP_

#include <array>
#include <string>
#include <vector>

#include "umtx/common.hpp"

namespace umtx::mteval {

constexpr int kBleuOrder = 4;

// Sufficient statistics; corpus BLEU is a function of their sum.
struct BleuStats {
  std::array<std::uint64_t, kBleuOrder> match{};
  std::array<std::uint64_t, kBleuOrder> total{};
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats ComputeStats(const Tokens& hyp, const Tokens& ref, bool cased = true);

struct BleuReport {
  double bleu = 0.0;  // [0, 100]
  std::array<double, kBleuOrder> precisions{};
  double brevity_penalty = 1.0;
  std::uint64_t hyp_len = 0;
  std::uint64_t ref_len = 0;
  int effective_order = kBleuOrder;
  bool cased = true;
};

// Orders without any hypothesis n-gram are left out of the geometric mean.
BleuReport BleuFromStats(const BleuStats& s);
double BleuScore(const BleuStats& s);

BleuReport CorpusBleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs, bool cased = true);

// Add-one smoothing on orders 2..4 that have zero matches.
double SentenceBleu(const Tokens& hyp, const Tokens& ref, bool cased = true);

// key=value lines.
std::string FormatReport(const BleuReport& r);

}  // namespace umtx::mteval

#endif  // UMTX_MTEVAL_HPP_
