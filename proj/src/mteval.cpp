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

#include "umtx/mteval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace umtx::mteval {

BleuStats& BleuStats::operator+=(const BleuStats& o) {
  for (int n = 0; n < kBleuOrder; ++n) {
    match[n] += o.match[n];
    total[n] += o.total[n];
  }
  hyp_len += o.hyp_len;
  ref_len += o.ref_len;
  return *this;
}

namespace {

std::map<std::vector<std::string>, std::uint64_t> NgramCounts(const Tokens& t, int n) {
  std::map<std::vector<std::string>, std::uint64_t> c;
  for (std::size_t i = 0; i + static_cast<std::size_t>(n) <= t.size(); ++i) {
    c[std::vector<std::string>(t.begin() + static_cast<std::ptrdiff_t>(i),
                               t.begin() + static_cast<std::ptrdiff_t>(i) + n)]++;
  }
  return c;
}

Tokens Fold(const Tokens& t) {
  Tokens out;
  out.reserve(t.size());
  for (const auto& w : t) out.push_back(ToLower(w));
  return out;
}

}  // namespace

BleuStats ComputeStats(const Tokens& hyp_in, const Tokens& ref_in, bool cased) {
  const Tokens hyp = cased ? hyp_in : Fold(hyp_in);
  const Tokens ref = cased ? ref_in : Fold(ref_in);
  BleuStats s;
  s.hyp_len = hyp.size();
  s.ref_len = ref.size();
  for (int n = 1; n <= kBleuOrder; ++n) {
    auto hc = NgramCounts(hyp, n);
    auto rc = NgramCounts(ref, n);
    for (const auto& [g, c] : hc) {
      s.total[n - 1] += c;
      auto it = rc.find(g);
      if (it != rc.end()) s.match[n - 1] += std::min(c, it->second);
    }
  }
  return s;
}

BleuReport BleuFromStats(const BleuStats& s) {
  BleuReport r;
  r.hyp_len = s.hyp_len;
  r.ref_len = s.ref_len;
  if (s.hyp_len == 0) {
    r.brevity_penalty = 0.0;
    r.effective_order = 0;
    return r;
  }
  r.brevity_penalty = s.hyp_len >= s.ref_len
                          ? 1.0
                          : std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.hyp_len));
  double log_sum = 0.0;
  int order = 0;
  bool zero = false;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (s.total[n] == 0) continue;
    ++order;
    r.precisions[n] = static_cast<double>(s.match[n]) / static_cast<double>(s.total[n]);
    if (s.match[n] == 0) {
      zero = true;
    } else {
      log_sum += std::log(r.precisions[n]);
    }
  }
  r.effective_order = order;
  r.bleu = zero ? 0.0 : 100.0 * r.brevity_penalty * std::exp(log_sum / order);
  return r;
}

double BleuScore(const BleuStats& s) { return BleuFromStats(s).bleu; }

BleuReport CorpusBleu(const std::vector<Tokens>& hyps, const std::vector<Tokens>& refs, bool cased) {
  if (hyps.size() != refs.size()) {
    Fail(ErrorKind::kInvalidArgument, "bleu: " + std::to_string(hyps.size()) + " hypotheses vs " +
                                          std::to_string(refs.size()) + " references");
  }
  if (hyps.empty()) Fail(ErrorKind::kInvalidArgument, "bleu: empty corpus");
  BleuStats total;
  for (std::size_t i = 0; i < hyps.size(); ++i) total += ComputeStats(hyps[i], refs[i], cased);
  BleuReport r = BleuFromStats(total);
  r.cased = cased;
  return r;
}

double SentenceBleu(const Tokens& hyp, const Tokens& ref, bool cased) {
  if (hyp.empty()) return 0.0;
  const BleuStats s = ComputeStats(hyp, ref, cased);
  if (s.match[0] == 0) return 0.0;
  const double bp =
      s.hyp_len >= s.ref_len ? 1.0 : std::exp(1.0 - static_cast<double>(s.ref_len) / static_cast<double>(s.hyp_len));
  double log_sum = 0.0;
  int order = 0;
  for (int n = 0; n < kBleuOrder; ++n) {
    if (s.total[n] == 0) continue;
    ++order;
    double m = static_cast<double>(s.match[n]), t = static_cast<double>(s.total[n]);
    if (n > 0 && s.match[n] == 0) {
      m += 1.0;
      t += 1.0;
    }
    log_sum += std::log(m / t);
  }
  return 100.0 * bp * std::exp(log_sum / order);
}

std::string FormatReport(const BleuReport& r) {
  std::ostringstream out;
  out << "bleu=" << FormatDouble(r.bleu) << '\n';
  for (int n = 0; n < kBleuOrder; ++n) out << "p" << (n + 1) << '=' << FormatDouble(r.precisions[n]) << '\n';
  out << "bp=" << FormatDouble(r.brevity_penalty) << '\n';
  out << "hyp_len=" << r.hyp_len << '\n';
  out << "ref_len=" << r.ref_len << '\n';
  out << "effective_order=" << r.effective_order << '\n';
  out << "cased=" << (r.cased ? "true" : "false") << '\n';
  out << "tokenization=umtx\n";
  out << "not_computed=TER,BEER,CharacTER\n";
  return out.str();
}

}  // namespace umtx::mteval
