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

// Interpolated Kneser-Ney from the textbook recursion, for checking the model.

#ifndef UMTX_TESTS_SUPPORT_KN_ORACLE_HPP_
#define UMTX_TESTS_SUPPORT_KN_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "umtx/ngram_lm.hpp"

namespace umtx::testing {

using Gram = std::vector<std::string>;

// Interpolated Kneser-Ney written directly from the textbook recursion over
// string n-grams, independent of the model's tables.
class KnOracle {
 public:
  KnOracle(const std::vector<Tokens>& corpus, int order) : n_(order) {
    raw_.resize(order);
    words_ = {lm::kEos, lm::kUnk};
    for (const auto& s : corpus) {
      Gram padded(order - 1, lm::kBos);
      for (const auto& w : s) padded.push_back(w), words_.insert(w);
      padded.push_back(lm::kEos);
      for (int k = 1; k <= order; ++k) {
        for (std::size_t i = 0; i + k <= padded.size(); ++i) {
          Gram g(padded.begin() + i, padded.begin() + i + k);
          if (g.back() == lm::kBos) continue;
          raw_[k - 1][g]++;
        }
      }
    }
    adj_.resize(order);
    adj_[order - 1] = raw_[order - 1];
    for (int k = order - 1; k >= 1; --k) {
      std::map<Gram, std::set<std::string>> left;
      for (const auto& [g, c] : raw_[k]) left[Gram(g.begin() + 1, g.end())].insert(g[0]);
      for (const auto& [g, c] : raw_[k - 1]) {
        adj_[k - 1][g] = (g[0] == lm::kBos || !left.count(g)) ? c : left[g].size();
      }
    }
    for (int k = 1; k <= order; ++k) {
      double n1 = 0, n2 = 0;
      for (const auto& [g, c] : adj_[k - 1]) n1 += c == 1, n2 += c == 2;
      double d = n1 + n2 > 0 ? n1 / (n1 + 2 * n2) : 0.0;
      disc_.push_back(d > 0 ? d : 0.5);
    }
  }

  double P(const Gram& history, const std::string& w) const {
    Gram h = history;
    if (static_cast<int>(h.size()) > n_ - 1) h.erase(h.begin(), h.end() - (n_ - 1));
    const std::string word = words_.count(w) ? w : std::string(lm::kUnk);
    return Rec(h, word);
  }

  double Score(const Tokens& s) const {
    Gram h(n_ - 1, lm::kBos);
    double lp = 0;
    for (const auto& w : s) {
      lp += std::log10(P(h, w));
      h.push_back(words_.count(w) ? w : lm::kUnk);
    }
    return lp + std::log10(P(h, lm::kEos));
  }

  const std::set<std::string>& words() const { return words_; }

 private:
  double Rec(const Gram& h, const std::string& w) const {
    const int k = static_cast<int>(h.size()) + 1;
    const double d = disc_[k - 1];
    if (k == 1) {
      double total = 0, types = 0;
      for (const auto& [g, c] : adj_[0]) total += c, types += 1;
      const double predictable = static_cast<double>(words_.size());
      double p = d * types / total / predictable;
      auto it = adj_[0].find(Gram{w});
      if (it != adj_[0].end()) p += std::max(it->second - d, 0.0) / total;
      return p;
    }
    double total = 0, types = 0, c = 0;
    for (const auto& [g, cnt] : adj_[k - 1]) {
      if (std::equal(h.begin(), h.end(), g.begin())) {
        total += cnt, types += 1;
        if (g.back() == w) c = cnt;
      }
    }
    const Gram shorter(h.begin() + 1, h.end());
    if (total == 0) return Rec(shorter, w);
    return std::max(c - d, 0.0) / total + d * types / total * Rec(shorter, w);
  }

  int n_;
  std::vector<std::map<Gram, double>> raw_, adj_;
  std::vector<double> disc_;
  std::set<std::string> words_;  // predictable words: vocabulary minus <s>
};

}  // namespace umtx::testing

#endif  // UMTX_TESTS_SUPPORT_KN_ORACLE_HPP_
