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

#include "umtx/cipher.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace umtx::cipher {

namespace {

const std::vector<std::string> kConsA = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z"};
const std::vector<std::string> kVowA = {"a", "e", "i", "o", "u"};
const std::vector<std::string> kConsB = {"b", "č", "d", "ď", "h", "j", "k", "l", "m", "ň", "p", "ř", "s", "š", "t", "ť", "v", "ž"};
const std::vector<std::string> kVowB = {"á", "é", "ě", "í", "ó", "ú", "ů", "ý"};
const std::vector<std::string> kNameCons = {"B", "D", "G", "H", "K", "L", "M", "N", "R", "T", "V", "W"};

std::string Syllables(const std::vector<std::string>& cons, const std::vector<std::string>& vows, int n, Rng* rng) {
  std::string w;
  for (int i = 0; i < n; ++i) {
    w += cons[rng->Below(cons.size())];
    w += vows[rng->Below(vows.size())];
  }
  return w;
}

std::vector<double> ZipfCdf(std::size_t n) {
  std::vector<double> cdf(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += 1.0 / static_cast<double>(i + 1);
    cdf[i] = acc;
  }
  for (auto& c : cdf) c /= acc;
  return cdf;
}

std::size_t Draw(const std::vector<double>& cdf, Rng* rng) {
  const double u = rng->Uniform();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
}

std::string Capitalize(const std::string& w) {
  auto cps = DecodeUtf8(w);
  if (cps.empty()) return w;
  cps[0] = ToUpperCp(cps[0]);
  return EncodeUtf8(std::u32string(cps.begin(), cps.end()));
}

bool IsShared(const std::string& w) {
  if (w.empty()) return true;
  const unsigned char c = static_cast<unsigned char>(w[0]);
  return !(c >= 'a' && c <= 'z') && !(c >= 0x80);
}

}  // namespace

void CipherOptions::Validate() const {
  if (vocab_size < 2) Fail(ErrorKind::kInvalidArgument, "cipher: vocab_size must be >= 2");
  if (successors < 1) Fail(ErrorKind::kInvalidArgument, "cipher: successors must be >= 1");
  if (min_len < 1 || max_len < min_len) Fail(ErrorKind::kInvalidArgument, "cipher: bad sentence length range");
  for (double r : {comma_rate, reorder_rate}) {
    if (!(r >= 0.0 && r <= 1.0)) Fail(ErrorKind::kInvalidArgument, "cipher: rates must lie in [0, 1]");
  }
}

CipherPair::CipherPair(const CipherOptions& options) : options_(options) {
  options_.Validate();
  Rng rng(options_.seed);
  std::set<std::string> seen_a, seen_b;
  while (words_a_.size() < options_.vocab_size) {
    std::string a = Syllables(kConsA, kVowA, 2 + static_cast<int>(rng.Below(2)), &rng);
    if (!seen_a.insert(a).second) continue;
    std::string b;
    do {
      b = Syllables(kConsB, kVowB, 2 + static_cast<int>(rng.Below(2)), &rng);
    } while (!seen_b.insert(b).second);
    words_a_.push_back(a);
    key_[a] = b;
    inverse_[b] = a;
  }
  std::set<std::string> seen_n;
  while (names_.size() < options_.names) {
    std::string n = kNameCons[rng.Below(kNameCons.size())] + kVowA[rng.Below(kVowA.size())] +
                    Syllables(kConsA, kVowA, 1 + static_cast<int>(rng.Below(2)), &rng);
    if (seen_n.insert(n).second) names_.push_back(n);
  }
  std::set<std::string> seen_num;
  std::vector<std::string> numbers;
  while (numbers.size() < options_.numbers) {
    const std::string n = std::to_string(rng.Below(2) ? 1900 + rng.Below(120) : 1 + rng.Below(99));
    if (seen_num.insert(n).second) numbers.push_back(n);
  }
  nodes_ = words_a_;
  nodes_.insert(nodes_.end(), names_.begin(), names_.end());
  nodes_.insert(nodes_.end(), numbers.begin(), numbers.end());
  rng.Shuffle(&nodes_);
  next_.resize(nodes_.size());
  const auto node_cdf = ZipfCdf(nodes_.size());
  const std::size_t degree = std::min(options_.successors, nodes_.size());
  for (auto& succ : next_) {
    std::set<std::size_t> picked;
    while (picked.size() < degree) {
      // Successors lean toward frequent nodes so the chain has a Zipf-like
      // unigram profile.
      picked.insert(Draw(node_cdf, &rng));
    }
    succ.assign(picked.begin(), picked.end());
    rng.Shuffle(&succ);
  }
  start_cdf_ = node_cdf;
  next_cdf_ = ZipfCdf(degree);
}

Tokens CipherPair::SampleA(Rng* rng) const {
  const std::size_t len = options_.min_len + rng->Below(options_.max_len - options_.min_len + 1);
  Tokens out;
  std::size_t w = Draw(start_cdf_, rng);
  while (out.size() + 1 < len) {
    if (!out.empty() && out.back() != "," && rng->Uniform() < options_.comma_rate) {
      out.push_back(",");
      continue;
    }
    out.push_back(nodes_[w]);
    w = next_[w][Draw(next_cdf_, rng)];
  }
  out.push_back(rng->Uniform() < 0.9 ? "." : "?");
  out[0] = Capitalize(out[0]);
  return out;
}

Tokens CipherPair::Encipher(const Tokens& a, Rng* rng, std::vector<int>* perm) const {
  Tokens b(a.size());
  std::vector<int> p(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    p[i] = static_cast<int>(i);
    const std::string lower = ToLower(a[i]);
    auto it = key_.find(lower);
    if (it == key_.end()) {
      b[i] = a[i];
    } else {
      b[i] = (lower != a[i]) ? Capitalize(it->second) : it->second;
    }
  }
  if (options_.reorder_rate > 0.0) {
    // Swap adjacent cipher words (never the first token or shared tokens).
    for (std::size_t i = 1; i + 1 < b.size(); ++i) {
      if (IsShared(b[i]) || IsShared(b[i + 1])) continue;
      if (rng->Uniform() < options_.reorder_rate) {
        std::swap(b[i], b[i + 1]);
        std::swap(p[i], p[i + 1]);
        ++i;
      }
    }
  }
  if (perm) *perm = std::move(p);
  return b;
}

Tokens CipherPair::Decipher(const Tokens& b) const {
  Tokens out(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    auto it = inverse_.find(ToLower(b[i]));
    out[i] = it == inverse_.end() ? b[i] : it->second;
  }
  return out;
}

CipherCorpus GenerateCorpus(const CipherPair& pair, std::size_t mono_size, std::size_t dev_size,
                            std::size_t test_size, std::uint64_t seed) {
  CipherCorpus c;
  Rng rng_a(seed ^ 0xA5A5A5A5ULL), rng_b(seed ^ 0x5B5B5B5BULL), rng_dev(seed ^ 0xDE7DE7ULL),
      rng_test(seed ^ 0x7E577E57ULL);
  for (std::size_t i = 0; i < mono_size; ++i) c.mono_a.push_back(Join(pair.SampleA(&rng_a), " "));
  for (std::size_t i = 0; i < mono_size; ++i) {
    c.mono_b.push_back(Join(pair.Encipher(pair.SampleA(&rng_b), &rng_b), " "));
  }
  for (std::size_t i = 0; i < dev_size; ++i) {
    auto a = pair.SampleA(&rng_dev);
    c.dev_a.push_back(Join(a, " "));
    c.dev_b.push_back(Join(pair.Encipher(a, &rng_dev), " "));
  }
  for (std::size_t i = 0; i < test_size; ++i) {
    auto a = pair.SampleA(&rng_test);
    c.test_a.push_back(Join(a, " "));
    c.test_b.push_back(Join(pair.Encipher(a, &rng_test), " "));
  }
  return c;
}

GoldBitext GenerateGoldBitext(const CipherPair& pair, std::size_t size, std::uint64_t seed) {
  GoldBitext g;
  Rng rng(seed);
  for (std::size_t i = 0; i < size; ++i) {
    auto a = pair.SampleA(&rng);
    std::vector<int> perm;
    auto b = pair.Encipher(a, &rng, &perm);
    align::Alignment links;
    for (std::size_t j = 0; j < perm.size(); ++j) links.insert({perm[j], static_cast<int>(j)});
    g.bitext.push_back({std::move(a), std::move(b)});
    g.gold.push_back(std::move(links));
  }
  return g;
}

}  // namespace umtx::cipher
