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

#include "umtx/ngram_lm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace umtx::lm {

namespace {
constexpr double kNoProb = -99.0;  // ARPA convention for context-only entries
}

Vocabulary::Vocabulary() {
  Intern(kBos);
  Intern(kEos);
  Intern(kUnk);
}

WordId Vocabulary::Intern(const std::string& w) {
  auto [it, inserted] = ids_.emplace(w, static_cast<WordId>(words_.size()));
  if (inserted) words_.push_back(w);
  return it->second;
}

WordId Vocabulary::Lookup(const std::string& w) const {
  auto it = ids_.find(w);
  return it == ids_.end() ? unk() : it->second;
}

NgramKey NgramKey::Suffix() const {
  NgramKey k;
  k.n = static_cast<std::uint8_t>(n - 1);
  for (int i = 1; i < n; ++i) k.w[i - 1] = w[i];
  return k;
}

NgramKey NgramKey::Prefix() const {
  NgramKey k;
  k.n = static_cast<std::uint8_t>(n - 1);
  for (int i = 0; i + 1 < n; ++i) k.w[i] = w[i];
  return k;
}

namespace {

NgramKey MakeKey(const WordId* ids, int n) {
  NgramKey k;
  k.n = static_cast<std::uint8_t>(n);
  for (int i = 0; i < n; ++i) k.w[i] = ids[i];
  return k;
}

}  // namespace

std::uint64_t NgramCounts::Count(const std::vector<std::string>& ngram) const {
  if (ngram.empty() || static_cast<int>(ngram.size()) > order) return 0;
  NgramKey k;
  k.n = static_cast<std::uint8_t>(ngram.size());
  for (std::size_t i = 0; i < ngram.size(); ++i) {
    if (!vocab.Contains(ngram[i])) return 0;
    k.w[i] = vocab.Lookup(ngram[i]);
  }
  const auto& m = by_order[ngram.size() - 1];
  auto it = m.find(k);
  return it == m.end() ? 0 : it->second;
}

void AddToCounts(const Tokens& sentence, NgramCounts* counts) {
  const int n = counts->order;
  std::vector<WordId> seq(static_cast<std::size_t>(n - 1), counts->vocab.bos());
  for (const auto& t : sentence) seq.push_back(counts->vocab.Intern(t));
  seq.push_back(counts->vocab.eos());
  const WordId bos = counts->vocab.bos();
  for (std::size_t end = static_cast<std::size_t>(n - 1); end < seq.size(); ++end) {
    if (seq[end] == bos) continue;
    for (int k = 1; k <= n; ++k) {
      if (end + 1 < static_cast<std::size_t>(k)) break;
      counts->by_order[k - 1][MakeKey(&seq[end + 1 - k], k)]++;
    }
  }
}

NgramCounts CountNgrams(const std::vector<Tokens>& corpus, int order) {
  if (order < 1 || order > kMaxOrder) {
    Fail(ErrorKind::kInvalidArgument, "n-gram order must be in [1, " + std::to_string(kMaxOrder) + "]");
  }
  NgramCounts c;
  c.order = order;
  c.by_order.resize(static_cast<std::size_t>(order));
  for (const auto& s : corpus) AddToCounts(s, &c);
  return c;
}

// ---------------------------------------------------------------------------

const ArpaEntry* ArpaLM::Find(const NgramKey& k) const {
  if (k.n == 0 || k.n > order_) return nullptr;
  const auto& m = tables_[k.n - 1];
  auto it = m.find(k);
  return it == m.end() ? nullptr : &it->second;
}

double ArpaLM::LogProb(const WordId* context, int context_len, WordId w) const {
  const int hist = std::min(context_len, order_ - 1);
  const WordId* h = context + (context_len - hist);
  NgramKey key;
  double acc = 0.0;
  for (int len = hist; len >= 0; --len) {
    key.n = static_cast<std::uint8_t>(len + 1);
    for (int i = 0; i < len; ++i) key.w[i] = h[hist - len + i];
    key.w[len] = w;
    if (const ArpaEntry* e = Find(key)) return acc + e->log10_prob;
    if (len > 0) {
      NgramKey ctx = key.Prefix();
      if (const ArpaEntry* c = Find(ctx); c && c->has_backoff) acc += c->log10_backoff;
    }
  }
  // Only reachable if <unk> is missing from the unigrams.
  return acc + kNoProb;
}

double ArpaLM::LogProb(const std::vector<std::string>& context, const std::string& w) const {
  std::vector<WordId> ids;
  for (const auto& c : context) ids.push_back(vocab_.Lookup(c));
  return LogProb(ids.data(), static_cast<int>(ids.size()), vocab_.Lookup(w));
}

double ArpaLM::ScoreIds(const std::vector<WordId>& ids, bool include_eos) const {
  std::vector<WordId> hist(static_cast<std::size_t>(std::max(0, order_ - 1)), vocab_.bos());
  double total = 0.0;
  auto step = [&](WordId w) {
    total += LogProb(hist.data(), static_cast<int>(hist.size()), w);
    hist.push_back(w);
  };
  for (WordId w : ids) step(w);
  if (include_eos) step(vocab_.eos());
  return total;
}

double ArpaLM::ScoreSentence(const Tokens& s) const {
  std::vector<WordId> ids;
  ids.reserve(s.size());
  for (const auto& t : s) ids.push_back(vocab_.Lookup(t));
  return ScoreIds(ids, true);
}

double ArpaLM::ContextMass(const std::vector<WordId>& context) const {
  double mass = 0.0;
  for (WordId w = 0; w < vocab_.size(); ++w) {
    if (w == vocab_.bos()) continue;
    mass += std::pow(10.0, LogProb(context.data(), static_cast<int>(context.size()), w));
  }
  return mass;
}

ArpaLM ArpaLM::FromTables(int order, Vocabulary vocab, std::vector<NgramMap<ArpaEntry>> tables) {
  ArpaLM lm;
  lm.order_ = order;
  lm.vocab_ = std::move(vocab);
  lm.tables_ = std::move(tables);
  return lm;
}

// ---------------------------------------------------------------------------
// Estimation

ArpaLM EstimateKneserNey(const NgramCounts& counts) {
  const int n = counts.order;
  if (n < 1) Fail(ErrorKind::kInvalidArgument, "kneser-ney: bad order");
  const WordId bos = counts.vocab.bos();

  // Adjusted counts: raw at the highest order and for n-grams starting with
  // <s>; distinct left extensions otherwise.
  std::vector<NgramMap<std::uint64_t>> adjusted(static_cast<std::size_t>(n));
  adjusted[n - 1] = counts.by_order[n - 1];
  for (int k = n - 1; k >= 1; --k) {
    NgramMap<std::uint64_t> cont;
    for (const auto& [g, c] : counts.by_order[k]) cont[g.Suffix()]++;
    auto& adj = adjusted[k - 1];
    for (const auto& [g, c] : counts.by_order[k - 1]) {
      if (g.w[0] == bos) {
        adj[g] = c;
      } else {
        auto it = cont.find(g);
        adj[g] = it == cont.end() ? c : it->second;
      }
    }
  }

  std::vector<double> discounts(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    std::uint64_t n1 = 0, n2 = 0;
    for (const auto& [g, c] : adjusted[k - 1]) {
      n1 += c == 1;
      n2 += c == 2;
    }
    double d = (n1 + n2 == 0) ? 0.0 : static_cast<double>(n1) / static_cast<double>(n1 + 2 * n2);
    if (!(d > 0.0)) {
      LogWarning("kneser-ney: order " + std::to_string(k) + " has degenerate count-of-counts (n1=" +
                 std::to_string(n1) + ", n2=" + std::to_string(n2) + "); using D = 0.5");
      d = 0.5;
    }
    discounts[k - 1] = d;
  }

  ArpaLM lm;
  lm.order_ = n;
  lm.vocab_ = counts.vocab;
  lm.discounts_ = discounts;
  lm.tables_.resize(static_cast<std::size_t>(n));

  struct ContextStat {
    std::uint64_t total = 0;
    std::uint64_t types = 0;
  };

  // Unigrams.
  {
    const double d = discounts[0];
    std::uint64_t total = 0;
    for (const auto& [g, c] : adjusted[0]) total += c;
    const double types = static_cast<double>(adjusted[0].size());
    const double predictable = static_cast<double>(lm.vocab_.size() - 1);  // minus <s>
    const double interp = total > 0 ? d * types / static_cast<double>(total) : 1.0;
    const double uniform = interp / predictable;
    auto& t = lm.tables_[0];
    for (WordId w = 0; w < lm.vocab_.size(); ++w) {
      NgramKey key;
      key.n = 1;
      key.w[0] = w;
      if (w == bos) continue;
      auto it = adjusted[0].find(key);
      double p = uniform;
      if (it != adjusted[0].end()) p += std::max(static_cast<double>(it->second) - d, 0.0) / static_cast<double>(total);
      t[key].log10_prob = std::log10(p);
    }
  }

  for (int k = 2; k <= n; ++k) {
    const double d = discounts[k - 1];
    NgramMap<ContextStat> ctx;
    for (const auto& [g, c] : adjusted[k - 1]) {
      auto& s = ctx[g.Prefix()];
      s.total += c;
      s.types += 1;
    }
    // Backoff weights live on the context entries of order k-1.
    auto& lower = lm.tables_[k - 2];
    for (const auto& [h, s] : ctx) {
      auto& e = lower[h];  // creates a context-only entry when h ends in <s>
      if (h.w[h.n - 1] == bos && e.log10_prob == 0.0 && !e.has_backoff) e.log10_prob = kNoProb;
      e.has_backoff = true;
      e.log10_backoff = std::log10(d * static_cast<double>(s.types) / static_cast<double>(s.total));
    }
    auto& t = lm.tables_[k - 1];
    for (const auto& [g, c] : adjusted[k - 1]) {
      const auto& s = ctx[g.Prefix()];
      const double bow = d * static_cast<double>(s.types) / static_cast<double>(s.total);
      const NgramKey sfx = g.Suffix();
      const double lower_p = std::pow(10.0, lm.LogProb(sfx.w.data(), sfx.n - 1, sfx.w[sfx.n - 1]));
      const double p = std::max(static_cast<double>(c) - d, 0.0) / static_cast<double>(s.total) + bow * lower_p;
      t[g].log10_prob = std::log10(p);
    }
  }
  // The <s> unigram exists only as a context.
  if (n >= 1) {
    NgramKey key;
    key.n = 1;
    key.w[0] = bos;
    auto& e = lm.tables_[0][key];
    e.log10_prob = kNoProb;
  }
  return lm;
}

ArpaLM TrainLm(const std::vector<Tokens>& corpus, int order) { return EstimateKneserNey(CountNgrams(corpus, order)); }

PerplexityResult Perplexity(const ArpaLM& lm, const std::vector<Tokens>& corpus) {
  if (corpus.empty()) Fail(ErrorKind::kInvalidArgument, "perplexity: empty corpus");
  PerplexityResult r;
  for (const auto& s : corpus) {
    r.total_log10 += lm.ScoreSentence(s);
    r.predicted_tokens += s.size() + 1;
  }
  r.perplexity = std::pow(10.0, -r.total_log10 / static_cast<double>(r.predicted_tokens));
  return r;
}

// ---------------------------------------------------------------------------
// ARPA IO

std::string ArpaLM::ArpaText() const {
  std::ostringstream out;
  out << "\\data\\\n";
  for (int k = 1; k <= order_; ++k) out << "ngram " << k << '=' << tables_[k - 1].size() << '\n';
  for (int k = 1; k <= order_; ++k) {
    out << "\n\\" << k << "-grams:\n";
    std::vector<std::pair<std::vector<std::string>, const ArpaEntry*>> rows;
    rows.reserve(tables_[k - 1].size());
    for (const auto& [g, e] : tables_[k - 1]) {
      std::vector<std::string> words;
      for (int i = 0; i < g.n; ++i) words.push_back(vocab_.Word(g.w[i]));
      rows.emplace_back(std::move(words), &e);
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [words, e] : rows) {
      out << FormatDouble(e->log10_prob) << '\t' << Join(words, " ");
      if (e->has_backoff) out << '\t' << FormatDouble(e->log10_backoff);
      out << '\n';
    }
  }
  out << "\n\\end\\\n";
  return out.str();
}

void ArpaLM::WriteArpa(const std::string& path) const { WriteFile(path, ArpaText()); }

ArpaLM ArpaLM::ReadArpa(const std::string& path) {
  auto lines = ReadLines(path);
  std::size_t i = 0;
  auto fail = [&](const std::string& msg) {
    Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 1) + ": " + msg);
  };
  while (i < lines.size() && Trim(lines[i]) != "\\data\\") ++i;
  if (i == lines.size()) Fail(ErrorKind::kFormat, path + ": missing \\data\\ header");
  ++i;
  std::vector<std::size_t> expected;
  for (; i < lines.size(); ++i) {
    auto l = Trim(lines[i]);
    if (l.empty()) continue;
    if (l.rfind("ngram ", 0) != 0) break;
    auto eq = l.find('=');
    long long k, c;
    if (eq == std::string_view::npos || !ParseInt(l.substr(6, eq - 6), &k) || !ParseInt(l.substr(eq + 1), &c) ||
        k != static_cast<long long>(expected.size()) + 1) {
      fail("bad ngram count line");
    }
    expected.push_back(static_cast<std::size_t>(c));
  }
  const int order = static_cast<int>(expected.size());
  if (order < 1 || order > kMaxOrder) fail("unsupported order");
  Vocabulary vocab;
  std::vector<NgramMap<ArpaEntry>> tables(static_cast<std::size_t>(order));
  int current = 0;
  for (; i < lines.size(); ++i) {
    auto l = Trim(lines[i]);
    if (l.empty()) continue;
    if (l == "\\end\\") break;
    if (l.front() == '\\') {
      long long k;
      auto dash = l.find("-grams:");
      if (dash == std::string_view::npos || !ParseInt(l.substr(1, dash - 1), &k) || k < 1 || k > order) {
        fail("bad section header");
      }
      current = static_cast<int>(k);
      continue;
    }
    if (current == 0) fail("entry outside of a section");
    auto f = SplitWhitespace(l);
    if (static_cast<int>(f.size()) != current + 1 && static_cast<int>(f.size()) != current + 2) {
      fail("wrong field count");
    }
    ArpaEntry e;
    if (!ParseDouble(f[0], &e.log10_prob)) fail("bad probability");
    NgramKey key;
    key.n = static_cast<std::uint8_t>(current);
    for (int j = 0; j < current; ++j) key.w[j] = vocab.Intern(f[1 + j]);
    if (static_cast<int>(f.size()) == current + 2) {
      if (!ParseDouble(f.back(), &e.log10_backoff)) fail("bad backoff");
      e.has_backoff = true;
    }
    tables[current - 1][key] = e;
  }
  for (int k = 0; k < order; ++k) {
    if (tables[k].size() != expected[k]) {
      Fail(ErrorKind::kFormat, path + ": " + std::to_string(k + 1) + "-gram count mismatch");
    }
  }
  return FromTables(order, std::move(vocab), std::move(tables));
}

}  // namespace umtx::lm
