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

#include "umtx/textproc.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

namespace umtx::textproc {

Tokens Tokenize(std::string_view raw_line) {
  Tokens out;
  const auto cps = DecodeUtf8(raw_line);
  std::size_t i = 0;
  while (i < cps.size()) {
    while (i < cps.size() && IsUnicodeSpace(cps[i])) ++i;
    std::size_t j = i;
    while (j < cps.size() && !IsUnicodeSpace(cps[j])) ++j;
    if (j > i) {
      std::size_t b = i, e = j;
      while (b < e && IsUnicodePunct(cps[b])) {
        out.push_back(EncodeUtf8(std::u32string_view(&cps[b], 1)));
        ++b;
      }
      std::vector<std::string> trailing;
      while (e > b && IsUnicodePunct(cps[e - 1])) {
        trailing.push_back(EncodeUtf8(std::u32string_view(&cps[e - 1], 1)));
        --e;
      }
      if (e > b) out.push_back(EncodeUtf8(std::u32string_view(&cps[b], e - b)));
      for (auto it = trailing.rbegin(); it != trailing.rend(); ++it) out.push_back(*it);
    }
    i = j;
  }
  return out;
}

Sentence TokenizeLine(std::string_view raw_line, std::size_t line_index) {
  return Sentence{Tokenize(raw_line), line_index};
}

std::vector<Sentence> TokenizeCorpus(const std::vector<std::string>& raw_lines) {
  std::vector<Sentence> out;
  out.reserve(raw_lines.size());
  for (std::size_t i = 0; i < raw_lines.size(); ++i) out.push_back(TokenizeLine(raw_lines[i], i));
  return out;
}

std::string JoinTokens(const Tokens& t) { return Join(t, " "); }

// ---------------------------------------------------------------------------
// Truecasing

const TruecaseModel::Entry* TruecaseModel::Find(std::string_view word) const {
  auto it = entries_.find(ToLower(word));
  return it == entries_.end() ? nullptr : &it->second;
}

void TruecaseModel::Set(const std::string& lower, Entry e) { entries_[lower] = std::move(e); }

void TruecaseModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  out << "#umtx-truecase\tv1\n";
  for (const auto& [k, e] : entries_) out << k << '\t' << e.casing << '\t' << e.count << '\n';
}

TruecaseModel TruecaseModel::Load(const std::string& path) {
  auto lines = ReadLines(path);
  if (lines.empty() || lines[0] != "#umtx-truecase\tv1") {
    Fail(ErrorKind::kFormat, path + ": not a truecase model (missing v1 header)");
  }
  TruecaseModel m;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = Split(lines[i], "\t");
    long long count = 0;
    if (f.size() != 3 || !ParseInt(f[2], &count) || count <= 0) {
      Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 1) + ": malformed truecase entry");
    }
    m.entries_[f[0]] = Entry{f[1], static_cast<std::uint64_t>(count)};
  }
  return m;
}

namespace {

using CasingCounts = std::map<std::string, std::uint64_t>;

TruecaseModel::Entry PickCasing(const std::string& lower, const CasingCounts& counts) {
  TruecaseModel::Entry best;
  for (const auto& [form, c] : counts) {
    bool better = c > best.count;
    if (c == best.count) {
      // Ties go to the lowercase form, then to the lexicographically smaller.
      bool form_lower = form == lower;
      bool best_lower = best.casing == lower;
      better = form_lower && !best_lower;
    }
    if (better) best = {form, c};
  }
  return best;
}

}  // namespace

TruecaseModel TrainTruecaser(const std::vector<Sentence>& corpus) {
  if (corpus.empty()) Fail(ErrorKind::kInvalidArgument, "truecaser: empty corpus");
  std::map<std::string, CasingCounts> mid, initial;
  for (const auto& s : corpus) {
    for (std::size_t i = 0; i < s.tokens.size(); ++i) {
      const std::string& tok = s.tokens[i];
      (i == 0 ? initial : mid)[ToLower(tok)][tok]++;
    }
  }
  TruecaseModel m;
  for (const auto& [lower, counts] : mid) m.Set(lower, PickCasing(lower, counts));
  for (const auto& [lower, counts] : initial) {
    if (!mid.count(lower)) m.Set(lower, PickCasing(lower, counts));
  }
  return m;
}

Sentence ApplyTruecase(const Sentence& s, const TruecaseModel& m) {
  Sentence out = s;
  if (!out.tokens.empty()) {
    if (const auto* e = m.Find(out.tokens[0])) out.tokens[0] = e->casing;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Language identification

std::vector<std::string> CharNgrams(const Tokens& tokens, int order) {
  std::u32string text;
  text.push_back(U' ');
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) text.push_back(U' ');
    auto cps = DecodeUtf8(tokens[i]);
    text.append(cps.begin(), cps.end());
  }
  text.push_back(U' ');
  std::vector<std::string> grams;
  if (order <= 0 || text.size() < static_cast<std::size_t>(order)) return grams;
  for (std::size_t i = 0; i + order <= text.size(); ++i) {
    grams.push_back(EncodeUtf8(std::u32string_view(text).substr(i, order)));
  }
  return grams;
}

LangIdModel TrainLangId(const std::map<std::string, std::vector<Sentence>>& labeled, int ngram_order) {
  if (labeled.size() < 2) Fail(ErrorKind::kInvalidArgument, "langid: need at least 2 labels");
  if (ngram_order < 1) Fail(ErrorKind::kInvalidArgument, "langid: n-gram order must be >= 1");
  std::map<std::string, std::unordered_map<std::string, std::uint64_t>> counts;
  std::map<std::string, std::uint64_t> totals;
  std::set<std::string> inventory;
  std::size_t num_sentences = 0;
  for (const auto& [label, sents] : labeled) {
    if (sents.empty()) Fail(ErrorKind::kInvalidArgument, "langid: label '" + label + "' has no sentences");
    num_sentences += sents.size();
    auto& c = counts[label];
    for (const auto& s : sents) {
      for (auto& g : CharNgrams(s.tokens, ngram_order)) {
        inventory.insert(g);
        c[g]++;
        totals[label]++;
      }
    }
  }
  LangIdModel m;
  m.order_ = ngram_order;
  const double v = static_cast<double>(inventory.size());
  for (const auto& [label, sents] : labeled) {
    LangIdModel::Label l;
    l.log_prior = std::log(static_cast<double>(sents.size()) / static_cast<double>(num_sentences));
    const double denom = static_cast<double>(totals[label]) + v + 1.0;
    l.log_unseen = -std::log(denom);
    for (const auto& [g, c] : counts[label]) l.log_prob[g] = std::log((static_cast<double>(c) + 1.0) / denom);
    m.labels_[label] = std::move(l);
  }
  return m;
}

double LangIdModel::TotalMass(const std::string& label) const {
  const auto& l = labels_.at(label);
  // The inventory is the union of all labels' seen n-grams.
  std::set<std::string> inventory;
  for (const auto& [_, other] : labels_) {
    for (const auto& [g, __] : other.log_prob) inventory.insert(g);
  }
  double mass = std::exp(l.log_unseen);
  for (const auto& g : inventory) {
    auto it = l.log_prob.find(g);
    mass += std::exp(it == l.log_prob.end() ? l.log_unseen : it->second);
  }
  return mass;
}

void LangIdModel::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  out << "#umtx-langid\tv1\t" << order_ << '\n';
  for (const auto& [label, l] : labels_) {
    out << label << "\t__prior__\t" << FormatDouble(l.log_prior) << '\n';
    out << label << "\t__unseen__\t" << FormatDouble(l.log_unseen) << '\n';
    std::map<std::string, double> sorted(l.log_prob.begin(), l.log_prob.end());
    for (const auto& [g, lp] : sorted) out << label << '\t' << g << '\t' << FormatDouble(lp) << '\n';
  }
}

LangIdModel LangIdModel::Load(const std::string& path) {
  auto lines = ReadLines(path);
  if (lines.empty()) Fail(ErrorKind::kFormat, path + ": empty langid model");
  auto header = Split(lines[0], "\t");
  long long order = 0;
  if (header.size() != 3 || header[0] != "#umtx-langid" || header[1] != "v1" || !ParseInt(header[2], &order)) {
    Fail(ErrorKind::kFormat, path + ": not a v1 langid model");
  }
  LangIdModel m;
  m.order_ = static_cast<int>(order);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = Split(lines[i], "\t");
    double lp = 0;
    if (f.size() != 3 || !ParseDouble(f[2], &lp)) {
      Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 1) + ": malformed langid entry");
    }
    auto& l = m.labels_[f[0]];
    if (f[1] == "__prior__") {
      l.log_prior = lp;
    } else if (f[1] == "__unseen__") {
      l.log_unseen = lp;
    } else {
      l.log_prob[f[1]] = lp;
    }
  }
  if (m.labels_.size() < 2) Fail(ErrorKind::kFormat, path + ": fewer than 2 labels");
  return m;
}

LangIdResult ClassifyLanguage(const Sentence& s, const LangIdModel& m) {
  const auto grams = CharNgrams(s.tokens, m.order());
  std::string best_label;
  double best = -std::numeric_limits<double>::infinity();
  double second = -std::numeric_limits<double>::infinity();
  for (const auto& [label, l] : m.labels()) {
    double score = l.log_prior;
    for (const auto& g : grams) {
      auto it = l.log_prob.find(g);
      score += it == l.log_prob.end() ? l.log_unseen : it->second;
    }
    // Strict comparison keeps the earlier label on ties.
    if (score > best) {
      second = best;
      best = score;
      best_label = label;
    } else if (score > second) {
      second = score;
    }
  }
  return LangIdResult{best_label, best - second};
}

std::vector<Sentence> Preprocess(const std::vector<std::string>& raw_lines,
                                 const PreprocessOptions& options,
                                 const TruecaseModel* tc, const LangIdModel* lid,
                                 PreprocessStats* stats) {
  const std::size_t n = raw_lines.size();
  std::vector<Sentence> processed(n);
  std::vector<char> keep(n, 0), len_drop(n, 0);
  ParallelChunks(n, 4096, options.workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) {
      Sentence s = TokenizeLine(raw_lines[i], i);
      if (tc) s = ApplyTruecase(s, *tc);
      if (!KeepByLength(s, options.limits)) {
        len_drop[i] = 1;
        continue;
      }
      if (lid && !options.keep_lang.empty() && ClassifyLanguage(s, *lid).label != options.keep_lang) continue;
      processed[i] = std::move(s);
      keep[i] = 1;
    }
  });
  std::vector<Sentence> out;
  PreprocessStats st;
  st.input_lines = n;
  for (std::size_t i = 0; i < n; ++i) {
    if (keep[i]) {
      out.push_back(std::move(processed[i]));
    } else if (len_drop[i]) {
      st.dropped_length++;
    } else {
      st.dropped_language++;
    }
  }
  st.kept = out.size();
  if (stats) *stats = st;
  return out;
}

}  // namespace umtx::textproc
