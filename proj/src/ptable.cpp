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

#include "umtx/ptable.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

namespace umtx::ptable {

namespace {

bool EndsWith(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

void SortCandidates(std::vector<Candidate>* c) {
  std::sort(c->begin(), c->end(), [](const Candidate& a, const Candidate& b) {
    if (a.fwd != b.fwd) return a.fwd > b.fwd;
    return a.tgt < b.tgt;
  });
}

std::string PairKey(const std::string& a, const std::string& b) {
  std::string k = a;
  k.push_back('\x01');
  k += b;
  return k;
}

std::string SpanText(const Tokens& t, int b, int e) {
  std::string out;
  for (int i = b; i < e; ++i) {
    if (i > b) out.push_back(' ');
    out += t[i];
  }
  return out;
}

}  // namespace

const std::vector<Candidate>* PhraseTable::Find(const std::string& src) const {
  auto it = entries.find(src);
  return it == entries.end() ? nullptr : &it->second;
}

std::size_t PhraseTable::NumPairs() const {
  std::size_t n = 0;
  for (const auto& [s, c] : entries) n += c.size();
  return n;
}

int PhraseTable::MaxSourceLength() const {
  int best = 0;
  for (const auto& [s, c] : entries) {
    best = std::max(best, static_cast<int>(SplitWhitespace(s).size()));
  }
  return best;
}

std::vector<double> Softmax(const std::vector<double>& cosines, double temperature) {
  if (!(temperature > 0.0)) Fail(ErrorKind::kInvalidArgument, "softmax: temperature must be > 0");
  std::vector<double> p(cosines.size());
  if (cosines.empty()) return p;
  const double mx = *std::max_element(cosines.begin(), cosines.end());
  double z = 0.0;
  for (std::size_t i = 0; i < cosines.size(); ++i) {
    p[i] = std::exp((cosines[i] - mx) / temperature);
    z += p[i];
  }
  for (double& x : p) x /= z;
  return p;
}

namespace {

// log Σ_j exp(cos(q, key_j) / T) per query row, blockwise.
std::vector<double> LogPartition(const phrasevec::RowMatrix& qu, const phrasevec::RowMatrix& ku, double t,
                                 int workers) {
  std::vector<double> out(static_cast<std::size_t>(qu.rows()));
  ParallelChunks(out.size(), 256, workers, [&](std::size_t, std::size_t b, std::size_t e) {
    phrasevec::RowMatrix sims =
        qu.middleRows(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)) * ku.transpose();
    for (std::size_t i = b; i < e; ++i) {
      const auto row = sims.row(static_cast<Eigen::Index>(i - b));
      const double mx = row.maxCoeff();
      double z = 0.0;
      for (Eigen::Index j = 0; j < row.size(); ++j) z += std::exp((row(j) - mx) / t);
      out[i] = mx / t + std::log(z);
    }
  });
  return out;
}

// Retrieval in one direction: list[i] = (key index, probability).
std::vector<std::vector<std::pair<std::size_t, double>>> Retrieve(const phrasevec::RowMatrix& qu,
                                                                  const phrasevec::RowMatrix& ku,
                                                                  const InduceOptions& o) {
  auto nn = phrasevec::CrossNearest(qu, ku, o.k, o.workers);
  std::vector<double> logz;
  if (o.softmax_full_vocab) logz = LogPartition(qu, ku, o.temperature, o.workers);
  std::vector<std::vector<std::pair<std::size_t, double>>> out(nn.size());
  for (std::size_t i = 0; i < nn.size(); ++i) {
    std::vector<double> cos;
    for (const auto& n : nn[i]) cos.push_back(n.cosine);
    std::vector<double> p;
    if (o.softmax_full_vocab) {
      for (double c : cos) p.push_back(std::exp(c / o.temperature - logz[i]));
    } else {
      p = Softmax(cos, o.temperature);
    }
    for (std::size_t j = 0; j < nn[i].size(); ++j) out[i].emplace_back(nn[i][j].index, p[j]);
  }
  return out;
}

}  // namespace

PhraseTable InduceUnsupervised(const phrasevec::EmbeddingMatrix& src, const phrasevec::EmbeddingMatrix& tgt,
                               const InduceOptions& options) {
  if (options.k < 1) Fail(ErrorKind::kInvalidArgument, "induce table: k must be >= 1");
  if (!(options.temperature > 0.0)) Fail(ErrorKind::kInvalidArgument, "induce table: temperature must be > 0");
  if (src.dim() != tgt.dim()) Fail(ErrorKind::kInvalidArgument, "induce table: embedding dimensions differ");
  if (src.size() == 0 || tgt.size() == 0) Fail(ErrorKind::kInvalidArgument, "induce table: empty embeddings");

  const phrasevec::RowMatrix su = phrasevec::UnitRows(src.rows);
  const phrasevec::RowMatrix tu = phrasevec::UnitRows(tgt.rows);
  const auto fwd = Retrieve(su, tu, options);
  const auto rev = Retrieve(tu, su, options);

  std::vector<std::unordered_map<std::size_t, double>> rev_map(rev.size());
  std::vector<double> rev_min(rev.size(), 1.0);
  for (std::size_t j = 0; j < rev.size(); ++j) {
    for (const auto& [i, p] : rev[j]) {
      rev_map[j][i] = p;
      rev_min[j] = std::min(rev_min[j], p);
    }
  }

  PhraseTable table;
  table.provenance = Provenance::kUnsupervised;
  for (std::size_t i = 0; i < fwd.size(); ++i) {
    std::vector<Candidate> cands;
    cands.reserve(fwd[i].size());
    for (const auto& [j, p] : fwd[i]) {
      Candidate c;
      c.tgt = tgt.labels[j];
      c.fwd = p;
      auto it = rev_map[j].find(i);
      c.bwd = it != rev_map[j].end() ? it->second : rev_min[j];
      cands.push_back(std::move(c));
    }
    SortCandidates(&cands);
    table.entries[src.labels[i]] = std::move(cands);
  }
  return table;
}

std::vector<PhraseSpan> ExtractPhrases(int src_len, int tgt_len, const align::Alignment& a, int max_len) {
  std::vector<PhraseSpan> out;
  if (src_len <= 0 || tgt_len <= 0 || a.empty()) return out;
  std::vector<int> tgt_aligned(static_cast<std::size_t>(tgt_len), 0);
  std::vector<std::vector<int>> by_src(static_cast<std::size_t>(src_len));
  for (const auto& [s, t] : a) {
    if (s < 0 || s >= src_len || t < 0 || t >= tgt_len) Fail(ErrorKind::kInvalidArgument, "extract: link out of range");
    by_src[s].push_back(t);
    tgt_aligned[t]++;
  }
  for (int sb = 0; sb < src_len; ++sb) {
    for (int se = sb; se < src_len && se - sb < max_len; ++se) {
      int tmin = tgt_len, tmax = -1;
      for (int s = sb; s <= se; ++s) {
        for (int t : by_src[s]) {
          tmin = std::min(tmin, t);
          tmax = std::max(tmax, t);
        }
      }
      if (tmax < 0 || tmax - tmin >= max_len) continue;
      bool ok = true;
      for (const auto& [s, t] : a) {
        if (t >= tmin && t <= tmax && (s < sb || s > se)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      for (int tb = tmin; tb >= 0 && tb > tmin - max_len && (tb == tmin || tgt_aligned[tb] == 0); --tb) {
        for (int te = tmax; te < tgt_len && te < tb + max_len && (te == tmax || tgt_aligned[te] == 0); ++te) {
          out.push_back({sb, se + 1, tb, te + 1});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

PhraseTable ScoreExtracted(const std::vector<ExtractedPhrase>& pairs) {
  if (pairs.empty()) Fail(ErrorKind::kInvalidArgument, "score phrases: no phrase pairs");
  std::unordered_map<std::string, std::uint64_t> c_st, c_s, c_t;
  std::unordered_map<std::string, std::pair<double, double>> lex;
  for (const auto& p : pairs) {
    const std::string k = PairKey(p.src, p.tgt);
    c_st[k]++;
    c_s[p.src]++;
    c_t[p.tgt]++;
    if (p.lex_fwd >= 0.0 && p.lex_bwd >= 0.0) {
      auto [it, inserted] = lex.emplace(k, std::make_pair(p.lex_fwd, p.lex_bwd));
      if (!inserted) {
        it->second.first = std::max(it->second.first, p.lex_fwd);
        it->second.second = std::max(it->second.second, p.lex_bwd);
      }
    }
  }
  PhraseTable table;
  table.provenance = Provenance::kExtracted;
  std::unordered_map<std::string, bool> seen;
  for (const auto& p : pairs) {
    const std::string k = PairKey(p.src, p.tgt);
    if (!seen.emplace(k, true).second) continue;
    Candidate c;
    c.tgt = p.tgt;
    const double n = static_cast<double>(c_st[k]);
    c.fwd = n / static_cast<double>(c_s[p.src]);
    c.bwd = n / static_cast<double>(c_t[p.tgt]);
    if (auto it = lex.find(k); it != lex.end()) {
      c.has_lex = true;
      c.lex_fwd = it->second.first;
      c.lex_bwd = it->second.second;
    }
    table.entries[p.src].push_back(std::move(c));
  }
  for (auto& [s, c] : table.entries) SortCandidates(&c);
  return table;
}

LexicalTable LexicalTable::FromBitext(const align::Bitext& bitext, const std::vector<align::Alignment>& alignments) {
  if (bitext.size() != alignments.size()) Fail(ErrorKind::kInvalidArgument, "lexical table: size mismatch");
  std::map<std::pair<std::string, std::string>, double> joint;
  std::unordered_map<std::string, double> s_tot, t_tot;
  for (std::size_t k = 0; k < bitext.size(); ++k) {
    const auto& p = bitext[k];
    std::vector<char> sa(p.src.size(), 0), ta(p.tgt.size(), 0);
    for (const auto& [s, t] : alignments[k]) {
      joint[{p.src[s], p.tgt[t]}] += 1.0;
      s_tot[p.src[s]] += 1.0;
      t_tot[p.tgt[t]] += 1.0;
      sa[s] = ta[t] = 1;
    }
    for (std::size_t s = 0; s < sa.size(); ++s) {
      if (sa[s]) continue;
      joint[{p.src[s], kNull}] += 1.0;
      s_tot[p.src[s]] += 1.0;
      t_tot[kNull] += 1.0;
    }
    for (std::size_t t = 0; t < ta.size(); ++t) {
      if (ta[t]) continue;
      joint[{kNull, p.tgt[t]}] += 1.0;
      s_tot[kNull] += 1.0;
      t_tot[p.tgt[t]] += 1.0;
    }
  }
  LexicalTable lt;
  for (const auto& [k, c] : joint) {
    lt.fwd_[k] = c / s_tot[k.first];
    lt.bwd_[k] = c / t_tot[k.second];
  }
  return lt;
}

double LexicalTable::Fwd(const std::string& s, const std::string& t) const {
  auto it = fwd_.find({s, t});
  return it == fwd_.end() ? 0.0 : it->second;
}

double LexicalTable::Bwd(const std::string& s, const std::string& t) const {
  auto it = bwd_.find({s, t});
  return it == bwd_.end() ? 0.0 : it->second;
}

double LexicalWeight(const Tokens& src, const Tokens& tgt, const align::Alignment& a, const PhraseSpan& box,
                     const LexicalTable& lex, bool forward) {
  double w = 1.0;
  if (forward) {
    for (int t = box.t_begin; t < box.t_end; ++t) {
      double sum = 0.0;
      int n = 0;
      for (int s = box.s_begin; s < box.s_end; ++s) {
        if (a.count({s, t})) {
          sum += lex.Fwd(src[s], tgt[t]);
          ++n;
        }
      }
      w *= n > 0 ? sum / n : lex.Fwd(LexicalTable::kNull, tgt[t]);
    }
  } else {
    for (int s = box.s_begin; s < box.s_end; ++s) {
      double sum = 0.0;
      int n = 0;
      for (int t = box.t_begin; t < box.t_end; ++t) {
        if (a.count({s, t})) {
          sum += lex.Bwd(src[s], tgt[t]);
          ++n;
        }
      }
      w *= n > 0 ? sum / n : lex.Bwd(src[s], LexicalTable::kNull);
    }
  }
  return w;
}

PhraseTable BuildExtractedTable(const align::Bitext& bitext, const std::vector<align::Alignment>& alignments,
                                int max_len, int workers) {
  if (bitext.size() != alignments.size()) Fail(ErrorKind::kInvalidArgument, "extract: bitext/alignment size mismatch");
  const LexicalTable lex = LexicalTable::FromBitext(bitext, alignments);
  constexpr std::size_t kChunk = 512;
  const std::size_t nchunks = (bitext.size() + kChunk - 1) / kChunk;
  std::vector<std::vector<ExtractedPhrase>> partial(nchunks);
  ParallelChunks(bitext.size(), kChunk, workers, [&](std::size_t c, std::size_t b, std::size_t e) {
    for (std::size_t k = b; k < e; ++k) {
      const auto& p = bitext[k];
      for (const auto& box : ExtractPhrases(static_cast<int>(p.src.size()), static_cast<int>(p.tgt.size()),
                                            alignments[k], max_len)) {
        ExtractedPhrase x;
        x.src = SpanText(p.src, box.s_begin, box.s_end);
        x.tgt = SpanText(p.tgt, box.t_begin, box.t_end);
        x.lex_fwd = LexicalWeight(p.src, p.tgt, alignments[k], box, lex, true);
        x.lex_bwd = LexicalWeight(p.src, p.tgt, alignments[k], box, lex, false);
        partial[c].push_back(std::move(x));
      }
    }
  });
  std::vector<ExtractedPhrase> all;
  for (auto& v : partial) {
    for (auto& x : v) all.push_back(std::move(x));
  }
  return ScoreExtracted(all);
}

std::string MosesText(const PhraseTable& table) {
  std::ostringstream out;
  for (const auto& [src, cands] : table.entries) {
    if (src.find('|') != std::string::npos) Fail(ErrorKind::kInvalidArgument, "phrase contains '|': " + src);
    for (const auto& c : cands) {
      if (c.tgt.find('|') != std::string::npos) Fail(ErrorKind::kInvalidArgument, "phrase contains '|': " + c.tgt);
      out << src << " ||| " << c.tgt << " ||| " << FormatDouble(c.fwd) << ' ' << FormatDouble(c.bwd);
      if (c.has_lex) out << ' ' << FormatDouble(c.lex_fwd) << ' ' << FormatDouble(c.lex_bwd);
      out << '\n';
    }
  }
  return out.str();
}

void WriteMoses(const PhraseTable& table, const std::string& path) {
  const std::string text = MosesText(table);
  if (!EndsWith(path, ".gz")) {
    WriteFile(path, text);
    return;
  }
  gzFile f = gzopen(path.c_str(), "wb");
  if (!f) Fail(ErrorKind::kIo, "cannot write " + path);
  const int written = text.empty() ? 0 : gzwrite(f, text.data(), static_cast<unsigned>(text.size()));
  gzclose(f);
  if (written != static_cast<int>(text.size())) Fail(ErrorKind::kIo, "short write to " + path);
}

PhraseTable ReadMoses(const std::string& path) {
  std::string text;
  if (EndsWith(path, ".gz")) {
    gzFile f = gzopen(path.c_str(), "rb");
    if (!f) Fail(ErrorKind::kIo, "cannot read " + path);
    char buf[1 << 15];
    int n;
    while ((n = gzread(f, buf, sizeof(buf))) > 0) text.append(buf, static_cast<std::size_t>(n));
    gzclose(f);
    if (n < 0) Fail(ErrorKind::kIo, "corrupt gzip stream in " + path);
  } else {
    text = ReadFile(path);
  }
  PhraseTable table;
  bool any_lex = false, any_plain = false;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    auto fail = [&](const std::string& msg) {
      Fail(ErrorKind::kFormat, path + ":" + std::to_string(line_no) + ": " + msg);
    };
    auto fields = Split(line, "|||");
    if (fields.size() < 3) fail("expected 'src ||| tgt ||| scores'");
    Candidate c;
    const std::string src = Join(SplitWhitespace(fields[0]), " ");
    c.tgt = Join(SplitWhitespace(fields[1]), " ");
    if (src.empty() || c.tgt.empty()) fail("empty phrase");
    auto scores = SplitWhitespace(fields[2]);
    if (scores.size() != 2 && scores.size() != 4) fail("expected 2 or 4 scores");
    std::vector<double> v(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (!ParseDouble(scores[i], &v[i])) fail("bad score '" + scores[i] + "'");
    }
    c.fwd = v[0];
    c.bwd = v[1];
    if (v.size() == 4) {
      c.has_lex = true;
      c.lex_fwd = v[2];
      c.lex_bwd = v[3];
      any_lex = true;
    } else {
      any_plain = true;
    }
    table.entries[src].push_back(std::move(c));
  }
  table.provenance = any_lex && !any_plain ? Provenance::kExtracted : Provenance::kUnsupervised;
  return table;
}

}  // namespace umtx::ptable
