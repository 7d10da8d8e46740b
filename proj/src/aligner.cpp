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

#include "umtx/aligner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "umtx/textproc.hpp"

namespace umtx::align {

namespace {

constexpr double kFloor = 1e-12;

inline std::uint64_t PairKey(std::uint32_t e, std::uint32_t f) {
  return (static_cast<std::uint64_t>(e) << 32) | f;
}

struct Encoded {
  std::vector<std::uint32_t> src;  // ids >= 1
  std::vector<std::uint32_t> tgt;
};

}  // namespace

double AlignModel::DiagonalScore(int i, int j, int m, int n, double lambda) {
  return std::exp(-lambda * std::fabs(static_cast<double>(i) / m - static_cast<double>(j) / n));
}

double AlignModel::Prob(std::uint32_t src, std::uint32_t tgt) const {
  auto it = table_.find(PairKey(src, tgt));
  return it == table_.end() ? 0.0 : it->second;
}

double AlignModel::Prob(const std::string& src, const std::string& tgt) const {
  std::uint32_t e = src.empty() ? 0 : SrcId(src);
  std::uint32_t f = TgtId(tgt);
  if (e == kUnknown || f == kUnknown) return 0.0;
  return Prob(e, f);
}

std::uint32_t AlignModel::SrcId(const std::string& w) const {
  auto it = src_ids_.find(w);
  return it == src_ids_.end() ? kUnknown : it->second;
}

std::uint32_t AlignModel::TgtId(const std::string& w) const {
  auto it = tgt_ids_.find(w);
  return it == tgt_ids_.end() ? kUnknown : it->second;
}

double AlignModel::MaxRowSumError() const {
  double worst = 0.0;
  for (std::uint32_t e = 0; e < row_targets_.size(); ++e) {
    if (row_targets_[e].empty()) continue;
    double sum = 0.0;
    for (std::uint32_t f : row_targets_[e]) sum += Prob(e, f);
    worst = std::max(worst, std::fabs(sum - 1.0));
  }
  return worst;
}

AlignModel TrainFastAlign(const Bitext& bitext, const FastAlignOptions& options) {
  if (bitext.empty()) Fail(ErrorKind::kInvalidArgument, "fast_align: empty bitext");
  if (options.iterations < 1) Fail(ErrorKind::kInvalidArgument, "fast_align: iterations must be >= 1");
  if (options.p0 < 0.0 || options.p0 >= 1.0) Fail(ErrorKind::kInvalidArgument, "fast_align: p0 must be in [0,1)");
  if (options.lambda < 0.0) Fail(ErrorKind::kInvalidArgument, "fast_align: lambda must be >= 0");

  AlignModel model;
  model.lambda_ = options.lambda;
  model.p0_ = options.p0;
  std::vector<Encoded> data;
  data.reserve(bitext.size());
  for (const auto& p : bitext) {
    if (p.src.empty() || p.tgt.empty()) {
      model.skipped_++;
      continue;
    }
    Encoded e;
    for (const auto& w : p.src) {
      auto [it, _] = model.src_ids_.emplace(w, static_cast<std::uint32_t>(model.src_ids_.size() + 1));
      e.src.push_back(it->second);
    }
    for (const auto& w : p.tgt) {
      auto [it, _] = model.tgt_ids_.emplace(w, static_cast<std::uint32_t>(model.tgt_ids_.size()));
      e.tgt.push_back(it->second);
    }
    data.push_back(std::move(e));
  }
  if (model.skipped_ > 0) LogWarning("fast_align: skipped " + std::to_string(model.skipped_) + " empty sentence pairs");
  if (data.empty()) Fail(ErrorKind::kInvalidArgument, "fast_align: no non-empty sentence pairs");

  // Uniform initialization over co-occurring pairs.
  std::vector<std::set<std::uint32_t>> cooc(model.src_ids_.size() + 1);
  for (const auto& d : data) {
    for (std::uint32_t f : d.tgt) {
      cooc[0].insert(f);
      for (std::uint32_t e : d.src) cooc[e].insert(f);
    }
  }
  model.row_targets_.resize(cooc.size());
  for (std::uint32_t e = 0; e < cooc.size(); ++e) {
    model.row_targets_[e].assign(cooc[e].begin(), cooc[e].end());
    const double u = cooc[e].empty() ? 0.0 : 1.0 / static_cast<double>(cooc[e].size());
    for (std::uint32_t f : cooc[e]) model.table_[PairKey(e, f)] = u;
  }

  constexpr std::size_t kChunk = 2048;
  const std::size_t num_chunks = (data.size() + kChunk - 1) / kChunk;
  const double lambda = options.lambda, p0 = options.p0;

  auto e_step = [&](bool collect, std::vector<std::unordered_map<std::uint64_t, double>>* partial,
                    std::vector<double>* partial_ll) {
    ParallelChunks(data.size(), kChunk, options.workers, [&](std::size_t c, std::size_t b, std::size_t e) {
      auto* counts = collect ? &(*partial)[c] : nullptr;
      double ll = 0.0;
      std::vector<double> post;
      for (std::size_t s = b; s < e; ++s) {
        const auto& d = data[s];
        const int m = static_cast<int>(d.src.size()), n = static_cast<int>(d.tgt.size());
        post.resize(static_cast<std::size_t>(m) + 1);
        for (int j = 1; j <= n; ++j) {
          const std::uint32_t f = d.tgt[j - 1];
          double z = 0.0;
          for (int i = 1; i <= m; ++i) z += AlignModel::DiagonalScore(i, j, m, n, lambda);
          post[0] = p0 * model.Prob(0, f);
          double sum = post[0];
          for (int i = 1; i <= m; ++i) {
            post[i] = (1.0 - p0) * AlignModel::DiagonalScore(i, j, m, n, lambda) / z * model.Prob(d.src[i - 1], f);
            sum += post[i];
          }
          ll += std::log(std::max(sum, 1e-300));
          if (counts && sum > 0.0) {
            (*counts)[PairKey(0, f)] += post[0] / sum;
            for (int i = 1; i <= m; ++i) (*counts)[PairKey(d.src[i - 1], f)] += post[i] / sum;
          }
        }
      }
      (*partial_ll)[c] = ll;
    });
  };

  for (int it = 0; it < options.iterations; ++it) {
    std::vector<std::unordered_map<std::uint64_t, double>> partial(num_chunks);
    std::vector<double> partial_ll(num_chunks, 0.0);
    e_step(true, &partial, &partial_ll);
    double ll = 0.0;
    for (double x : partial_ll) ll += x;
    model.log_likelihood_.push_back(ll);

    std::unordered_map<std::uint64_t, double> counts;
    for (auto& p : partial) {
      for (const auto& [k, v] : p) counts[k] += v;
    }
    std::vector<double> row_total(model.row_targets_.size(), 0.0);
    for (std::uint32_t e = 0; e < model.row_targets_.size(); ++e) {
      for (std::uint32_t f : model.row_targets_[e]) {
        auto itc = counts.find(PairKey(e, f));
        if (itc != counts.end()) row_total[e] += itc->second;
      }
    }
    for (std::uint32_t e = 0; e < model.row_targets_.size(); ++e) {
      if (!(row_total[e] > 0.0)) continue;
      for (std::uint32_t f : model.row_targets_[e]) {
        auto itc = counts.find(PairKey(e, f));
        model.table_[PairKey(e, f)] = itc == counts.end() ? 0.0 : itc->second / row_total[e];
      }
    }
    LogInfo("fast_align iteration " + std::to_string(it + 1) + ": log-likelihood " + FormatDouble(ll));
  }
  // Likelihood of the final parameters.
  {
    std::vector<double> partial_ll(num_chunks, 0.0);
    e_step(false, nullptr, &partial_ll);
    double ll = 0.0;
    for (double x : partial_ll) ll += x;
    model.log_likelihood_.push_back(ll);
  }
  return model;
}

Alignment AlignSentence(const AlignModel& m, const Tokens& src, const Tokens& tgt) {
  Alignment a;
  const int ms = static_cast<int>(src.size()), n = static_cast<int>(tgt.size());
  if (ms == 0 || n == 0) return a;
  std::vector<std::uint32_t> e(src.size());
  for (int i = 0; i < ms; ++i) e[i] = m.SrcId(src[i]);
  for (int j = 1; j <= n; ++j) {
    const std::uint32_t f = m.TgtId(tgt[j - 1]);
    auto t = [&](std::uint32_t src_id) {
      if (src_id == AlignModel::kUnknown || f == AlignModel::kUnknown) return kFloor;
      return std::max(m.Prob(src_id, f), kFloor);
    };
    double z = 0.0;
    for (int i = 1; i <= ms; ++i) z += AlignModel::DiagonalScore(i, j, ms, n, m.lambda());
    double best = m.p0() * t(0);
    int arg = 0;
    for (int i = 1; i <= ms; ++i) {
      double s = (1.0 - m.p0()) * AlignModel::DiagonalScore(i, j, ms, n, m.lambda()) / z * t(e[i - 1]);
      if (s > best) {
        best = s;
        arg = i;
      }
    }
    if (arg > 0) a.emplace(arg - 1, j - 1);
  }
  return a;
}

Alignment Transpose(const Alignment& a) {
  Alignment out;
  for (const auto& [i, j] : a) out.emplace(j, i);
  return out;
}

Symmetrization ParseSymmetrization(const std::string& name) {
  if (name == "intersection") return Symmetrization::kIntersection;
  if (name == "union") return Symmetrization::kUnion;
  if (name == "grow-diag-final-and" || name == "gdfa") return Symmetrization::kGrowDiagFinalAnd;
  Fail(ErrorKind::kInvalidArgument, "unknown symmetrization heuristic '" + name + "'");
}

Alignment Symmetrize(const Alignment& fwd, const Alignment& rev, int src_len, int tgt_len,
                     Symmetrization heuristic) {
  Alignment inter, uni;
  std::set_intersection(fwd.begin(), fwd.end(), rev.begin(), rev.end(), std::inserter(inter, inter.end()));
  std::set_union(fwd.begin(), fwd.end(), rev.begin(), rev.end(), std::inserter(uni, uni.end()));
  if (heuristic == Symmetrization::kIntersection) return inter;
  if (heuristic == Symmetrization::kUnion) return uni;

  for (const auto& [i, j] : uni) {
    src_len = std::max(src_len, i + 1);
    tgt_len = std::max(tgt_len, j + 1);
  }
  Alignment a = inter;
  std::vector<char> src_aligned(static_cast<std::size_t>(src_len), 0), tgt_aligned(static_cast<std::size_t>(tgt_len), 0);
  for (const auto& [i, j] : a) {
    src_aligned[i] = 1;
    tgt_aligned[j] = 1;
  }
  static constexpr int kNeighbors[8][2] = {{-1, 0}, {0, -1}, {1, 0}, {0, 1}, {-1, -1}, {-1, 1}, {1, -1}, {1, 1}};
  bool added = true;
  while (added) {
    added = false;
    for (int i = 0; i < src_len; ++i) {
      for (int j = 0; j < tgt_len; ++j) {
        if (!a.count({i, j})) continue;
        for (const auto& d : kNeighbors) {
          const int ni = i + d[0], nj = j + d[1];
          if (ni < 0 || nj < 0 || ni >= src_len || nj >= tgt_len) continue;
          if ((!src_aligned[ni] || !tgt_aligned[nj]) && uni.count({ni, nj}) && !a.count({ni, nj})) {
            a.emplace(ni, nj);
            src_aligned[ni] = 1;
            tgt_aligned[nj] = 1;
            added = true;
          }
        }
      }
    }
  }
  for (const Alignment* dir : {&fwd, &rev}) {
    for (const auto& [i, j] : *dir) {
      if (!src_aligned[i] && !tgt_aligned[j]) {
        a.emplace(i, j);
        src_aligned[i] = 1;
        tgt_aligned[j] = 1;
      }
    }
  }
  return a;
}

double Aer(const Alignment& pred, const Alignment& sure, const Alignment& possible) {
  if (pred.empty() && sure.empty()) return 0.0;
  std::size_t as = 0, ap = 0;
  for (const auto& l : pred) {
    as += sure.count(l);
    ap += possible.count(l);
  }
  return 1.0 - static_cast<double>(as + ap) / static_cast<double>(pred.size() + sure.size());
}

std::vector<Alignment> AlignBitext(const Bitext& bitext, const FastAlignOptions& options, Symmetrization heuristic) {
  AlignModel fwd = TrainFastAlign(bitext, options);
  Bitext swapped;
  swapped.reserve(bitext.size());
  for (const auto& p : bitext) swapped.push_back({p.tgt, p.src});
  AlignModel rev = TrainFastAlign(swapped, options);
  std::vector<Alignment> out(bitext.size());
  ParallelChunks(bitext.size(), 1024, options.workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      const auto& p = bitext[s];
      Alignment f = AlignSentence(fwd, p.src, p.tgt);
      Alignment r = Transpose(AlignSentence(rev, p.tgt, p.src));
      out[s] = Symmetrize(f, r, static_cast<int>(p.src.size()), static_cast<int>(p.tgt.size()), heuristic);
    }
  });
  return out;
}

std::string FormatPharaoh(const Alignment& a) {
  std::string out;
  for (const auto& [i, j] : a) {
    if (!out.empty()) out.push_back(' ');
    out += std::to_string(i) + "-" + std::to_string(j);
  }
  return out;
}

Alignment ParsePharaoh(const std::string& line) {
  Alignment a;
  for (const auto& link : SplitWhitespace(line)) {
    auto dash = link.find('-');
    long long i, j;
    if (dash == std::string::npos || !ParseInt(std::string_view(link).substr(0, dash), &i) ||
        !ParseInt(std::string_view(link).substr(dash + 1), &j) || i < 0 || j < 0) {
      Fail(ErrorKind::kFormat, "malformed alignment link '" + link + "'");
    }
    a.emplace(static_cast<int>(i), static_cast<int>(j));
  }
  return a;
}

SentencePair ParseBitextLine(const std::string& line, std::size_t line_no) {
  auto parts = Split(line, "|||");
  if (parts.size() != 2) {
    Fail(ErrorKind::kFormat, "bitext line " + std::to_string(line_no) + ": expected 'src ||| tgt'");
  }
  return {SplitWhitespace(parts[0]), SplitWhitespace(parts[1])};
}

Bitext ReadBitext(const std::string& path) {
  Bitext b;
  auto lines = ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) b.push_back(ParseBitextLine(lines[i], i + 1));
  return b;
}

Bitext ReadBitext(const std::string& src_path, const std::string& tgt_path) {
  auto s = ReadLines(src_path), t = ReadLines(tgt_path);
  if (s.size() != t.size()) Fail(ErrorKind::kFormat, "parallel files differ in line count");
  Bitext b;
  for (std::size_t i = 0; i < s.size(); ++i) b.push_back({SplitWhitespace(s[i]), SplitWhitespace(t[i])});
  return b;
}

void WriteBitext(const Bitext& b, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  for (const auto& p : b) out << Join(p.src, " ") << " ||| " << Join(p.tgt, " ") << '\n';
}

}  // namespace umtx::align
