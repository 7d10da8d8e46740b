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

#include "umtx/phrasevec.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <thread>

namespace umtx::phrasevec {

long long PhraseVocab::Find(const std::string& phrase) const {
  auto it = lookup_.find(phrase);
  return it == lookup_.end() ? -1 : static_cast<long long>(it->second);
}

std::size_t PhraseVocab::CountOrder(int order) const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.order == order;
  return n;
}

PhraseVocab PhraseVocab::FromEntries(std::vector<PhraseEntry> entries, Caps caps) {
  PhraseVocab v;
  v.caps_ = caps;
  v.entries_ = std::move(entries);
  for (std::size_t i = 0; i < v.entries_.size(); ++i) {
    v.entries_[i].index = i;
    v.lookup_[v.entries_[i].phrase] = i;
  }
  return v;
}

void PhraseVocab::Save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  out << "#umtx-vocab\tv1\t" << caps_[0] << '\t' << caps_[1] << '\t' << caps_[2] << '\n';
  for (const auto& e : entries_) out << e.index << '\t' << e.order << '\t' << e.frequency << '\t' << e.phrase << '\n';
}

PhraseVocab PhraseVocab::Load(const std::string& path) {
  auto lines = ReadLines(path);
  if (lines.empty()) Fail(ErrorKind::kFormat, path + ": empty vocabulary file");
  auto h = Split(lines[0], "\t");
  Caps caps{};
  if (h.size() != 5 || h[0] != "#umtx-vocab" || h[1] != "v1") Fail(ErrorKind::kFormat, path + ": not a v1 vocabulary");
  for (int i = 0; i < 3; ++i) {
    long long c;
    if (!ParseInt(h[2 + i], &c)) Fail(ErrorKind::kFormat, path + ": bad caps");
    caps[i] = static_cast<std::size_t>(c);
  }
  std::vector<PhraseEntry> entries;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = Split(lines[i], "\t");
    long long idx, ord, freq;
    if (f.size() != 4 || !ParseInt(f[0], &idx) || !ParseInt(f[1], &ord) || !ParseInt(f[2], &freq) ||
        idx != static_cast<long long>(entries.size())) {
      Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 1) + ": malformed vocabulary entry");
    }
    entries.push_back({f[3], static_cast<int>(ord), static_cast<std::uint64_t>(freq), 0});
  }
  return FromEntries(std::move(entries), caps);
}

PhraseVocab BuildPhraseVocab(const std::vector<textproc::Sentence>& corpus, const PhraseVocab::Caps& caps,
                             int workers) {
  if (corpus.empty()) Fail(ErrorKind::kInvalidArgument, "phrase vocabulary: empty corpus");
  for (auto c : caps) {
    if (c == 0) Fail(ErrorKind::kInvalidArgument, "phrase vocabulary: caps must be positive");
  }
  using CountMap = std::unordered_map<std::string, std::uint64_t>;
  constexpr std::size_t kChunk = 8192;
  const std::size_t num_chunks = (corpus.size() + kChunk - 1) / kChunk;
  std::vector<std::array<CountMap, kMaxPhraseOrder>> partial(num_chunks);
  ParallelChunks(corpus.size(), kChunk, workers, [&](std::size_t c, std::size_t b, std::size_t e) {
    auto& counts = partial[c];
    for (std::size_t s = b; s < e; ++s) {
      const auto& t = corpus[s].tokens;
      for (std::size_t i = 0; i < t.size(); ++i) {
        std::string phrase;
        for (int n = 1; n <= kMaxPhraseOrder && i + n <= t.size(); ++n) {
          if (n > 1) phrase.push_back(' ');
          phrase += t[i + n - 1];
          counts[n - 1][phrase]++;
        }
      }
    }
  });
  std::array<CountMap, kMaxPhraseOrder> total;
  for (auto& p : partial) {
    for (int n = 0; n < kMaxPhraseOrder; ++n) {
      for (auto& [k, v] : p[n]) total[n][k] += v;
    }
  }
  std::vector<PhraseEntry> entries;
  for (int n = 0; n < kMaxPhraseOrder; ++n) {
    std::vector<std::pair<std::string, std::uint64_t>> items(total[n].begin(), total[n].end());
    std::sort(items.begin(), items.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    if (items.size() > caps[n]) items.resize(caps[n]);
    for (auto& [p, f] : items) entries.push_back({std::move(p), n + 1, f, 0});
  }
  return PhraseVocab::FromEntries(std::move(entries), caps);
}

// ---------------------------------------------------------------------------
// word2vec text IO

void SaveWord2Vec(const EmbeddingMatrix& m, const std::string& path) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) Fail(ErrorKind::kIo, "cannot write " + path);
  std::fprintf(f, "%zu %d\n", m.size(), m.dim());
  for (std::size_t i = 0; i < m.size(); ++i) {
    std::string label = m.labels[i];
    std::replace(label.begin(), label.end(), ' ', '_');
    std::fputs(label.c_str(), f);
    for (int d = 0; d < m.dim(); ++d) {
      std::fputc(' ', f);
      std::fputs(FormatDouble(m.rows(static_cast<Eigen::Index>(i), d)).c_str(), f);
    }
    std::fputc('\n', f);
  }
  if (std::fclose(f) != 0) Fail(ErrorKind::kIo, "write failed: " + path);
}

EmbeddingMatrix LoadWord2Vec(const std::string& path) {
  auto lines = ReadLines(path);
  if (lines.empty()) Fail(ErrorKind::kFormat, path + ": empty embedding file");
  auto h = SplitWhitespace(lines[0]);
  long long count, dim;
  if (h.size() != 2 || !ParseInt(h[0], &count) || !ParseInt(h[1], &dim) || count < 0 || dim < 1) {
    Fail(ErrorKind::kFormat, path + ":1: bad word2vec header");
  }
  if (static_cast<long long>(lines.size()) - 1 < count) Fail(ErrorKind::kFormat, path + ": truncated embedding file");
  EmbeddingMatrix m;
  m.rows.resize(count, dim);
  m.labels.reserve(static_cast<std::size_t>(count));
  for (long long i = 0; i < count; ++i) {
    auto f = SplitWhitespace(lines[static_cast<std::size_t>(i + 1)]);
    if (static_cast<long long>(f.size()) != dim + 1) {
      Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 2) + ": expected " + std::to_string(dim) + " values");
    }
    std::string label = f[0];
    std::replace(label.begin(), label.end(), '_', ' ');
    m.labels.push_back(std::move(label));
    for (long long d = 0; d < dim; ++d) {
      double v;
      if (!ParseDouble(f[static_cast<std::size_t>(d + 1)], &v)) {
        Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 2) + ": bad value");
      }
      m.rows(i, d) = v;
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// SGNS

SgnsConfig SgnsConfig::DeskDefaults() {
  SgnsConfig c;
  c.dim = 32;
  return c;
}

void SgnsConfig::Validate() const {
  if (window < 1 || dim < 1 || negatives < 1 || epochs < 1) {
    Fail(ErrorKind::kInvalidArgument, "sgns: window, dim, negatives and epochs must be >= 1");
  }
  if (!(initial_lr > 0.0) || min_lr < 0.0) Fail(ErrorKind::kInvalidArgument, "sgns: bad learning rate");
}

namespace {

struct Occurrence {
  std::uint32_t position;
  std::uint8_t order;
  std::uint32_t phrase;
};

struct PreparedSentence {
  std::vector<std::int32_t> unigram;  // vocab unigram index or -1
  std::vector<Occurrence> centers;
};

class NegativeSampler {
 public:
  explicit NegativeSampler(const PhraseVocab& vocab, std::size_t num_unigrams) {
    cumulative_.reserve(num_unigrams);
    double acc = 0.0;
    for (std::size_t i = 0; i < num_unigrams; ++i) {
      acc += std::pow(static_cast<double>(vocab[i].frequency), 0.75);
      cumulative_.push_back(acc);
    }
  }
  std::uint32_t Sample(Rng* rng) const {
    double r = rng->Uniform() * cumulative_.back();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), r);
    if (it == cumulative_.end()) --it;
    return static_cast<std::uint32_t>(it - cumulative_.begin());
  }

 private:
  std::vector<double> cumulative_;
};

inline float Sigmoid(float x) { return 1.0f / (1.0f + std::exp(-x)); }

template <bool kShared>
inline float Load(float* p) {
  if constexpr (kShared) {
    return std::atomic_ref<float>(*p).load(std::memory_order_relaxed);
  } else {
    return *p;
  }
}

template <bool kShared>
inline void Store(float* p, float v) {
  if constexpr (kShared) {
    std::atomic_ref<float>(*p).store(v, std::memory_order_relaxed);
  } else {
    *p = v;
  }
}

template <bool kShared>
void TrainShard(const std::vector<PreparedSentence>& data, std::size_t begin, std::size_t end,
                const SgnsConfig& cfg, const NegativeSampler& sampler, float* syn0, float* syn1,
                std::atomic<std::uint64_t>* processed, std::uint64_t total_work, Rng* rng) {
  const int dim = cfg.dim;
  std::vector<float> neu1e(static_cast<std::size_t>(dim));
  std::vector<float> center(static_cast<std::size_t>(dim));
  std::uint64_t local = 0;
  double lr = cfg.initial_lr;
  for (std::size_t s = begin; s < end; ++s) {
    const auto& ps = data[s];
    const long long len = static_cast<long long>(ps.unigram.size());
    for (const auto& occ : ps.centers) {
      if ((local & 1023) == 0) {
        std::uint64_t done = processed->load(std::memory_order_relaxed);
        double frac = std::min(1.0, static_cast<double>(done) / static_cast<double>(std::max<std::uint64_t>(1, total_work)));
        lr = std::max(cfg.min_lr, cfg.initial_lr - (cfg.initial_lr - cfg.min_lr) * frac);
      }
      ++local;
      processed->fetch_add(1, std::memory_order_relaxed);
      float* c = syn0 + static_cast<std::size_t>(occ.phrase) * dim;
      const long long left = static_cast<long long>(occ.position);
      const long long right = left + occ.order;
      for (long long p = left - cfg.window; p < right + cfg.window; ++p) {
        if (p < 0 || p >= len || (p >= left && p < right)) continue;
        const std::int32_t ctx = ps.unigram[static_cast<std::size_t>(p)];
        if (ctx < 0) continue;
        for (int d = 0; d < dim; ++d) {
          neu1e[d] = 0.0f;
          center[d] = Load<kShared>(c + d);
        }
        for (int n = 0; n <= cfg.negatives; ++n) {
          std::uint32_t target;
          float label;
          if (n == 0) {
            target = static_cast<std::uint32_t>(ctx);
            label = 1.0f;
          } else {
            target = sampler.Sample(rng);
            if (target == static_cast<std::uint32_t>(ctx)) continue;
            label = 0.0f;
          }
          float* out = syn1 + static_cast<std::size_t>(target) * dim;
          float f = 0.0f;
          for (int d = 0; d < dim; ++d) f += center[d] * Load<kShared>(out + d);
          const float g = (label - Sigmoid(f)) * static_cast<float>(lr);
          for (int d = 0; d < dim; ++d) {
            float o = Load<kShared>(out + d);
            neu1e[d] += g * o;
            Store<kShared>(out + d, o + g * center[d]);
          }
        }
        for (int d = 0; d < dim; ++d) Store<kShared>(c + d, Load<kShared>(c + d) + neu1e[d]);
      }
    }
  }
}

}  // namespace

EmbeddingMatrix TrainSgns(const std::vector<textproc::Sentence>& corpus, const PhraseVocab& vocab,
                          const SgnsConfig& cfg, SgnsStats* stats) {
  cfg.Validate();
  const std::size_t num_unigrams = vocab.CountOrder(1);
  if (num_unigrams == 0) Fail(ErrorKind::kInvalidArgument, "sgns: vocabulary has no unigrams");
  const std::size_t v = vocab.size();
  const int dim = cfg.dim;

  std::vector<PreparedSentence> data(corpus.size());
  std::vector<std::uint64_t> seen(v, 0);
  std::uint64_t total_centers = 0;
  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const auto& t = corpus[s].tokens;
    auto& ps = data[s];
    ps.unigram.resize(t.size(), -1);
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::string phrase;
      for (int n = 1; n <= kMaxPhraseOrder && i + n <= t.size(); ++n) {
        if (n > 1) phrase.push_back(' ');
        phrase += t[i + n - 1];
        long long id = vocab.Find(phrase);
        if (id < 0) continue;
        if (n == 1) ps.unigram[i] = static_cast<std::int32_t>(id);
        ps.centers.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint8_t>(n), static_cast<std::uint32_t>(id)});
        seen[static_cast<std::size_t>(id)]++;
        ++total_centers;
      }
    }
  }

  Rng init_rng(cfg.seed);
  std::vector<float> syn0(v * dim), syn1(num_unigrams * dim, 0.0f);
  for (auto& x : syn0) x = static_cast<float>((init_rng.Uniform() - 0.5) / dim);

  SgnsStats st;
  st.center_occurrences = total_centers;
  for (std::size_t i = 0; i < v; ++i) st.untrained_entries += seen[i] == 0;
  if (st.untrained_entries > 0) {
    LogWarning("sgns: " + std::to_string(st.untrained_entries) +
               " vocabulary entries never occur in the corpus; keeping their random initialization");
  }

  NegativeSampler sampler(vocab, num_unigrams);
  const std::uint64_t total_work = total_centers * static_cast<std::uint64_t>(cfg.epochs);
  std::atomic<std::uint64_t> processed{0};
  const int workers = std::max(1, cfg.workers);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (workers == 1) {
      Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(epoch) + 1);
      TrainShard<false>(data, 0, data.size(), cfg, sampler, syn0.data(), syn1.data(), &processed, total_work, &rng);
    } else {
      std::vector<std::thread> pool;
      const std::size_t per = (data.size() + workers - 1) / workers;
      for (int w = 0; w < workers; ++w) {
        std::size_t b = std::min(data.size(), per * w), e = std::min(data.size(), per * (w + 1));
        pool.emplace_back([&, b, e, w] {
          Rng rng(cfg.seed * 1000003ULL + static_cast<std::uint64_t>(epoch) * 7919ULL + static_cast<std::uint64_t>(w) + 1);
          TrainShard<true>(data, b, e, cfg, sampler, syn0.data(), syn1.data(), &processed, total_work, &rng);
        });
      }
      for (auto& th : pool) th.join();
    }
    bool finite = std::all_of(syn0.begin(), syn0.end(), [](float x) { return std::isfinite(x); });
    st.finite_per_epoch.push_back(finite);
    if (!finite) Fail(ErrorKind::kRuntime, "sgns: non-finite vectors after epoch " + std::to_string(epoch + 1));
  }

  EmbeddingMatrix m;
  m.rows.resize(static_cast<Eigen::Index>(v), dim);
  for (std::size_t i = 0; i < v; ++i) {
    m.labels.push_back(vocab[i].phrase);
    for (int d = 0; d < dim; ++d) m.rows(static_cast<Eigen::Index>(i), d) = syn0[i * dim + d];
  }
  if (stats) *stats = std::move(st);
  return m;
}

// ---------------------------------------------------------------------------
// Retrieval

namespace {
bool NeighborBefore(const Neighbor& a, const Neighbor& b) {
  return a.cosine != b.cosine ? a.cosine > b.cosine : a.index < b.index;
}
}  // namespace

RowMatrix UnitRows(const RowMatrix& m) {
  RowMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows(); ++i) {
    double n = out.row(i).norm();
    if (n > 0) out.row(i) /= n;
  }
  return out;
}

std::vector<Neighbor> NearestNeighbors(std::size_t query_index, const EmbeddingMatrix& m, std::size_t k) {
  if (k < 1) Fail(ErrorKind::kInvalidArgument, "nearest neighbors: k must be >= 1");
  if (query_index >= m.size()) Fail(ErrorKind::kInvalidArgument, "nearest neighbors: query out of range");
  const auto q = m.rows.row(static_cast<Eigen::Index>(query_index));
  const double qn = q.norm();
  std::vector<Neighbor> all;
  all.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i == query_index) continue;
    const auto r = m.rows.row(static_cast<Eigen::Index>(i));
    const double rn = r.norm();
    double cos = (qn > 0 && rn > 0) ? q.dot(r) / (qn * rn) : 0.0;
    all.push_back({i, cos});
  }
  k = std::min(k, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end(), NeighborBefore);
  all.resize(k);
  return all;
}

std::vector<std::vector<Neighbor>> CrossNearest(const RowMatrix& queries, const RowMatrix& keys, std::size_t k,
                                                int workers) {
  if (k < 1) Fail(ErrorKind::kInvalidArgument, "nearest neighbors: k must be >= 1");
  if (queries.cols() != keys.cols()) Fail(ErrorKind::kInvalidArgument, "nearest neighbors: dimension mismatch");
  const RowMatrix qu = UnitRows(queries);
  const RowMatrix ku = UnitRows(keys);
  const std::size_t nq = static_cast<std::size_t>(qu.rows());
  const std::size_t nk = static_cast<std::size_t>(ku.rows());
  k = std::min(k, nk);
  std::vector<std::vector<Neighbor>> out(nq);
  constexpr std::size_t kBlock = 256;
  ParallelChunks(nq, kBlock, workers, [&](std::size_t, std::size_t b, std::size_t e) {
    RowMatrix sims = qu.middleRows(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(e - b)) * ku.transpose();
    std::vector<Neighbor> row(nk);
    for (std::size_t i = b; i < e; ++i) {
      for (std::size_t j = 0; j < nk; ++j) row[j] = {j, sims(static_cast<Eigen::Index>(i - b), static_cast<Eigen::Index>(j))};
      std::partial_sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k), row.end(), NeighborBefore);
      out[i].assign(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(k));
    }
  });
  return out;
}

}  // namespace umtx::phrasevec
