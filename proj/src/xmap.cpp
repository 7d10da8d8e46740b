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

#include "umtx/xmap.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <unordered_map>

namespace umtx::xmap {

void ValidateDictionary(const SeedDictionary& d, std::size_t src_size, std::size_t tgt_size) {
  std::set<std::size_t> seen;
  for (const auto& [s, t] : d.pairs) {
    if (s >= src_size || t >= tgt_size) Fail(ErrorKind::kInvalidArgument, "dictionary index out of range");
    if (!seen.insert(s).second) {
      Fail(ErrorKind::kInvalidArgument, "dictionary has duplicate source entry " + std::to_string(s));
    }
  }
}

SeedDictionary IdenticalSeed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, std::size_t limit) {
  std::unordered_map<std::string, std::size_t> tgt_index;
  for (std::size_t j = 0; j < tgt.size(); ++j) tgt_index.emplace(tgt.labels[j], j);
  SeedDictionary d;
  d.provenance = SeedProvenance::kIdentical;
  const std::size_t n = limit ? std::min(limit, src.size()) : src.size();
  for (std::size_t i = 0; i < n; ++i) {
    auto it = tgt_index.find(src.labels[i]);
    if (it != tgt_index.end()) d.pairs.emplace_back(i, it->second);
  }
  return d;
}

namespace {
bool IsNumeral(const std::string& s) {
  bool digit = false;
  for (char32_t cp : DecodeUtf8(s)) {
    if (cp >= '0' && cp <= '9') {
      digit = true;
    } else if (!IsUnicodePunct(cp) && cp != ' ') {
      return false;
    }
  }
  return digit;
}
}  // namespace

SeedDictionary NumeralSeed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  SeedDictionary d = IdenticalSeed(src, tgt);
  std::erase_if(d.pairs, [&](const auto& p) { return !IsNumeral(src.labels[p.first]); });
  d.provenance = SeedProvenance::kNumerals;
  return d;
}

SeedDictionary FrequencySeed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, std::size_t n) {
  auto single = [](const EmbeddingMatrix& m) {
    std::vector<std::size_t> rows;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (m.labels[i].find(' ') == std::string::npos) rows.push_back(i);
    }
    return rows;
  };
  auto a = single(src), b = single(tgt);
  SeedDictionary d;
  d.provenance = SeedProvenance::kFrequency;
  for (std::size_t i = 0; i < std::min({n, a.size(), b.size()}); ++i) d.pairs.emplace_back(a[i], b[i]);
  return d;
}

void SaveDictionary(const SeedDictionary& d, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                    const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorKind::kIo, "cannot write " + path);
  for (const auto& [s, t] : d.pairs) out << src.labels[s] << '\t' << tgt.labels[t] << '\n';
}

SeedDictionary LoadDictionary(const std::string& path, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt) {
  std::unordered_map<std::string, std::size_t> si, ti;
  for (std::size_t i = 0; i < src.size(); ++i) si.emplace(src.labels[i], i);
  for (std::size_t j = 0; j < tgt.size(); ++j) ti.emplace(tgt.labels[j], j);
  SeedDictionary d;
  d.provenance = SeedProvenance::kUser;
  std::set<std::size_t> used;
  auto lines = ReadLines(path);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    if (Trim(lines[n]).empty()) continue;
    auto f = Split(lines[n], "\t");
    if (f.size() != 2) Fail(ErrorKind::kFormat, path + ":" + std::to_string(n + 1) + ": expected two columns");
    auto a = si.find(f[0]);
    auto b = ti.find(f[1]);
    if (a == si.end() || b == ti.end()) continue;
    if (used.insert(a->second).second) d.pairs.emplace_back(a->second, b->second);
  }
  return d;
}

EmbeddingMatrix NormalizeEmbeddings(const EmbeddingMatrix& m) {
  EmbeddingMatrix out = m;
  for (Eigen::Index i = 0; i < out.rows.rows(); ++i) {
    double n = out.rows.row(i).norm();
    if (!(n > 0)) {
      const std::string name = static_cast<std::size_t>(i) < m.labels.size() ? m.labels[i] : std::to_string(i);
      Fail(ErrorKind::kInvalidArgument, "normalize: zero vector for entry '" + name + "'");
    }
    out.rows.row(i) /= n;
  }
  // Re-centering after the second scaling shifts the means again; repeat
  // until both conditions hold, so that normalizing is a fixpoint.
  for (int round = 0; round < 100; ++round) {
    Eigen::RowVectorXd mean = out.rows.colwise().mean();
    if (round > 0 && mean.cwiseAbs().maxCoeff() < 1e-13) break;
    out.rows.rowwise() -= mean;
    for (Eigen::Index i = 0; i < out.rows.rows(); ++i) {
      double n = out.rows.row(i).norm();
      if (!(n > 0)) {
        const std::string name = static_cast<std::size_t>(i) < m.labels.size() ? m.labels[i] : std::to_string(i);
        Fail(ErrorKind::kInvalidArgument, "normalize: entry '" + name + "' vanishes after centering");
      }
      out.rows.row(i) /= n;
    }
  }
  out.norm_state = phrasevec::NormState::kCenteredUnit;
  return out;
}

Transforms SolveProcrustes(const RowMatrix& x, const RowMatrix& z, const SeedDictionary& dict) {
  if (dict.pairs.empty()) Fail(ErrorKind::kInvalidArgument, "procrustes: empty dictionary");
  if (x.cols() != z.cols()) Fail(ErrorKind::kInvalidArgument, "procrustes: dimension mismatch");
  const Eigen::Index dim = x.cols();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim, dim);
  for (const auto& [s, t] : dict.pairs) {
    if (s >= static_cast<std::size_t>(x.rows()) || t >= static_cast<std::size_t>(z.rows())) {
      Fail(ErrorKind::kInvalidArgument, "procrustes: dictionary index out of range");
    }
    m.noalias() += x.row(static_cast<Eigen::Index>(s)).transpose() * z.row(static_cast<Eigen::Index>(t));
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Transforms t;
  t.wx = svd.matrixU() * svd.matrixV().transpose();
  t.wz = Eigen::MatrixXd::Identity(dim, dim);
  return t;
}

Eigen::VectorXd MeanTopKSimilarity(const RowMatrix& a, const RowMatrix& b, int k, int workers) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t m = static_cast<std::size_t>(b.rows());
  const std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), m);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  const RowMatrix au = phrasevec::UnitRows(a), bu = phrasevec::UnitRows(b);
  ParallelChunks(n, 256, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
    RowMatrix sims = au.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo)) * bu.transpose();
    std::vector<double> row(m);
    for (std::size_t i = lo; i < hi; ++i) {
      for (std::size_t j = 0; j < m; ++j) row[j] = sims(static_cast<Eigen::Index>(i - lo), static_cast<Eigen::Index>(j));
      std::nth_element(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk - 1), row.end(), std::greater<>());
      std::sort(row.begin(), row.begin() + static_cast<std::ptrdiff_t>(kk), std::greater<>());
      double sum = 0.0;
      for (std::size_t j = 0; j < kk; ++j) sum += row[j];
      out(static_cast<Eigen::Index>(i)) = sum / static_cast<double>(kk);
    }
  });
  return out;
}

SeedDictionary InduceDictionary(const RowMatrix& xm, const RowMatrix& zm, Retrieval method, int csls_k,
                                int workers) {
  if (method == Retrieval::kCsls && csls_k < 1) Fail(ErrorKind::kInvalidArgument, "csls: k must be >= 1");
  if (xm.cols() != zm.cols()) Fail(ErrorKind::kInvalidArgument, "induce dictionary: dimension mismatch");
  const std::size_t n = static_cast<std::size_t>(xm.rows());
  const std::size_t m = static_cast<std::size_t>(zm.rows());
  if (m == 0) Fail(ErrorKind::kInvalidArgument, "induce dictionary: empty target space");
  Eigen::VectorXd r_src, r_tgt;
  if (method == Retrieval::kCsls) {
    r_src = MeanTopKSimilarity(xm, zm, csls_k, workers);  // r_T(x)
    r_tgt = MeanTopKSimilarity(zm, xm, csls_k, workers);  // r_S(z)
  }
  std::vector<std::size_t> best(n);
  const RowMatrix xu = phrasevec::UnitRows(xm), zu = phrasevec::UnitRows(zm);
  ParallelChunks(n, 256, workers, [&](std::size_t, std::size_t lo, std::size_t hi) {
    RowMatrix sims = xu.middleRows(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(hi - lo)) * zu.transpose();
    for (std::size_t i = lo; i < hi; ++i) {
      double best_score = -std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t j = 0; j < m; ++j) {
        double s = sims(static_cast<Eigen::Index>(i - lo), static_cast<Eigen::Index>(j));
        if (method == Retrieval::kCsls) {
          s = 2.0 * s - r_src(static_cast<Eigen::Index>(i)) - r_tgt(static_cast<Eigen::Index>(j));
        }
        if (s > best_score) {
          best_score = s;
          arg = j;
        }
      }
      best[i] = arg;
    }
  });
  SeedDictionary d;
  d.provenance = SeedProvenance::kInduced;
  d.pairs.reserve(n);
  for (std::size_t i = 0; i < n; ++i) d.pairs.emplace_back(i, best[i]);
  return d;
}

namespace {

double MeanPairCosine(const RowMatrix& xm, const RowMatrix& z, const SeedDictionary& d) {
  if (d.pairs.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& [s, t] : d.pairs) {
    const auto a = xm.row(static_cast<Eigen::Index>(s));
    const auto b = z.row(static_cast<Eigen::Index>(t));
    const double na = a.norm(), nb = b.norm();
    sum += (na > 0 && nb > 0) ? a.dot(b) / (na * nb) : 0.0;
  }
  return sum / static_cast<double>(d.pairs.size());
}

}  // namespace

MappingSolution SelfLearningMap(const RowMatrix& x, const RowMatrix& z, const SeedDictionary& seed,
                                const MappingOptions& options) {
  ValidateDictionary(seed, static_cast<std::size_t>(x.rows()), static_cast<std::size_t>(z.rows()));
  MappingSolution best;
  Transforms t = SolveProcrustes(x, z, seed);
  if (options.max_iters <= 0) {
    best.wx = t.wx;
    best.wz = t.wz;
    best.final_dictionary = seed;
    RowMatrix xm = x * t.wx;
    best.objective_trace.push_back(MeanPairCosine(xm, z, seed));
    return best;
  }
  double best_obj = -std::numeric_limits<double>::infinity();
  double prev = -std::numeric_limits<double>::infinity();
  for (int it = 1; it <= options.max_iters; ++it) {
    RowMatrix xm = x * t.wx;
    SeedDictionary dict = InduceDictionary(xm, z, Retrieval::kNearest, 0, options.workers);
    const double obj = MeanPairCosine(xm, z, dict);
    best.objective_trace.push_back(obj);
    best.iterations = it;
    if (obj > best_obj) {
      best_obj = obj;
      best.wx = t.wx;
      best.wz = t.wz;
      best.final_dictionary = dict;
    }
    LogInfo("self-learning iteration " + std::to_string(it) + ": mean cosine " + FormatDouble(obj));
    if (obj - prev < options.tol) break;
    prev = obj;
    t = SolveProcrustes(x, z, dict);
  }
  return best;
}

double OrthogonalityError(const Eigen::MatrixXd& w) {
  Eigen::MatrixXd e = w.transpose() * w - Eigen::MatrixXd::Identity(w.cols(), w.cols());
  return e.cwiseAbs().maxCoeff();
}

EmbeddingMatrix ApplyTransform(const EmbeddingMatrix& m, const Eigen::MatrixXd& w) {
  EmbeddingMatrix out = m;
  out.rows = m.rows * w;
  return out;
}

}  // namespace umtx::xmap
