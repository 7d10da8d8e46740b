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

// Self-learning orthogonal mapping of two embedding spaces into a shared one.

#ifndef UMTX_XMAP_HPP_
#define UMTX_XMAP_HPP_

#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "umtx/phrasevec.hpp"

namespace umtx::xmap {

using phrasevec::EmbeddingMatrix;
using phrasevec::RowMatrix;

enum class SeedProvenance { kIdentical, kNumerals, kFrequency, kUser, kInduced };

struct SeedDictionary {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (src row, tgt row)
  SeedProvenance provenance = SeedProvenance::kUser;
};

// Throws unless every index is in range and no source index repeats.
void ValidateDictionary(const SeedDictionary& d, std::size_t src_size, std::size_t tgt_size);

// Identically spelled entries; optionally restricted to the first `limit`
// source rows (0 = no limit).
SeedDictionary IdenticalSeed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, std::size_t limit = 0);
// Identically spelled numbers: at least one digit, otherwise punctuation.
SeedDictionary NumeralSeed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt);
// Row i <-> row i for the first n single-token rows of each side.
SeedDictionary FrequencySeed(const EmbeddingMatrix& src, const EmbeddingMatrix& tgt, std::size_t n);

// Two-column TSV of phrases.
void SaveDictionary(const SeedDictionary& d, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt,
                    const std::string& path);
SeedDictionary LoadDictionary(const std::string& path, const EmbeddingMatrix& src, const EmbeddingMatrix& tgt);

// Unit rows, mean-centered columns, unit rows again. A zero row is an error
// naming the offending entry.
EmbeddingMatrix NormalizeEmbeddings(const EmbeddingMatrix& m);

struct Transforms {
  Eigen::MatrixXd wx;
  Eigen::MatrixXd wz;
};

// Orthogonal Procrustes on the dictionary-restricted cross-covariance:
// Wx = U V^T from SVD(X_d^T Z_d), Wz = I.
Transforms SolveProcrustes(const RowMatrix& x, const RowMatrix& z, const SeedDictionary& dict);

enum class Retrieval { kNearest, kCsls };

// Best target row per source row under cosine or CSLS
// (2 cos(x,z) - r_T(x) - r_S(z)); ties go to the lower target index.
SeedDictionary InduceDictionary(const RowMatrix& xm, const RowMatrix& zm, Retrieval method, int csls_k = 10,
                                int workers = 1);

// Mean of the k largest cosines of every row of `a` against the rows of `b`.
Eigen::VectorXd MeanTopKSimilarity(const RowMatrix& a, const RowMatrix& b, int k, int workers = 1);

struct MappingOptions {
  int max_iters = 50;
  double tol = 1e-6;
  int workers = 1;
};

struct MappingSolution {
  Eigen::MatrixXd wx;
  Eigen::MatrixXd wz;
  SeedDictionary final_dictionary;
  std::vector<double> objective_trace;  // mean cosine of induced pairs per iteration
  int iterations = 0;
};

// Alternates Procrustes and nearest-neighbour dictionary induction until the
// objective improves by less than tol; returns the best-objective iterate.
MappingSolution SelfLearningMap(const RowMatrix& x, const RowMatrix& z, const SeedDictionary& seed,
                                const MappingOptions& options = {});

// Max |W^T W - I| entry.
double OrthogonalityError(const Eigen::MatrixXd& w);

EmbeddingMatrix ApplyTransform(const EmbeddingMatrix& m, const Eigen::MatrixXd& w);

}  // namespace umtx::xmap

#endif  // UMTX_XMAP_HPP_
