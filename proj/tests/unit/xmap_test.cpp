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

#include <cmath>
#include <limits>

#include <Eigen/QR>

#include "doctest.h"
#include "test_util.hpp"
#include "umtx/xmap.hpp"

using namespace umtx;
using namespace umtx::xmap;

namespace {

RowMatrix Gaussian(Rng* rng, int rows, int cols, double scale = 1.0) {
  RowMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = scale * rng->Gaussian();
  return m;
}

Eigen::MatrixXd RandomOrthogonal(Rng* rng, int d) {
  Eigen::MatrixXd a = Gaussian(rng, d, d);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
}

EmbeddingMatrix Labeled(const RowMatrix& rows, const std::string& prefix) {
  EmbeddingMatrix m;
  m.rows = rows;
  for (int i = 0; i < rows.rows(); ++i) m.labels.push_back(prefix + std::to_string(i));
  return m;
}

SeedDictionary Identity(std::size_t n) {
  SeedDictionary d;
  for (std::size_t i = 0; i < n; ++i) d.pairs.emplace_back(i, i);
  return d;
}

double Precision(const SeedDictionary& d, std::size_t n) {
  std::size_t hits = 0;
  for (const auto& [s, t] : d.pairs) hits += s == t;
  return static_cast<double>(hits) / static_cast<double>(n);
}

double CosineAt(const RowMatrix& a, int i, const RowMatrix& b, int j) {
  return a.row(i).dot(b.row(j)) / (a.row(i).norm() * b.row(j).norm());
}

}  // namespace

TEST_SUITE("xmap") {
  TEST_CASE("normalization hand example") {
    EmbeddingMatrix m;
    m.labels = {"a", "b"};
    m.rows.resize(2, 2);
    m.rows << 2, 0, 0, 3;
    const auto n = NormalizeEmbeddings(m);
    const double h = std::sqrt(2.0) / 2.0;
    CHECK(n.rows(0, 0) == doctest::Approx(h));
    CHECK(n.rows(0, 1) == doctest::Approx(-h));
    CHECK(n.rows(1, 0) == doctest::Approx(-h));
    CHECK(n.rows(1, 1) == doctest::Approx(h));
    CHECK(n.norm_state == phrasevec::NormState::kCenteredUnit);
  }

  TEST_CASE("normalization: unit rows and a fixpoint") {
    Rng rng(2);
    const auto m = Labeled(Gaussian(&rng, 40, 6, 3.0), "w");
    const auto once = NormalizeEmbeddings(m);
    for (int i = 0; i < 40; ++i) CHECK(std::fabs(once.rows.row(i).norm() - 1.0) < 1e-9);
    const auto twice = NormalizeEmbeddings(once);
    CHECK((twice.rows - once.rows).cwiseAbs().maxCoeff() < 1e-9);
  }

  TEST_CASE("normalization rejects a zero row by name") {
    EmbeddingMatrix m;
    m.labels = {"ok", "dead"};
    m.rows.resize(2, 2);
    m.rows << 1, 2, 0, 0;
    try {
      NormalizeEmbeddings(m);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(std::string(e.what()).find("dead") != std::string::npos);
    }
  }

  TEST_CASE("procrustes recovers identity and rotations") {
    Rng rng(7);
    const RowMatrix x = Gaussian(&rng, 60, 8);
    auto t = SolveProcrustes(x, x, Identity(60));
    CHECK((t.wx - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-9);
    CHECK((t.wz - Eigen::MatrixXd::Identity(8, 8)).norm() < 1e-12);

    const Eigen::MatrixXd r = RandomOrthogonal(&rng, 8);
    const RowMatrix z = x * r;
    t = SolveProcrustes(x, z, Identity(60));
    CHECK((t.wx - r).norm() < 1e-6);
    CHECK(OrthogonalityError(t.wx) < 1e-9);
  }

  TEST_CASE("procrustes with one pair in two dimensions") {
    RowMatrix x(1, 2), z(1, 2);
    x << 1, 0;
    const double a = 0.7;
    z << std::cos(a), std::sin(a);
    const auto t = SolveProcrustes(x, z, Identity(1));
    const RowMatrix mapped = x * t.wx;
    CHECK(CosineAt(mapped, 0, z, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(OrthogonalityError(t.wx) < 1e-12);
  }

  TEST_CASE("nn retrieval: identical spaces and brute force") {
    Rng rng(5);
    const RowMatrix x = Gaussian(&rng, 30, 8);
    auto d = InduceDictionary(x, x, Retrieval::kNearest);
    CHECK(Precision(d, 30) == 1.0);

    const RowMatrix z = Gaussian(&rng, 25, 8);
    d = InduceDictionary(x, z, Retrieval::kNearest, 10, 2);
    REQUIRE(d.pairs.size() == 30);
    for (const auto& [s, t] : d.pairs) {
      std::size_t best = 0;
      double best_cos = -2;
      for (int j = 0; j < 25; ++j) {
        const double c = CosineAt(x, int(s), z, j);
        if (c > best_cos) best_cos = c, best = std::size_t(j);
      }
      CHECK(t == best);
    }
  }

  TEST_CASE("csls equals a brute-force oracle") {
    Rng rng(6);
    for (int k : {3, 10, 30}) {
      const RowMatrix x = Gaussian(&rng, 30, 8), z = Gaussian(&rng, 30, 8);
      Eigen::MatrixXd cos(30, 30);
      for (int i = 0; i < 30; ++i)
        for (int j = 0; j < 30; ++j) cos(i, j) = CosineAt(x, i, z, j);
      auto topk_mean = [&](const Eigen::VectorXd& v) {
        std::vector<double> s(v.data(), v.data() + v.size());
        std::sort(s.rbegin(), s.rend());
        double sum = 0;
        for (int i = 0; i < k; ++i) sum += s[i];
        return sum / k;
      };
      Eigen::VectorXd rt(30), rs(30);
      for (int i = 0; i < 30; ++i) rt(i) = topk_mean(cos.row(i).transpose());
      for (int j = 0; j < 30; ++j) rs(j) = topk_mean(cos.col(j));
      const auto d = InduceDictionary(x, z, Retrieval::kCsls, k);
      for (const auto& [s, t] : d.pairs) {
        int best = 0;
        double best_score = -std::numeric_limits<double>::infinity();
        for (int j = 0; j < 30; ++j) {
          const double c = 2 * cos(int(s), j) - rt(int(s)) - rs(j);
          if (c > best_score + 1e-12) best_score = c, best = j;
        }
        CHECK(int(t) == best);
      }
    }
  }

  TEST_CASE("retrieval allows many-to-one") {
    RowMatrix x(2, 2), z(2, 2);
    x << 1, 0.1, 1, -0.1;
    z << 1, 0, -1, 0;
    const auto d = InduceDictionary(x, z, Retrieval::kNearest);
    REQUIRE(d.pairs.size() == 2);
    CHECK(d.pairs[0].second == 0);
    CHECK(d.pairs[1].second == 0);
  }

  TEST_CASE("self-learning recovers a rotation") {
    Rng rng(21);
    const int n = 1000, dim = 32;
    const RowMatrix x = phrasevec::UnitRows(Gaussian(&rng, n, dim));
    const Eigen::MatrixXd r = RandomOrthogonal(&rng, dim);
    const RowMatrix z = x * r;
    SeedDictionary seed;
    for (int i = 0; i < 25; ++i) seed.pairs.emplace_back(std::size_t(i * 37 % n), std::size_t(i * 37 % n));
    auto sol = SelfLearningMap(x, z, seed);
    CHECK(Precision(sol.final_dictionary, n) >= 0.99);
    CHECK(OrthogonalityError(sol.wx) < 1e-6);
    CHECK(OrthogonalityError(sol.wz) < 1e-6);
    for (std::size_t i = 1; i + 1 < sol.objective_trace.size(); ++i) {
      CHECK(sol.objective_trace[i] >= sol.objective_trace[i - 1] - 1e-6);
    }

    const RowMatrix noisy = z + Gaussian(&rng, n, dim, 0.01);
    sol = SelfLearningMap(x, noisy, seed);
    CHECK(Precision(sol.final_dictionary, n) >= 0.80);

    // A further rotation of the target space leaves the dictionary as it is.
    const Eigen::MatrixXd q = RandomOrthogonal(&rng, dim);
    const auto base = SelfLearningMap(x, z, seed);
    const auto rotated = SelfLearningMap(x, RowMatrix(z * q), seed);
    CHECK(rotated.final_dictionary.pairs == base.final_dictionary.pairs);
    CHECK((rotated.wx - base.wx * q).norm() < 1e-6);
  }

  TEST_CASE("zero iterations return the seed solution") {
    Rng rng(4);
    const RowMatrix x = Gaussian(&rng, 50, 6), z = Gaussian(&rng, 50, 6);
    SeedDictionary seed = Identity(10);
    MappingOptions o;
    o.max_iters = 0;
    const auto sol = SelfLearningMap(x, z, seed, o);
    const auto t = SolveProcrustes(x, z, seed);
    CHECK((sol.wx - t.wx).norm() < 1e-12);
    CHECK(sol.final_dictionary.pairs == seed.pairs);
  }

  TEST_CASE("seed dictionaries") {
    EmbeddingMatrix s, t;
    s.labels = {"the", "1989", "Praha", "dog", ","};
    t.labels = {"Praha", "pes", ",", "1989", "ten"};
    s.rows = RowMatrix::Ones(5, 2);
    t.rows = RowMatrix::Ones(5, 2);
    auto d = IdenticalSeed(s, t);
    CHECK(d.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}, {2, 0}, {4, 2}});
    d = NumeralSeed(s, t);
    CHECK(d.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 3}});
    d = FrequencySeed(s, t, 2);
    CHECK(d.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});

    testing::TempDir dir;
    SaveDictionary(IdenticalSeed(s, t), s, t, dir / "d.tsv");
    CHECK(LoadDictionary(dir / "d.tsv", s, t).pairs == IdenticalSeed(s, t).pairs);

    SeedDictionary bad;
    bad.pairs = {{0, 1}, {0, 2}};
    CHECK_THROWS_AS(ValidateDictionary(bad, 5, 5), Error);
    bad.pairs = {{0, 9}};
    CHECK_THROWS_AS(ValidateDictionary(bad, 5, 5), Error);
  }
}
