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

// Synthetic word-substitution cipher language pair.
//
// Language A uses plain ASCII words, language B a disjoint vocabulary with
// Czech letters. Names, numbers and punctuation are shared verbatim. Both
// sides are drawn from the same sparse word chain, so their monolingual
// statistics match while their sentences do not.

#ifndef UMTX_CIPHER_HPP_
#define UMTX_CIPHER_HPP_

#include <map>
#include <string>
#include <vector>

#include "umtx/aligner.hpp"
#include "umtx/common.hpp"

namespace umtx::cipher {

struct CipherOptions {
  std::uint64_t seed = 7;
  std::size_t vocab_size = 400;
  std::size_t successors = 6;  // out-degree of the word chain
  // Shared tokens are ordinary nodes of the chain, so their contexts are as
  // informative as those of enciphered words.
  std::size_t names = 40;
  std::size_t numbers = 20;
  double comma_rate = 0.04;
  std::size_t min_len = 4;
  std::size_t max_len = 14;
  double reorder_rate = 0.0;  // chance of swapping an adjacent B word pair

  void Validate() const;
};

class CipherPair {
 public:
  explicit CipherPair(const CipherOptions& options);

  // One raw sentence of language A (first word capitalized, final mark).
  Tokens SampleA(Rng* rng) const;
  // Enciphers A; perm[j] is the A position that produced B token j.
  Tokens Encipher(const Tokens& a, Rng* rng, std::vector<int>* perm = nullptr) const;
  // Inverse key on lowercased words; unknown words map to themselves.
  Tokens Decipher(const Tokens& b) const;

  const std::map<std::string, std::string>& key() const { return key_; }
  const std::vector<std::string>& names() const { return names_; }
  const CipherOptions& options() const { return options_; }

 private:
  CipherOptions options_;
  std::vector<std::string> words_a_, names_;
  std::vector<std::string> nodes_;  // chain nodes in Zipf rank order
  std::map<std::string, std::string> key_, inverse_;
  std::vector<std::vector<std::size_t>> next_;  // successor lists
  std::vector<double> start_cdf_, next_cdf_;
};

// Raw-text corpora written by the pipeline's generate stage.
struct CipherCorpus {
  std::vector<std::string> mono_a, mono_b;
  std::vector<std::string> dev_a, dev_b;
  std::vector<std::string> test_a, test_b;
};

// Independent A samples for each split; B monolingual text enciphers a
// separate A stream, so the two monolingual sides share no sentences.
CipherCorpus GenerateCorpus(const CipherPair& pair, std::size_t mono_size, std::size_t dev_size,
                            std::size_t test_size, std::uint64_t seed);

// Parallel (A, B) text with the gold alignment of every pair.
struct GoldBitext {
  align::Bitext bitext;
  std::vector<align::Alignment> gold;
};
GoldBitext GenerateGoldBitext(const CipherPair& pair, std::size_t size, std::uint64_t seed);

}  // namespace umtx::cipher

#endif  // UMTX_CIPHER_HPP_
