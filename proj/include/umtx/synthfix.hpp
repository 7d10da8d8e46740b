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

// Synthetic-corpus repair: untranslated-word stripping, window reordering,
// named-entity pre/post-treatment, quotation marks.

#ifndef UMTX_SYNTHFIX_HPP_
#define UMTX_SYNTHFIX_HPP_

#include <array>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "umtx/aligner.hpp"
#include "umtx/common.hpp"

namespace umtx::synthfix {

// ---------------------------------------------------------------------------
// Untranslated words

struct DiacriticProfile {
  std::set<char32_t> chars;

  // á č ď é ě í ň ó ř š ť ú ů ý ž and their uppercase forms.
  static DiacriticProfile Czech();
  static DiacriticProfile FromString(std::string_view letters);
  bool Matches(std::string_view token) const;
};

// Replaces every target-side token containing a profile character.
align::Bitext StripUntranslated(const align::Bitext& bitext, const DiacriticProfile& profile,
                                const std::string& unk = "unk", std::size_t* replaced = nullptr);

// Pairs two line-aligned corpora; throws when their lengths differ.
align::Bitext ZipBitext(const std::vector<Tokens>& src, const std::vector<Tokens>& tgt);

// ---------------------------------------------------------------------------
// Reordering

struct AugmentedSentence {
  Tokens tokens;
  std::size_t source_index = 0;
  bool shuffled = false;
};

// Shuffles each consecutive window of `window` tokens independently.
Tokens WindowShuffle(const Tokens& s, int window, Rng* rng);

// 2N sentences: pass one shuffles odd indices and copies even ones, pass two
// the other way round.
std::vector<AugmentedSentence> ReorderAugment(const std::vector<Tokens>& corpus, int window, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Named entities

enum class NeType { kAddressNumber, kGeographical, kInstitution, kMedia, kNumber, kArtifact, kPersonal, kTime };
constexpr int kNumNeTypes = 8;

const char* NeTypeName(NeType t);
NeType ParseNeType(std::string_view name);

struct NESpan {
  std::size_t sentence = 0;
  int start = 0, end = 0;  // [start, end)
  NeType type = NeType::kPersonal;
  std::string surface;
};

enum class PreAction { kCopy, kRemove, kIgnore };
enum class PostAction { kCopy, kIgnore };

struct NEPolicy {
  std::array<PreAction, kNumNeTypes> pre{};
  std::array<PostAction, kNumNeTypes> post{};

  // Removal for geographical names, copying otherwise; post-copy for
  // addresses, geographical names, numbers and personal names.
  static NEPolicy Default();
  static NEPolicy AllIgnore();

  // "type\tpre_action\tpost_action" rows; all eight types required.
  std::string ToText() const;
  static NEPolicy FromText(const std::string& text);
};

// Case-folded, diacritic-stripped code-point edit distance.
int NormalizedLevenshtein(std::string_view a, std::string_view b);

// One applied replacement: tokens [begin, end) of a sentence became
// `replacement`.
struct ReplacementRecord {
  std::size_t sentence = 0;
  int begin = 0, end = 0;
  std::string action;
  Tokens original;
  Tokens replacement;
};

// Applies records in order to the corpus.
std::vector<Tokens> ReplayLog(const std::vector<Tokens>& corpus, const std::vector<ReplacementRecord>& log);

struct NeStats {
  std::size_t trusted = 0;
  std::size_t copied = 0;
  std::size_t removed = 0;
  std::size_t ignored = 0;
  std::size_t unaligned = 0;
  std::size_t overlapping = 0;
};

struct PretreatOptions {
  int lev_threshold = 3;  // negative: unlimited (everything trusted)
  std::string unk = "unk";
  bool full_deletion = false;  // "remove" drops the hull instead of writing unk
};

struct PretreatResult {
  align::Bitext bitext;
  std::vector<ReplacementRecord> log;  // target-side replacements
  NeStats stats;
};

// Spans annotate the source side; alignments link (src, tgt). Replacement
// hulls that overlap each other are skipped and counted.
PretreatResult NePretreat(const align::Bitext& bitext, const std::vector<NESpan>& spans,
                          const std::vector<align::Alignment>& alignments, const NEPolicy& policy,
                          const PretreatOptions& options = {});

struct PosttreatResult {
  Tokens tokens;
  std::vector<ReplacementRecord> log;
  NeStats stats;
  // Pairs of span indices whose source hulls overlap (copied text repeats).
  std::vector<std::pair<std::size_t, std::size_t>> overlap_flags;
};

// Spans annotate the hypothesis; alignment links (src, hyp).
PosttreatResult NePosttreat(const Tokens& src, const Tokens& hyp, const align::Alignment& alignment,
                            const std::vector<NESpan>& spans, const NEPolicy& policy);

using Gazetteer = std::map<std::string, NeType>;  // space-joined phrase -> type

// "phrase\ttype" lines.
Gazetteer LoadGazetteer(const std::string& path);

// Gazetteer phrases (longest first), digit tokens as numbers, and runs of
// capitalized non-initial tokens as personal names.
std::vector<NESpan> TagNesDefault(const Tokens& s, const Gazetteer* gazetteer = nullptr, std::size_t sentence = 0);

std::string FormatSpans(const std::vector<NESpan>& spans);
std::vector<NESpan> ParseSpans(const std::string& text);

// Straight double quotes become alternating U+201E / U+201C.
Tokens NormalizeQuotes(const Tokens& s, std::size_t* odd_warnings = nullptr);

// Stable partition of sentence indices by whether any span touches them.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> SplitByNePresence(std::size_t num_sentences,
                                                                                const std::vector<NESpan>& spans);

}  // namespace umtx::synthfix

#endif  // UMTX_SYNTHFIX_HPP_
