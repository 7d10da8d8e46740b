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

#include "umtx/synthfix.hpp"

#include <algorithm>
#include <sstream>

namespace umtx::synthfix {

DiacriticProfile DiacriticProfile::Czech() {
  return FromString("áčďéěíňóřšťúůýžÁČĎÉĚÍŇÓŘŠŤÚŮÝŽ");
}

DiacriticProfile DiacriticProfile::FromString(std::string_view letters) {
  DiacriticProfile p;
  for (char32_t c : DecodeUtf8(letters)) {
    if (!IsUnicodeSpace(c)) p.chars.insert(c);
  }
  if (p.chars.empty()) Fail(ErrorKind::kInvalidArgument, "diacritic profile is empty");
  return p;
}

bool DiacriticProfile::Matches(std::string_view token) const {
  for (char32_t c : DecodeUtf8(token)) {
    if (chars.count(c)) return true;
  }
  return false;
}

align::Bitext StripUntranslated(const align::Bitext& bitext, const DiacriticProfile& profile, const std::string& unk,
                                std::size_t* replaced) {
  align::Bitext out = bitext;
  std::size_t n = 0;
  for (auto& p : out) {
    for (auto& t : p.tgt) {
      if (t != unk && profile.Matches(t)) {
        t = unk;
        ++n;
      }
    }
  }
  if (replaced) *replaced = n;
  return out;
}

align::Bitext ZipBitext(const std::vector<Tokens>& src, const std::vector<Tokens>& tgt) {
  if (src.size() != tgt.size()) {
    Fail(ErrorKind::kInvalidArgument, "bitext sides differ in length: " + std::to_string(src.size()) + " vs " +
                                          std::to_string(tgt.size()));
  }
  align::Bitext b(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) b[i] = {src[i], tgt[i]};
  return b;
}

// ---------------------------------------------------------------------------

Tokens WindowShuffle(const Tokens& s, int window, Rng* rng) {
  Tokens out = s;
  if (window <= 1) return out;
  for (std::size_t b = 0; b < out.size(); b += static_cast<std::size_t>(window)) {
    const std::size_t e = std::min(out.size(), b + static_cast<std::size_t>(window));
    std::vector<std::string> chunk(out.begin() + static_cast<std::ptrdiff_t>(b), out.begin() + static_cast<std::ptrdiff_t>(e));
    rng->Shuffle(&chunk);
    std::copy(chunk.begin(), chunk.end(), out.begin() + static_cast<std::ptrdiff_t>(b));
  }
  return out;
}

std::vector<AugmentedSentence> ReorderAugment(const std::vector<Tokens>& corpus, int window, std::uint64_t seed) {
  if (window < 1) Fail(ErrorKind::kInvalidArgument, "reorder: window must be >= 1");
  Rng rng(seed);
  std::vector<AugmentedSentence> out;
  out.reserve(corpus.size() * 2);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < corpus.size(); ++i) {
      AugmentedSentence a;
      a.source_index = i;
      a.shuffled = (i % 2 == 1) == (pass == 0);
      a.tokens = a.shuffled ? WindowShuffle(corpus[i], window, &rng) : corpus[i];
      out.push_back(std::move(a));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {
constexpr std::array<const char*, kNumNeTypes> kTypeNames = {
    "address-number", "geographical", "institution", "media", "number", "artifact", "personal", "time"};
}

const char* NeTypeName(NeType t) { return kTypeNames[static_cast<int>(t)]; }

NeType ParseNeType(std::string_view name) {
  for (int i = 0; i < kNumNeTypes; ++i) {
    if (name == kTypeNames[i]) return static_cast<NeType>(i);
  }
  Fail(ErrorKind::kFormat, "unknown NE type '" + std::string(name) + "'");
}

NEPolicy NEPolicy::Default() {
  NEPolicy p;
  p.pre.fill(PreAction::kCopy);
  p.post.fill(PostAction::kIgnore);
  p.pre[static_cast<int>(NeType::kGeographical)] = PreAction::kRemove;
  for (NeType t : {NeType::kAddressNumber, NeType::kGeographical, NeType::kNumber, NeType::kPersonal}) {
    p.post[static_cast<int>(t)] = PostAction::kCopy;
  }
  return p;
}

NEPolicy NEPolicy::AllIgnore() {
  NEPolicy p;
  p.pre.fill(PreAction::kIgnore);
  p.post.fill(PostAction::kIgnore);
  return p;
}

std::string NEPolicy::ToText() const {
  static const char* pre_names[] = {"copy", "remove", "ignore"};
  static const char* post_names[] = {"copy", "ignore"};
  std::string out = "#umtx-nepolicy\tv1\n";
  for (int i = 0; i < kNumNeTypes; ++i) {
    out += std::string(kTypeNames[i]) + "\t" + pre_names[static_cast<int>(pre[i])] + "\t" +
           post_names[static_cast<int>(post[i])] + "\n";
  }
  return out;
}

NEPolicy NEPolicy::FromText(const std::string& text) {
  NEPolicy p = Default();
  std::array<bool, kNumNeTypes> seen{};
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line[0] == '#') continue;
    auto f = SplitWhitespace(line);
    auto fail = [&](const std::string& m) { Fail(ErrorKind::kFormat, "policy line " + std::to_string(line_no) + ": " + m); };
    if (f.size() != 3) fail("expected type, pre_action, post_action");
    const int t = static_cast<int>(ParseNeType(f[0]));
    if (seen[t]) fail("duplicate type");
    seen[t] = true;
    if (f[1] == "copy" || f[1] == "copied") {
      p.pre[t] = PreAction::kCopy;
    } else if (f[1] == "remove" || f[1] == "removed") {
      p.pre[t] = PreAction::kRemove;
    } else if (f[1] == "ignore" || f[1] == "ignored") {
      p.pre[t] = PreAction::kIgnore;
    } else {
      fail("bad pre_action '" + f[1] + "'");
    }
    if (f[2] == "copy" || f[2] == "copied") {
      p.post[t] = PostAction::kCopy;
    } else if (f[2] == "ignore" || f[2] == "ignored") {
      p.post[t] = PostAction::kIgnore;
    } else {
      fail("bad post_action '" + f[2] + "'");
    }
  }
  for (int i = 0; i < kNumNeTypes; ++i) {
    if (!seen[i]) Fail(ErrorKind::kFormat, std::string("policy misses type '") + kTypeNames[i] + "'");
  }
  return p;
}

int NormalizedLevenshtein(std::string_view a, std::string_view b) {
  auto norm = [](std::string_view s) {
    std::vector<char32_t> v = DecodeUtf8(s);
    for (auto& c : v) c = StripDiacriticCp(ToLowerCp(c));
    return v;
  };
  const auto x = norm(a), y = norm(b);
  std::vector<int> prev(y.size() + 1), cur(y.size() + 1);
  for (std::size_t j = 0; j <= y.size(); ++j) prev[j] = static_cast<int>(j);
  for (std::size_t i = 1; i <= x.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (std::size_t j = 1; j <= y.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x[i - 1] == y[j - 1] ? 0 : 1)});
    }
    std::swap(prev, cur);
  }
  return prev[y.size()];
}

std::vector<Tokens> ReplayLog(const std::vector<Tokens>& corpus, const std::vector<ReplacementRecord>& log) {
  std::vector<Tokens> out = corpus;
  for (const auto& r : log) {
    if (r.sentence >= out.size()) Fail(ErrorKind::kInvalidArgument, "replay: sentence index out of range");
    auto& s = out[r.sentence];
    if (r.begin < 0 || r.end > static_cast<int>(s.size()) || r.begin > r.end) {
      Fail(ErrorKind::kInvalidArgument, "replay: span out of range");
    }
    s.erase(s.begin() + r.begin, s.begin() + r.end);
    s.insert(s.begin() + r.begin, r.replacement.begin(), r.replacement.end());
  }
  return out;
}

namespace {

std::string JoinSpan(const Tokens& t, int b, int e) {
  return Join(std::vector<std::string>(t.begin() + b, t.begin() + e), " ");
}

struct Planned {
  int begin, end;
  std::string action;
  Tokens replacement;
};

// Applies non-overlapping replacements right to left, logging each.
void ApplyPlanned(std::size_t sentence, std::vector<Planned> plan, Tokens* s, std::vector<ReplacementRecord>* log) {
  std::sort(plan.begin(), plan.end(), [](const Planned& a, const Planned& b) { return a.begin > b.begin; });
  for (const auto& p : plan) {
    ReplacementRecord r;
    r.sentence = sentence;
    r.begin = p.begin;
    r.end = p.end;
    r.action = p.action;
    r.original.assign(s->begin() + p.begin, s->begin() + p.end);
    r.replacement = p.replacement;
    s->erase(s->begin() + p.begin, s->begin() + p.end);
    s->insert(s->begin() + p.begin, p.replacement.begin(), p.replacement.end());
    log->push_back(std::move(r));
  }
}

void CheckSpan(const NESpan& sp, std::size_t len) {
  if (sp.start < 0 || sp.end <= sp.start || sp.end > static_cast<int>(len)) {
    Fail(ErrorKind::kInvalidArgument, "NE span [" + std::to_string(sp.start) + "," + std::to_string(sp.end) +
                                          ") out of bounds in sentence " + std::to_string(sp.sentence));
  }
}

}  // namespace

PretreatResult NePretreat(const align::Bitext& bitext, const std::vector<NESpan>& spans,
                          const std::vector<align::Alignment>& alignments, const NEPolicy& policy,
                          const PretreatOptions& options) {
  if (alignments.size() != bitext.size()) Fail(ErrorKind::kInvalidArgument, "pretreat: alignments do not cover the bitext");
  PretreatResult res;
  res.bitext = bitext;
  std::map<std::size_t, std::vector<const NESpan*>> by_sentence;
  for (const auto& sp : spans) {
    if (sp.sentence >= bitext.size()) Fail(ErrorKind::kInvalidArgument, "pretreat: span sentence out of range");
    CheckSpan(sp, bitext[sp.sentence].src.size());
    by_sentence[sp.sentence].push_back(&sp);
  }
  for (const auto& [k, list] : by_sentence) {
    const auto& pair = bitext[k];
    std::vector<Planned> plan;
    for (const NESpan* sp : list) {
      int lo = -1, hi = -1;
      for (const auto& [s, t] : alignments[k]) {
        if (s < sp->start || s >= sp->end) continue;
        if (t < 0 || t >= static_cast<int>(pair.tgt.size())) Fail(ErrorKind::kInvalidArgument, "pretreat: link out of range");
        lo = lo < 0 ? t : std::min(lo, t);
        hi = std::max(hi, t);
      }
      if (lo < 0) {
        res.stats.unaligned++;
        continue;
      }
      const std::string src_surface = JoinSpan(pair.src, sp->start, sp->end);
      const std::string hull = JoinSpan(pair.tgt, lo, hi + 1);
      if (options.lev_threshold < 0 || NormalizedLevenshtein(src_surface, hull) <= options.lev_threshold) {
        res.stats.trusted++;
        continue;
      }
      switch (policy.pre[static_cast<int>(sp->type)]) {
        case PreAction::kIgnore:
          res.stats.ignored++;
          break;
        case PreAction::kCopy:
          plan.push_back({lo, hi + 1, "copy", Tokens(pair.src.begin() + sp->start, pair.src.begin() + sp->end)});
          break;
        case PreAction::kRemove:
          plan.push_back({lo, hi + 1, "remove", options.full_deletion ? Tokens{} : Tokens{options.unk}});
          break;
      }
    }
    std::vector<char> bad(plan.size(), 0);
    for (std::size_t a = 0; a < plan.size(); ++a) {
      for (std::size_t b = a + 1; b < plan.size(); ++b) {
        if (plan[a].begin < plan[b].end && plan[b].begin < plan[a].end) bad[a] = bad[b] = 1;
      }
    }
    std::vector<Planned> keep;
    for (std::size_t a = 0; a < plan.size(); ++a) {
      if (bad[a]) {
        res.stats.overlapping++;
        continue;
      }
      (plan[a].action == "copy" ? res.stats.copied : res.stats.removed)++;
      keep.push_back(plan[a]);
    }
    ApplyPlanned(k, std::move(keep), &res.bitext[k].tgt, &res.log);
  }
  return res;
}

PosttreatResult NePosttreat(const Tokens& src, const Tokens& hyp, const align::Alignment& alignment,
                            const std::vector<NESpan>& spans, const NEPolicy& policy) {
  PosttreatResult res;
  res.tokens = hyp;
  std::vector<Planned> plan;
  std::vector<std::pair<int, int>> hulls;  // per planned entry
  std::vector<std::size_t> span_of;
  for (std::size_t si = 0; si < spans.size(); ++si) {
    const NESpan& sp = spans[si];
    CheckSpan(sp, hyp.size());
    if (policy.post[static_cast<int>(sp.type)] != PostAction::kCopy) {
      res.stats.ignored++;
      continue;
    }
    int lo = -1, hi = -1;
    for (const auto& [s, t] : alignment) {
      if (t < sp.start || t >= sp.end) continue;
      if (s < 0 || s >= static_cast<int>(src.size())) Fail(ErrorKind::kInvalidArgument, "posttreat: link out of range");
      lo = lo < 0 ? s : std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (lo < 0) {
      res.stats.unaligned++;
      continue;
    }
    plan.push_back({sp.start, sp.end, "copy", Tokens(src.begin() + lo, src.begin() + hi + 1)});
    hulls.emplace_back(lo, hi + 1);
    span_of.push_back(si);
  }
  for (std::size_t a = 0; a < plan.size(); ++a) {
    for (std::size_t b = a + 1; b < plan.size(); ++b) {
      if (plan[a].begin < plan[b].end && plan[b].begin < plan[a].end) {
        Fail(ErrorKind::kInvalidArgument, "posttreat: hypothesis spans overlap");
      }
      if (hulls[a].first < hulls[b].second && hulls[b].first < hulls[a].second) {
        res.overlap_flags.emplace_back(span_of[a], span_of[b]);
        res.stats.overlapping++;
      }
    }
  }
  res.stats.copied = plan.size();
  ApplyPlanned(0, std::move(plan), &res.tokens, &res.log);
  return res;
}

Gazetteer LoadGazetteer(const std::string& path) {
  Gazetteer g;
  auto lines = ReadLines(path);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (Trim(lines[i]).empty() || lines[i][0] == '#') continue;
    auto f = Split(lines[i], "\t");
    if (f.size() != 2) Fail(ErrorKind::kFormat, path + ":" + std::to_string(i + 1) + ": expected phrase<TAB>type");
    g[Join(SplitWhitespace(f[0]), " ")] = ParseNeType(Trim(f[1]));
  }
  return g;
}

namespace {

bool IsNumberToken(const std::string& t) {
  bool digit = false;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const char c = t[i];
    if (c >= '0' && c <= '9') {
      digit = true;
    } else if ((c == '.' || c == ',' || c == ':' || c == '/' || c == '-') && digit && i + 1 < t.size() &&
               t[i + 1] >= '0' && t[i + 1] <= '9') {
      continue;
    } else {
      return false;
    }
  }
  return digit;
}

}  // namespace

std::vector<NESpan> TagNesDefault(const Tokens& s, const Gazetteer* gazetteer, std::size_t sentence) {
  std::vector<NESpan> out;
  const int n = static_cast<int>(s.size());
  std::vector<char> claimed(static_cast<std::size_t>(n), 0);
  std::size_t longest = 0;
  if (gazetteer) {
    for (const auto& [phrase, type] : *gazetteer) longest = std::max(longest, SplitWhitespace(phrase).size());
  }
  auto add = [&](int b, int e, NeType t) {
    for (int i = b; i < e; ++i) claimed[i] = 1;
    out.push_back({sentence, b, e, t, JoinSpan(s, b, e)});
  };
  int i = 0;
  while (i < n) {
    bool hit = false;
    for (int len = std::min<int>(static_cast<int>(longest), n - i); len >= 1 && gazetteer; --len) {
      auto it = gazetteer->find(JoinSpan(s, i, i + len));
      if (it != gazetteer->end()) {
        add(i, i + len, it->second);
        i += len;
        hit = true;
        break;
      }
    }
    if (hit) continue;
    if (IsNumberToken(s[i])) {
      add(i, i + 1, NeType::kNumber);
    } else if (i > 0 && StartsWithUpper(s[i])) {
      int j = i;
      while (j < n && StartsWithUpper(s[j]) && !claimed[j] &&
             !(gazetteer && gazetteer->count(s[j]))) {
        ++j;
      }
      if (j > i) {
        add(i, j, NeType::kPersonal);
        i = j;
        continue;
      }
    }
    ++i;
  }
  std::sort(out.begin(), out.end(), [](const NESpan& a, const NESpan& b) { return a.start < b.start; });
  return out;
}

std::string FormatSpans(const std::vector<NESpan>& spans) {
  std::string out;
  for (const auto& sp : spans) {
    out += std::to_string(sp.sentence) + "\t" + std::to_string(sp.start) + "\t" + std::to_string(sp.end) + "\t" +
           NeTypeName(sp.type) + "\t" + sp.surface + "\n";
  }
  return out;
}

std::vector<NESpan> ParseSpans(const std::string& text) {
  std::vector<NESpan> spans;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line[0] == '#') continue;
    auto f = Split(line, "\t");
    long long a, b, c;
    if (f.size() != 5 || !ParseInt(f[0], &a) || !ParseInt(f[1], &b) || !ParseInt(f[2], &c) || a < 0 || b < 0 ||
        c <= b) {
      Fail(ErrorKind::kFormat, "NE span line " + std::to_string(line_no) + ": expected index, start, end, type, surface");
    }
    spans.push_back({static_cast<std::size_t>(a), static_cast<int>(b), static_cast<int>(c), ParseNeType(f[3]), f[4]});
  }
  return spans;
}

Tokens NormalizeQuotes(const Tokens& s, std::size_t* odd_warnings) {
  static const std::string kOpen = "\xE2\x80\x9E";   // U+201E
  static const std::string kClose = "\xE2\x80\x9C";  // U+201C
  std::size_t total = 0;
  for (const auto& t : s) total += static_cast<std::size_t>(std::count(t.begin(), t.end(), '"'));
  Tokens out;
  out.reserve(s.size());
  std::size_t seen = 0;
  for (const auto& t : s) {
    std::string r;
    for (char c : t) {
      if (c != '"') {
        r.push_back(c);
        continue;
      }
      const bool last_unpaired = total % 2 == 1 && seen + 1 == total;
      r += (seen % 2 == 0 && !last_unpaired) ? kOpen : kClose;
      ++seen;
    }
    out.push_back(std::move(r));
  }
  if (total % 2 == 1) {
    LogWarning("odd number of quotation marks in sentence");
    if (odd_warnings) ++*odd_warnings;
  }
  return out;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> SplitByNePresence(std::size_t num_sentences,
                                                                                const std::vector<NESpan>& spans) {
  std::vector<char> has(num_sentences, 0);
  for (const auto& sp : spans) {
    if (sp.sentence < num_sentences) has[sp.sentence] = 1;
  }
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> out;
  for (std::size_t i = 0; i < num_sentences; ++i) (has[i] ? out.first : out.second).push_back(i);
  return out;
}

}  // namespace umtx::synthfix
