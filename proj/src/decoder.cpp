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

#include "umtx/decoder.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace umtx::decoder {

namespace {
constexpr double kLn10 = 2.302585092994045684;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

const std::array<const char*, kNumFeatures>& FeatureNames() {
  static const std::array<const char*, kNumFeatures> names = {"fwd", "bwd", "lm", "word_penalty", "phrase_penalty",
                                                              "distortion"};
  return names;
}

double FeatureWeights::Score(const FeatureVector& f) const {
  double s = 0.0;
  for (int k = 0; k < kNumFeatures; ++k) s += w[k] * f[k];
  return s;
}

std::string FeatureWeights::ToText() const {
  std::string out;
  for (int k = 0; k < kNumFeatures; ++k) out += std::string(FeatureNames()[k]) + "=" + FormatDouble(w[k]) + "\n";
  return out;
}

FeatureWeights FeatureWeights::FromText(const std::string& text) {
  FeatureWeights fw;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto l = Trim(line);
    if (l.empty() || l.front() == '#') continue;
    auto eq = l.find('=');
    if (eq == std::string_view::npos) Fail(ErrorKind::kFormat, "weights line " + std::to_string(line_no) + ": expected key=value");
    const std::string key(Trim(l.substr(0, eq)));
    double v;
    if (!ParseDouble(Trim(l.substr(eq + 1)), &v) || !std::isfinite(v)) {
      Fail(ErrorKind::kFormat, "weights line " + std::to_string(line_no) + ": bad value");
    }
    int idx = -1;
    for (int k = 0; k < kNumFeatures; ++k) {
      if (key == FeatureNames()[k]) idx = k;
    }
    if (idx < 0) Fail(ErrorKind::kFormat, "weights line " + std::to_string(line_no) + ": unknown feature '" + key + "'");
    fw.w[idx] = v;
  }
  return fw;
}

void FeatureWeights::Save(const std::string& path) const { WriteFile(path, ToText()); }
FeatureWeights FeatureWeights::Load(const std::string& path) { return FromText(ReadFile(path)); }

// ---------------------------------------------------------------------------

Decoder::Decoder(const ptable::PhraseTable& table, const lm::ArpaLM& lm, const ModelOptions& options)
    : lm_(lm), options_(options) {
  if (options.table_limit < 1) Fail(ErrorKind::kInvalidArgument, "decoder: table_limit must be >= 1");
  if (!(options.unknown_prob > 0.0 && options.unknown_prob <= 1.0)) {
    Fail(ErrorKind::kInvalidArgument, "decoder: unknown_prob must be in (0, 1]");
  }
  const double floor_ln = std::log(options.unknown_prob);
  int longest = 1;
  for (const auto& [src, cands] : table.entries) {
    const int len = static_cast<int>(SplitWhitespace(src).size());
    if (len == 0) continue;
    longest = std::max(longest, len);
    auto& out = table_[src];
    for (const auto& c : cands) {
      if (static_cast<int>(out.size()) >= options.table_limit) break;
      Prepared p;
      p.tgt = SplitWhitespace(c.tgt);
      if (p.tgt.empty()) continue;
      for (const auto& t : p.tgt) p.ids.push_back(lm.vocab().Lookup(t));
      p.ln_fwd = c.fwd > 0.0 ? std::log(c.fwd) : floor_ln;
      p.ln_bwd = c.bwd > 0.0 ? std::log(c.bwd) : floor_ln;
      out.push_back(std::move(p));
    }
  }
  max_len_ = options.max_phrase_len > 0 ? std::min(options.max_phrase_len, longest) : longest;
}

std::vector<Decoder::Option> Decoder::Options(const Tokens& src) const {
  std::vector<Option> out;
  const int n = static_cast<int>(src.size());
  const double floor_ln = std::log(options_.unknown_prob);
  for (int i = 0; i < n; ++i) {
    bool has_single = false;
    std::string phrase;
    for (int len = 1; len <= max_len_ && i + len <= n; ++len) {
      if (len > 1) phrase.push_back(' ');
      phrase += src[i + len - 1];
      auto it = table_.find(phrase);
      if (it == table_.end() || it->second.empty()) continue;
      if (len == 1) has_single = true;
      for (const auto& p : it->second) {
        Option o;
        o.src_begin = i;
        o.src_end = i + len;
        o.tgt = p.tgt;
        o.ids = p.ids;
        o.ln_fwd = p.ln_fwd;
        o.ln_bwd = p.ln_bwd;
        out.push_back(std::move(o));
      }
    }
    if (!has_single) {
      Option o;
      o.src_begin = i;
      o.src_end = i + 1;
      o.tgt = {src[i]};
      o.ids = {lm_.vocab().Lookup(src[i])};
      o.ln_fwd = o.ln_bwd = floor_ln;
      o.unknown = true;
      out.push_back(std::move(o));
    }
  }
  return out;
}

namespace {

struct Arc {
  int pred;
  int option;
  FeatureVector delta;
  double delta_score;
};

struct Node {
  std::vector<std::uint64_t> cov;
  int covered = 0;
  std::vector<lm::WordId> ctx;  // last order-1 target ids
  int last_end = 0;
  double score = 0.0;
  double future = 0.0;
  std::vector<Arc> arcs;
};

struct Derivation {
  double score;
  int arc;
  int rank;
};

bool Covered(const std::vector<std::uint64_t>& cov, int i) { return (cov[i >> 6] >> (i & 63)) & 1u; }
void SetCovered(std::vector<std::uint64_t>* cov, int i) { (*cov)[i >> 6] |= std::uint64_t{1} << (i & 63); }

std::string StateKey(const Node& n) {
  std::string k;
  k.reserve(n.cov.size() * 8 + n.ctx.size() * 4 + 4);
  k.append(reinterpret_cast<const char*>(n.cov.data()), n.cov.size() * sizeof(std::uint64_t));
  k.append(reinterpret_cast<const char*>(n.ctx.data()), n.ctx.size() * sizeof(lm::WordId));
  k.append(reinterpret_cast<const char*>(&n.last_end), sizeof(int));
  return k;
}

}  // namespace

NBestList Decoder::Decode(const Tokens& src, const FeatureWeights& fw, const DecodeParams& params) const {
  if (params.beam_size < 1) Fail(ErrorKind::kInvalidArgument, "decode: beam_size must be >= 1");
  if (params.nbest_n < 1) Fail(ErrorKind::kInvalidArgument, "decode: nbest_n must be >= 1");
  NBestList result;
  const int n = static_cast<int>(src.size());
  if (n == 0) {
    result.push_back(Translation{});
    return result;
  }
  const auto& w = fw.w;
  const int dl = params.distortion_limit;
  const int hist = std::max(0, lm_.order() - 1);
  const std::vector<Option> options = Options(src);

  // Options by start position, and the isolated score of each.
  std::vector<std::vector<int>> by_start(static_cast<std::size_t>(n));
  std::vector<std::vector<double>> span_best(static_cast<std::size_t>(n), std::vector<double>(n + 1, kNegInf));
  for (int oi = 0; oi < static_cast<int>(options.size()); ++oi) {
    const auto& o = options[oi];
    by_start[o.src_begin].push_back(oi);
    double lm_est = 0.0;
    for (std::size_t k = 0; k < o.ids.size(); ++k) lm_est += lm_.LogProb(o.ids.data(), static_cast<int>(k), o.ids[k]);
    const double s = w[kFwd] * o.ln_fwd + w[kBwd] * o.ln_bwd + w[kLm] * lm_est * kLn10 -
                     w[kWordPenalty] * static_cast<double>(o.tgt.size()) - w[kPhrasePenalty];
    span_best[o.src_begin][o.src_end] = std::max(span_best[o.src_begin][o.src_end], s);
  }
  // Best split of every span.
  std::vector<std::vector<double>> fc = span_best;
  for (int len = 2; len <= n; ++len) {
    for (int i = 0; i + len <= n; ++i) {
      const int j = i + len;
      for (int k = i + 1; k < j; ++k) fc[i][j] = std::max(fc[i][j], fc[i][k] + fc[k][j]);
    }
  }
  auto future_of = [&](const std::vector<std::uint64_t>& cov) {
    double f = 0.0;
    int i = 0;
    while (i < n) {
      if (Covered(cov, i)) {
        ++i;
        continue;
      }
      int j = i;
      while (j < n && !Covered(cov, j)) ++j;
      f += fc[i][j];
      i = j;
    }
    return f;
  };

  std::vector<Node> nodes;
  std::vector<std::vector<int>> stacks(static_cast<std::size_t>(n + 1));
  std::vector<std::unordered_map<std::string, int>> index(static_cast<std::size_t>(n + 1));
  {
    Node root;
    root.cov.assign(static_cast<std::size_t>((n + 63) / 64), 0);
    root.ctx.assign(static_cast<std::size_t>(hist), lm_.vocab().bos());
    root.future = future_of(root.cov);
    nodes.push_back(std::move(root));
    stacks[0].push_back(0);
  }

  std::vector<lm::WordId> buf;
  for (int c = 0; c < n; ++c) {
    auto& stack = stacks[c];
    if (static_cast<int>(stack.size()) > params.beam_size) {
      std::stable_sort(stack.begin(), stack.end(), [&](int a, int b) {
        return nodes[a].score + nodes[a].future > nodes[b].score + nodes[b].future;
      });
      stack.resize(static_cast<std::size_t>(params.beam_size));
    }
    for (int hid : stack) {
      // Copied: expansions grow `nodes`.
      Node h;
      h.cov = nodes[hid].cov;
      h.covered = nodes[hid].covered;
      h.ctx = nodes[hid].ctx;
      h.last_end = nodes[hid].last_end;
      h.score = nodes[hid].score;
      int gap = 0;
      while (gap < n && Covered(h.cov, gap)) ++gap;
      for (int start = 0; start < n; ++start) {
        if (Covered(h.cov, start)) continue;
        if (dl >= 0 && std::abs(start - h.last_end) > dl) continue;
        for (int oi : by_start[start]) {
          const Option& o = options[oi];
          bool free = true;
          for (int p = o.src_begin; p < o.src_end; ++p) {
            if (Covered(h.cov, p)) {
              free = false;
              break;
            }
          }
          if (!free) continue;
          Node nh;
          nh.cov = h.cov;
          for (int p = o.src_begin; p < o.src_end; ++p) SetCovered(&nh.cov, p);
          nh.covered = h.covered + (o.src_end - o.src_begin);
          if (dl >= 0 && nh.covered < n) {
            int g2 = gap;
            while (g2 < n && Covered(nh.cov, g2)) ++g2;
            if (g2 < o.src_end && o.src_end - g2 > dl) continue;
          }
          FeatureVector delta{};
          delta[kFwd] = o.ln_fwd;
          delta[kBwd] = o.ln_bwd;
          buf = h.ctx;
          double lm10 = 0.0;
          for (lm::WordId id : o.ids) {
            lm10 += lm_.LogProb(buf.data(), static_cast<int>(buf.size()), id);
            buf.push_back(id);
          }
          delta[kLm] = lm10 * kLn10;
          delta[kWordPenalty] = -static_cast<double>(o.tgt.size());
          delta[kPhrasePenalty] = -1.0;
          delta[kDistortion] = -static_cast<double>(std::abs(o.src_begin - h.last_end));
          const double ds = fw.Score(delta);
          nh.ctx.assign(buf.end() - hist, buf.end());
          nh.last_end = o.src_end;
          nh.score = h.score + ds;
          const std::string key = StateKey(nh);
          auto& idx = index[nh.covered];
          auto it = idx.find(key);
          if (it != idx.end()) {
            Node& existing = nodes[it->second];
            existing.arcs.push_back({hid, oi, delta, ds});
            existing.score = std::max(existing.score, nh.score);
          } else {
            nh.future = future_of(nh.cov);
            nh.arcs.push_back({hid, oi, delta, ds});
            idx.emplace(key, static_cast<int>(nodes.size()));
            stacks[nh.covered].push_back(static_cast<int>(nodes.size()));
            nodes.push_back(std::move(nh));
          }
        }
      }
    }
  }
  if (stacks[n].empty()) Fail(ErrorKind::kRuntime, "decode: search space exhausted");

  // k-best derivations per node, by lazy merging of incoming arcs.
  const std::size_t want = static_cast<std::size_t>(params.nbest_n) * 3 + 2;
  std::vector<std::vector<Derivation>> kbest(nodes.size());
  std::vector<char> done(nodes.size(), 0);
  std::function<const std::vector<Derivation>&(int)> get = [&](int v) -> const std::vector<Derivation>& {
    if (done[v]) return kbest[v];
    done[v] = 1;
    auto& out = kbest[v];
    const auto& arcs = nodes[v].arcs;
    if (arcs.empty()) {
      out.push_back({0.0, -1, -1});
      return out;
    }
    using Item = std::tuple<double, int, int>;  // score, -arc, -rank (max-heap)
    std::priority_queue<Item> heap;
    for (int a = 0; a < static_cast<int>(arcs.size()); ++a) {
      const auto& pl = get(arcs[a].pred);
      heap.emplace(pl[0].score + arcs[a].delta_score, -a, 0);
    }
    while (!heap.empty() && out.size() < want) {
      auto [s, na, nr] = heap.top();
      heap.pop();
      const int a = -na, r = -nr;
      out.push_back({s, a, r});
      const auto& pl = get(arcs[a].pred);
      if (r + 1 < static_cast<int>(pl.size())) heap.emplace(pl[r + 1].score + arcs[a].delta_score, -a, -(r + 1));
    }
    return out;
  };

  // Sink over the complete hypotheses.
  struct Final {
    int node;
    FeatureVector delta;
    double delta_score;
  };
  std::vector<Final> finals;
  for (int v : stacks[n]) {
    const Node& h = nodes[v];
    FeatureVector d{};
    d[kLm] = lm_.LogProb(h.ctx.data(), static_cast<int>(h.ctx.size()), lm_.vocab().eos()) * kLn10;
    finals.push_back({v, d, fw.Score(d)});
  }
  using Item = std::tuple<double, int, int>;
  std::priority_queue<Item> heap;
  for (int f = 0; f < static_cast<int>(finals.size()); ++f) {
    heap.emplace(get(finals[f].node)[0].score + finals[f].delta_score, -f, 0);
  }
  std::unordered_set<std::string> seen;
  std::size_t popped = 0;
  while (!heap.empty() && popped < want) {
    auto [s, nf, nr] = heap.top();
    heap.pop();
    ++popped;
    const int f = -nf, r = -nr;
    const auto& fl = get(finals[f].node);
    if (r + 1 < static_cast<int>(fl.size())) heap.emplace(fl[r + 1].score + finals[f].delta_score, -f, -(r + 1));

    // Reconstruct.
    Translation t;
    t.features = finals[f].delta;
    std::vector<int> opts;
    int v = finals[f].node, rank = r;
    while (true) {
      const Derivation& d = kbest[v][rank];
      if (d.arc < 0) break;
      const Arc& arc = nodes[v].arcs[d.arc];
      for (int k = 0; k < kNumFeatures; ++k) t.features[k] += arc.delta[k];
      opts.push_back(arc.option);
      v = arc.pred;
      rank = d.rank;
    }
    std::reverse(opts.begin(), opts.end());
    for (int oi : opts) {
      const Option& o = options[oi];
      PhraseStep step;
      step.src_begin = o.src_begin;
      step.src_end = o.src_end;
      step.tgt_begin = static_cast<int>(t.tokens.size());
      t.tokens.insert(t.tokens.end(), o.tgt.begin(), o.tgt.end());
      step.tgt_end = static_cast<int>(t.tokens.size());
      step.unknown = o.unknown;
      t.steps.push_back(step);
    }
    t.text = Join(t.tokens, " ");
    t.score = fw.Score(t.features);
    if (!seen.insert(t.text).second) continue;
    result.push_back(std::move(t));
  }
  std::stable_sort(result.begin(), result.end(), [](const Translation& a, const Translation& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.text < b.text;
  });
  if (static_cast<int>(result.size()) > params.nbest_n) result.resize(static_cast<std::size_t>(params.nbest_n));
  return result;
}

std::vector<NBestList> Decoder::DecodeCorpus(const std::vector<Tokens>& src, const FeatureWeights& w,
                                             const DecodeParams& params, int workers) const {
  std::vector<NBestList> out(src.size());
  ParallelChunks(src.size(), 16, workers, [&](std::size_t, std::size_t b, std::size_t e) {
    for (std::size_t i = b; i < e; ++i) out[i] = Decode(src[i], w, params);
  });
  return out;
}

align::Alignment PhraseAlignment(const Translation& t) {
  align::Alignment a;
  for (const auto& s : t.steps) {
    for (int i = s.src_begin; i < s.src_end; ++i) {
      for (int j = s.tgt_begin; j < s.tgt_end; ++j) a.emplace(i, j);
    }
  }
  return a;
}

std::string FormatNBest(const std::vector<NBestList>& lists) {
  std::string out;
  for (std::size_t i = 0; i < lists.size(); ++i) {
    for (const auto& t : lists[i]) {
      out += std::to_string(i) + " ||| " + t.text + " |||";
      for (double f : t.features) out += " " + FormatDouble(f);
      out += " ||| " + FormatDouble(t.score) + "\n";
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// MERT

namespace {

double Dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

struct SignedStats {
  std::array<std::int64_t, mteval::kBleuOrder> m{}, t{};
  std::int64_t h = 0, r = 0;

  void Add(const mteval::BleuStats& s, int sign) {
    for (int k = 0; k < mteval::kBleuOrder; ++k) {
      m[k] += sign * static_cast<std::int64_t>(s.match[k]);
      t[k] += sign * static_cast<std::int64_t>(s.total[k]);
    }
    h += sign * static_cast<std::int64_t>(s.hyp_len);
    r += sign * static_cast<std::int64_t>(s.ref_len);
  }
  double Bleu() const {
    mteval::BleuStats s;
    for (int k = 0; k < mteval::kBleuOrder; ++k) {
      s.match[k] = static_cast<std::uint64_t>(m[k]);
      s.total[k] = static_cast<std::uint64_t>(t[k]);
    }
    s.hyp_len = static_cast<std::uint64_t>(h);
    s.ref_len = static_cast<std::uint64_t>(r);
    return mteval::BleuScore(s);
  }
};

std::size_t ArgmaxEntry(const std::vector<PoolEntry>& list, const std::vector<double>& w) {
  std::size_t best = 0;
  double bs = kNegInf;
  for (std::size_t i = 0; i < list.size(); ++i) {
    const double s = Dot(w, list[i].features);
    if (s > bs) {
      bs = s;
      best = i;
    }
  }
  return best;
}

}  // namespace

double PoolBleu(const NBestPool& pool, const std::vector<double>& w) {
  SignedStats st;
  for (const auto& list : pool) {
    if (list.empty()) continue;
    st.Add(list[ArgmaxEntry(list, w)].stats, 1);
  }
  return st.Bleu();
}

LineSearchResult LineSearch(const NBestPool& pool, const std::vector<double>& w, const std::vector<double>& d) {
  struct Event {
    double x;
    std::size_t sent;
    std::size_t from, to;
  };
  std::vector<Event> events;
  SignedStats st;
  for (std::size_t s = 0; s < pool.size(); ++s) {
    const auto& list = pool[s];
    if (list.empty()) continue;
    struct Line {
      double a, b;
      std::size_t idx;
      double start;
    };
    std::vector<Line> lines;
    lines.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) lines.push_back({Dot(w, list[i].features), Dot(d, list[i].features), i, 0});
    std::sort(lines.begin(), lines.end(), [](const Line& x, const Line& y) {
      if (x.b != y.b) return x.b < y.b;
      if (x.a != y.a) return x.a > y.a;
      return x.idx < y.idx;
    });
    std::vector<Line> hull;
    for (const auto& l : lines) {
      if (!hull.empty() && hull.back().b == l.b) continue;
      Line cur = l;
      while (!hull.empty()) {
        const double x = (hull.back().a - cur.a) / (cur.b - hull.back().b);
        if (hull.size() > 1 && x <= hull.back().start) {
          hull.pop_back();
          continue;
        }
        cur.start = x;
        break;
      }
      if (hull.empty()) cur.start = kNegInf;
      hull.push_back(cur);
    }
    st.Add(list[hull[0].idx].stats, 1);
    for (std::size_t k = 1; k < hull.size(); ++k) events.push_back({hull[k].start, s, hull[k - 1].idx, hull[k].idx});
  }
  std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) { return a.x < b.x; });

  LineSearchResult best;
  if (events.empty()) {
    best.gamma = 0.0;
    best.bleu = st.Bleu();
    return best;
  }
  best.bleu = st.Bleu();
  best.gamma = events.front().x - 1.0;
  std::size_t i = 0;
  while (i < events.size()) {
    const double x = events[i].x;
    while (i < events.size() && events[i].x == x) {
      st.Add(pool[events[i].sent][events[i].from].stats, -1);
      st.Add(pool[events[i].sent][events[i].to].stats, 1);
      ++i;
    }
    const double b = st.Bleu();
    if (b > best.bleu) {
      best.bleu = b;
      best.gamma = i < events.size() ? 0.5 * (x + events[i].x) : x + 1.0;
    }
  }
  return best;
}

OptimizeResult OptimizePool(const NBestPool& pool, const std::vector<double>& initial, int restarts,
                            std::uint64_t seed) {
  const std::size_t dim = initial.size();
  OptimizeResult res;
  res.weights = initial;
  res.bleu = PoolBleu(pool, initial);
  const double base = res.bleu;

  Rng rng(seed);
  std::vector<std::vector<double>> starts = {initial};
  for (int r = 0; r < restarts; ++r) {
    std::vector<double> s(dim);
    for (auto& x : s) x = rng.Uniform() * 2.0 - 1.0;
    starts.push_back(std::move(s));
  }
  std::vector<double> best_w = initial;
  double best_bleu = base;
  for (const auto& start : starts) {
    std::vector<double> w = start;
    double bleu = PoolBleu(pool, w);
    for (int sweep = 0; sweep < 100; ++sweep) {
      bool improved = false;
      for (std::size_t k = 0; k < dim; ++k) {
        std::vector<double> d(dim, 0.0);
        d[k] = 1.0;
        const LineSearchResult ls = LineSearch(pool, w, d);
        if (!(ls.bleu > bleu + 1e-9)) continue;
        std::vector<double> cand = w;
        cand[k] += ls.gamma;
        const double cb = PoolBleu(pool, cand);
        if (cb > bleu + 1e-9) {
          w = std::move(cand);
          bleu = cb;
          improved = true;
        }
      }
      if (!improved) break;
    }
    if (bleu > best_bleu + 1e-9) {
      best_bleu = bleu;
      best_w = w;
    }
  }
  if (best_bleu > base + 1e-9) {
    double l1 = 0.0;
    for (double x : best_w) l1 += std::fabs(x);
    if (l1 > 0.0) {
      for (double& x : best_w) x /= l1;
    }
    res.weights = best_w;
    res.bleu = PoolBleu(pool, best_w);
    res.improved = true;
  }
  return res;
}

MertResult MertTune(const Decoder& decoder, const std::vector<Tokens>& dev_src, const std::vector<Tokens>& dev_ref,
                    const FeatureWeights& initial, const MertOptions& options) {
  if (dev_src.empty() || dev_src.size() != dev_ref.size()) {
    Fail(ErrorKind::kInvalidArgument, "mert: dev source/reference sizes differ or are empty");
  }
  bool any_ref = false;
  for (const auto& r : dev_ref) any_ref = any_ref || !r.empty();
  if (!any_ref) Fail(ErrorKind::kInvalidArgument, "mert: all dev references are empty");
  if (options.rounds < 1) Fail(ErrorKind::kInvalidArgument, "mert: rounds must be >= 1");

  MertResult result;
  result.weights = initial;
  NBestPool pool(dev_src.size());
  std::vector<std::unordered_set<std::string>> seen(dev_src.size());
  DecodeParams dp = options.decode;
  dp.nbest_n = options.nbest_n;
  for (int round = 1; round <= options.rounds; ++round) {
    result.rounds_run = round;
    const auto lists = decoder.DecodeCorpus(dev_src, result.weights, dp, options.workers);
    std::size_t added = 0;
    for (std::size_t i = 0; i < lists.size(); ++i) {
      for (const auto& t : lists[i]) {
        if (!seen[i].insert(t.text).second) continue;
        PoolEntry e;
        e.features.assign(t.features.begin(), t.features.end());
        e.stats = mteval::ComputeStats(t.tokens, dev_ref[i], options.cased);
        e.text = t.text;
        pool[i].push_back(std::move(e));
        ++added;
      }
    }
    const std::vector<double> w(result.weights.w.begin(), result.weights.w.end());
    if (round == 1) {
      result.accepted_bleu.push_back(PoolBleu(pool, w));
    } else if (added == 0) {
      break;
    }
    const OptimizeResult opt = OptimizePool(pool, w, options.random_restarts, options.seed + static_cast<std::uint64_t>(round));
    const double last = result.accepted_bleu.back();
    LogInfo("mert round " + std::to_string(round) + ": pool BLEU " + FormatDouble(opt.bleu) + " (accepted " +
            FormatDouble(last) + ")");
    if (opt.bleu < last) break;
    for (int k = 0; k < kNumFeatures; ++k) result.weights.w[k] = opt.weights[k];
    result.accepted_bleu.push_back(opt.bleu);
    if (opt.bleu - last < options.min_improvement) break;
  }
  return result;
}

}  // namespace umtx::decoder
