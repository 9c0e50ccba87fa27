#include "braidmin/pathsearch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <deque>
#include <functional>
#include <iostream>
#include <map>
#include <thread>

#include "braidmin/spectral.hpp"

namespace braidmin {

namespace {

bool is_primitive_word(const std::vector<int>& w) {
  const std::size_t n = w.size();
  for (std::size_t p = 1; p < n; ++p) {
    if (n % p) continue;
    bool periodic = true;
    for (std::size_t i = p; i < n && periodic; ++i) periodic = w[i] == w[i - p];
    if (periodic) return false;
  }
  return true;
}

// Flat storage for one search layer; all paths share the word length.
struct LayerStore {
  int len = 0;
  int n = 0;
  std::size_t count = 0;
  std::vector<std::uint16_t> words;
  std::vector<std::uint16_t> mats;
  std::vector<std::int32_t> state;
  std::vector<std::int32_t> norm;

  std::size_t bytes_per_path() const {
    return sizeof(std::uint16_t) * (len + n * n) + 2 * sizeof(std::int32_t);
  }
  void append(const std::uint16_t* word_prefix, int prefix_len, int arrow, const std::uint16_t* mat, int st,
              std::int32_t nm) {
    words.insert(words.end(), word_prefix, word_prefix + prefix_len);
    words.push_back(static_cast<std::uint16_t>(arrow));
    mats.insert(mats.end(), mat, mat + n * n);
    state.push_back(st);
    norm.push_back(nm);
    ++count;
  }
  void append_all(LayerStore&& other) {
    words.insert(words.end(), other.words.begin(), other.words.end());
    mats.insert(mats.end(), other.mats.begin(), other.mats.end());
    state.insert(state.end(), other.state.begin(), other.state.end());
    norm.insert(norm.end(), other.norm.begin(), other.norm.end());
    count += other.count;
  }
};

struct RawHit {
  std::vector<int> word;
  int cmp = -1;
};

struct ChunkOut {
  LayerStore next;
  std::vector<RawHit> hits;
  SearchStats stats;
};

void add_stats(SearchStats& into, const SearchStats& s) {
  into.paths_expanded += s.paths_expanded;
  into.paths_kept += s.paths_kept;
  into.pruned_norm += s.pruned_norm;
  into.pruned_sum += s.pruned_sum;
  into.pruned_avoid += s.pruned_avoid;
  into.closed_paths += s.closed_paths;
  into.pf_closed += s.pf_closed;
  into.eigen_tested += s.eigen_tested;
  into.max_norm_seen = std::max(into.max_norm_seen, s.max_norm_seen);
}

struct ArrowData {
  int source;
  int target;
  bool fold;
  int m;
  int n;
  std::vector<int> inverse;  // target label -> source label
};

class Engine {
 public:
  Engine(const FoldingAutomaton& a, const AvoidSet& avoid, const SearchOptions& opt, std::int64_t maxnorm,
         std::int64_t threshold)
      : aut_(a), matcher_(avoid, static_cast<int>(a.arrows.size())), opt_(opt), maxnorm_(maxnorm),
        threshold_(threshold), bound_(exact_rational(opt.lambda_bound)), n_(a.edge_count) {
    for (const auto& fa : a.arrows) {
      ArrowData d{fa.source, fa.target, fa.kind == ArrowKind::Fold, fa.rule_from, fa.rule_to, {}};
      d.inverse.assign(n_, 0);
      for (int j = 0; j < n_; ++j) d.inverse[fa.permutation[j]] = j;
      arrows_.push_back(std::move(d));
    }
  }

  void expand(const LayerStore& layer, std::size_t lo, std::size_t hi, ChunkOut& out) const {
    out.next.len = layer.len + 1;
    out.next.n = n_;
    std::vector<std::uint16_t> child(n_ * n_);
    for (std::size_t p = lo; p < hi; ++p) {
      const std::uint16_t* word = layer.len ? &layer.words[p * layer.len] : nullptr;
      const std::uint16_t* mat = &layer.mats[p * n_ * n_];
      const int state = layer.state[p];
      const std::int32_t norm = layer.norm[p];
      int start_vertex;
      int cur;
      bool last_iso = false;
      if (layer.len == 0) {
        start_vertex = cur = static_cast<int>(p);
      } else {
        start_vertex = arrows_[word[0]].source;
        cur = arrows_[word[layer.len - 1]].target;
        last_iso = !arrows_[word[layer.len - 1]].fold;
      }
      for (int ai : aut_.outgoing[cur]) {
        const ArrowData& ad = arrows_[ai];
        if (last_iso && !ad.fold) continue;  // composites of isomorphisms are isomorphisms
        ++out.stats.paths_expanded;
        const int next_state = matcher_.step(state, ai);
        if (next_state < 0) {
          ++out.stats.pruned_avoid;
          continue;
        }
        std::int64_t next_norm = norm;
        if (ad.fold)
          for (int i = 0; i < n_; ++i) next_norm += mat[i * n_ + ad.m];
        if (next_norm > maxnorm_) {
          ++out.stats.pruned_norm;
          continue;
        }
        for (int i = 0; i < n_; ++i) {
          const std::uint16_t* row = mat + i * n_;
          std::uint16_t* crow = child.data() + i * n_;
          for (int j = 0; j < n_; ++j) crow[j] = row[ad.inverse[j]];
          if (ad.fold) crow[ad.n] = static_cast<std::uint16_t>(crow[ad.n] + row[ad.m]);
        }
        std::int64_t min_row = INT64_MAX;
        std::int64_t min_col = INT64_MAX;
        for (int i = 0; i < n_; ++i) {
          std::int64_t r = 0;
          std::int64_t c = 0;
          for (int j = 0; j < n_; ++j) {
            r += child[i * n_ + j];
            c += child[j * n_ + i];
          }
          min_row = std::min(min_row, r);
          min_col = std::min(min_col, c);
        }
        if (min_row >= threshold_ || min_col >= threshold_) {
          ++out.stats.pruned_sum;
          continue;
        }
        ++out.stats.paths_kept;
        out.stats.max_norm_seen = std::max<std::int64_t>(out.stats.max_norm_seen, next_norm);
        out.next.append(word, layer.len, ai, child.data(), next_state, static_cast<std::int32_t>(next_norm));
        if (ad.target == start_vertex) classify(out, child.data());
      }
    }
  }

  std::vector<int> word_of(const LayerStore& s, std::size_t idx) const {
    return {s.words.begin() + idx * s.len, s.words.begin() + (idx + 1) * s.len};
  }

 private:
  void classify(ChunkOut& out, const std::uint16_t* mat) const {
    ++out.stats.closed_paths;
    TransMatrix m(n_);
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j) m(i, j) = mat[i * n_ + j];
    if (!is_perron_frobenius(m)) return;
    ++out.stats.pf_closed;
    ++out.stats.eigen_tested;
    const int cmp = compare_largest_root(char_poly(m), bound_);
    if (cmp > 0 || (cmp == 0 && !opt_.equality_bucket)) return;
    const LayerStore& s = out.next;
    out.hits.push_back({word_of(s, s.count - 1), cmp});
  }

  const FoldingAutomaton& aut_;
  AvoidMatcher matcher_;
  const SearchOptions& opt_;
  std::int64_t maxnorm_;
  std::int64_t threshold_;
  BigRational bound_;
  int n_;
  std::vector<ArrowData> arrows_;
};

Candidate make_candidate(const FoldingAutomaton& a, const std::vector<int>& word, int cmp, double tol) {
  Candidate c;
  c.word = least_rotation(word);
  c.start = a.arrows[c.word.front()].source;
  c.matrix = path_matrix(a, c.word);
  c.char_poly = char_poly(c.matrix);
  c.dilatation = largest_real_root(c.char_poly, tol);
  c.min_poly = minimal_polynomial(c.char_poly);
  c.compare_to_bound = cmp;
  return c;
}

void assign_classes(const FoldingAutomaton& a, std::vector<Candidate>& cands, int* rotation, int* mirror) {
  std::map<std::vector<int>, int> mirror_ids;
  for (int i = 0; i < static_cast<int>(cands.size()); ++i) {
    auto& c = cands[i];
    c.rotation_class = i;
    std::vector<int> key = c.word;
    bool complete = true;
    std::vector<int> m;
    for (int x : c.word) {
      if (a.mirror_arrow.size() != a.arrows.size() || a.mirror_arrow[x] < 0) {
        complete = false;
        break;
      }
      m.push_back(a.mirror_arrow[x]);
    }
    if (complete) key = std::min(key, least_rotation(m));
    const auto it = mirror_ids.try_emplace(key, static_cast<int>(mirror_ids.size())).first;
    c.mirror_class = it->second;
  }
  *rotation = static_cast<int>(cands.size());
  *mirror = static_cast<int>(mirror_ids.size());
}

}  // namespace

std::vector<int> AvoidWord::word() const {
  std::vector<int> w;
  for (int i = 0; i < base + period; ++i) w.insert(w.end(), loop.begin(), loop.end());
  return w;
}

AvoidSet build_avoid_set(const FoldingAutomaton& automaton, int max_loop_len, int probe_limit) {
  AvoidSet out;
  out.max_loop_len = max_loop_len;
  out.probe_limit = probe_limit;
  std::vector<std::vector<int>> loops;
  std::vector<int> word;
  std::function<void(int, int)> walk = [&](int start, int at) {
    if (!word.empty() && at == start && is_primitive_word(word)) loops.push_back(word);
    if (static_cast<int>(word.size()) == max_loop_len) return;
    for (int a : automaton.outgoing[at]) {
      word.push_back(a);
      walk(start, automaton.arrows[a].target);
      word.pop_back();
    }
  };
  for (int v = 0; v < static_cast<int>(automaton.vertices.size()); ++v) walk(v, v);
  std::sort(loops.begin(), loops.end(), [](const auto& x, const auto& y) {
    return x.size() != y.size() ? x.size() < y.size() : x < y;
  });

  for (const auto& loop : loops) {
    const TransMatrix m = path_matrix(automaton, loop);
    std::vector<TransMatrix> pw{TransMatrix::identity(m.dim()), m};
    try {
      while (static_cast<int>(pw.size()) <= probe_limit) pw.push_back(pw.back() * m);
    } catch (const OverflowError&) {
    }
    bool found = false;
    for (int s = 2; s < static_cast<int>(pw.size()) && !found; ++s) {
      for (int base = 1; base < s && !found; ++base) {
        if (same_pattern(pw[s], pw[base]) && dominates(pw[s], pw[base])) {
          out.words.push_back({loop, base, s - base});
          found = true;
        }
      }
    }
  }
  return out;
}

AvoidMatcher::AvoidMatcher(const AvoidSet& avoid, int alphabet) : alphabet_(alphabet) {
  std::vector<std::vector<int>> go(1, std::vector<int>(alphabet, -1));
  std::vector<char> terminal(1, 0);
  for (const auto& aw : avoid.words) {
    int s = 0;
    for (int a : aw.word()) {
      if (a < 0 || a >= alphabet) throw DomainError("forbidden word uses an unknown arrow");
      if (go[s][a] < 0) {
        go[s][a] = static_cast<int>(go.size());
        go.emplace_back(alphabet, -1);
        terminal.push_back(0);
      }
      s = go[s][a];
    }
    terminal[s] = 1;
  }
  const int states = static_cast<int>(go.size());
  std::vector<int> fail(states, 0);
  std::deque<int> queue;
  for (int a = 0; a < alphabet; ++a) {
    if (go[0][a] < 0) {
      go[0][a] = 0;
    } else {
      fail[go[0][a]] = 0;
      queue.push_back(go[0][a]);
    }
  }
  while (!queue.empty()) {
    const int s = queue.front();
    queue.pop_front();
    terminal[s] = terminal[s] || terminal[fail[s]];
    for (int a = 0; a < alphabet; ++a) {
      const int t = go[s][a];
      if (t < 0) {
        go[s][a] = go[fail[s]][a];
      } else {
        fail[t] = go[fail[s]][a];
        queue.push_back(t);
      }
    }
  }
  delta_.assign(static_cast<std::size_t>(states) * alphabet, 0);
  for (int s = 0; s < states; ++s)
    for (int a = 0; a < alphabet; ++a) {
      const int t = go[s][a];
      delta_[static_cast<std::size_t>(s) * alphabet + a] = terminal[t] ? -1 : t;
    }
}

bool AvoidMatcher::contains_forbidden(const std::vector<int>& word) const {
  int s = start();
  for (int a : word) {
    s = step(s, a);
    if (s < 0) return true;
  }
  return false;
}

std::int64_t default_sum_threshold(double lambda_bound) {
  return std::max<std::int64_t>(3, static_cast<std::int64_t>(std::floor(lambda_bound)) + 1);
}

std::string to_string(Rejection r) {
  switch (r) {
    case Rejection::None: return "accepted";
    case Rejection::NotClosed: return "not-closed";
    case Rejection::NotPF: return "not-PF";
    case Rejection::AboveBound: return "dilatation-above-bound";
    case Rejection::EqualBound: return "dilatation-equals-bound";
  }
  return "unknown";
}

Classification classify_closed(const FoldingAutomaton& automaton, const std::vector<int>& word,
                               double lambda_bound, double tol) {
  Classification out;
  if (word.empty() || automaton.arrows.at(word.front()).source != automaton.arrows.at(word.back()).target) {
    out.reason = Rejection::NotClosed;
    return out;
  }
  const TransMatrix m = path_matrix(automaton, word);
  if (!is_perron_frobenius(m)) {
    out.reason = Rejection::NotPF;
    return out;
  }
  const int cmp = compare_largest_root(char_poly(m), lambda_bound);
  if (cmp > 0) {
    out.reason = Rejection::AboveBound;
    return out;
  }
  out.reason = cmp == 0 ? Rejection::EqualBound : Rejection::None;
  out.candidate = make_candidate(automaton, word, cmp, tol);
  return out;
}

Layer children(const Layer& layer, const FoldingAutomaton& automaton, std::int64_t maxnorm, const AvoidSet& avoid,
               std::int64_t sum_threshold) {
  const AvoidMatcher matcher(avoid, static_cast<int>(automaton.arrows.size()));
  Layer out;
  for (const auto& w : layer) {
    if (w.empty()) continue;
    const int cur = automaton.arrows.at(w.back()).target;
    const bool last_iso = automaton.arrows[w.back()].kind == ArrowKind::Isomorphism;
    for (int a : automaton.outgoing[cur]) {
      if (last_iso && automaton.arrows[a].kind == ArrowKind::Isomorphism) continue;
      std::vector<int> next = w;
      next.push_back(a);
      if (matcher.contains_forbidden(next)) continue;
      const TransMatrix m = path_matrix(automaton, next);
      if (entry_sum(m) > maxnorm) continue;
      std::int64_t min_row = INT64_MAX;
      std::int64_t min_col = INT64_MAX;
      for (int i = 0; i < m.dim(); ++i) {
        min_row = std::min(min_row, m.row_sum(i));
        min_col = std::min(min_col, m.col_sum(i));
      }
      if (min_row >= sum_threshold || min_col >= sum_threshold) continue;
      out.push_back(std::move(next));
    }
  }
  return out;
}

SearchResult search(const FoldingAutomaton& automaton, const AvoidSet& avoid, const SearchOptions& options) {
  if (!(options.lambda_bound > 1.0)) throw DomainError("lambda bound must be > 1");
  if (!(options.tol > 0)) throw DomainError("tolerance must be positive");
  if (options.threads < 1) throw DomainError("thread count must be positive");
  SearchResult result;
  const int n = automaton.edge_count;
  const int nv = static_cast<int>(automaton.vertices.size());
  if (nv == 0) return result;
  result.maxnorm = options.maxnorm ? *options.maxnorm : max_norm_bound(options.lambda_bound, n);
  result.sum_threshold = options.sum_threshold ? *options.sum_threshold : default_sum_threshold(options.lambda_bound);
  if (result.maxnorm > 65535) throw DomainError("maxnorm above 65535 is not supported");
  if (automaton.arrows.size() > 65535 || nv > 65535) throw DomainError("automaton too large for the search");

  const Engine engine(automaton, avoid, options, result.maxnorm, result.sum_threshold);
  LayerStore layer;
  layer.n = n;
  for (int v = 0; v < nv; ++v) {
    const TransMatrix id = TransMatrix::identity(n);
    for (auto x : id.row_major()) layer.mats.push_back(static_cast<std::uint16_t>(x));
    layer.state.push_back(0);
    layer.norm.push_back(n);
    ++layer.count;
  }

  std::vector<RawHit> hits;
  SearchStats& stats = result.stats;
  const int threads = std::max(1, options.threads);
  constexpr std::size_t kChunk = 2048;
  while (layer.count > 0) {
    const std::size_t chunks = (layer.count + kChunk - 1) / kChunk;
    std::vector<ChunkOut> outs(chunks);
    std::atomic<std::size_t> next_chunk{0};
    std::atomic<std::int64_t> produced{0};
    std::atomic<bool> abort{false};
    const std::size_t child_bytes = (sizeof(std::uint16_t) * (layer.len + 1 + n * n) + 2 * sizeof(std::int32_t));
    auto work = [&] {
      while (!abort.load()) {
        const std::size_t c = next_chunk.fetch_add(1);
        if (c >= chunks) break;
        engine.expand(layer, c * kChunk, std::min(layer.count, (c + 1) * kChunk), outs[c]);
        const std::int64_t total = produced.fetch_add(static_cast<std::int64_t>(outs[c].next.count)) +
                                   static_cast<std::int64_t>(outs[c].next.count);
        if (total > options.max_layer_paths ||
            static_cast<std::int64_t>(total * child_bytes + layer.count * layer.bytes_per_path()) >
                options.max_memory_bytes)
          abort = true;
      }
    };
    if (threads == 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    if (abort) {
      throw ResourceError("search aborted in layer " + std::to_string(layer.len + 1) + ": more than " +
                          std::to_string(options.max_layer_paths) + " live paths or " +
                          std::to_string(options.max_memory_bytes) + " bytes (layer " + std::to_string(layer.len) +
                          " had " + std::to_string(layer.count) + " paths, " + std::to_string(stats.eigen_tested) +
                          " matrices tested so far)");
    }
    LayerStore next;
    next.len = layer.len + 1;
    next.n = n;
    for (auto& o : outs) {
      add_stats(stats, o.stats);
      for (auto& h : o.hits) hits.push_back(std::move(h));
      next.append_all(std::move(o.next));
    }
    outs.clear();
    if (next.count > 0) {
      ++stats.layers;
      stats.max_length = next.len;
      stats.max_layer_paths = std::max<std::int64_t>(stats.max_layer_paths, static_cast<std::int64_t>(next.count));
      stats.peak_layer_bytes = std::max<std::int64_t>(
          stats.peak_layer_bytes, static_cast<std::int64_t>(next.count * next.bytes_per_path() +
                                                            layer.count * layer.bytes_per_path()));
    }
    if (options.progress)
      std::cerr << "layer " << next.len << ": " << next.count << " paths, " << stats.eigen_tested
                << " matrices tested, " << hits.size() << " hits\n";
    layer = std::move(next);
  }

  std::map<std::vector<int>, int> below;
  std::map<std::vector<int>, int> equal;
  for (const auto& h : hits) (h.cmp < 0 ? below : equal).try_emplace(least_rotation(h.word), h.cmp);
  auto collect = [&](const std::map<std::vector<int>, int>& src) {
    std::vector<Candidate> out;
    for (const auto& [w, cmp] : src) out.push_back(make_candidate(automaton, w, cmp, options.tol));
    std::stable_sort(out.begin(), out.end(), [](const Candidate& x, const Candidate& y) {
      if (x.dilatation.lo != y.dilatation.lo) return x.dilatation.lo < y.dilatation.lo;
      return x.word < y.word;
    });
    return out;
  };
  result.candidates = collect(below);
  result.equality = collect(equal);
  assign_classes(automaton, result.candidates, &result.rotation_classes, &result.mirror_classes);
  int r = 0;
  int m = 0;
  assign_classes(automaton, result.equality, &r, &m);
  return result;
}

std::vector<int> least_rotation(const std::vector<int>& word) {
  std::vector<int> best = word;
  std::vector<int> rot = word;
  for (std::size_t i = 1; i < word.size(); ++i) {
    std::rotate(rot.begin(), rot.begin() + 1, rot.end());
    if (rot < best) best = rot;
  }
  return best;
}

}  // namespace braidmin
