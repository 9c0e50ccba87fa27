#include "doctest.h"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "braidmin/automaton.hpp"
#include "oracles.hpp"

using namespace braidmin;

namespace {

const FoldingAutomaton& automaton(const std::string& name) {
  static std::map<std::string, FoldingAutomaton> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    const int p = name == "one-trigon" ? 4 : name == "1p4,2p1,b2" ? 4 : 5;
    it = cache.emplace(name, build_automaton(parse_stratum(name, p), p)).first;
  }
  return it->second;
}

// All trees on the stratum's nodes with every arrangement of legs into
// corners, filtered by validate and check_stratum.
std::set<CanonicalCode> brute_force_codes(const StratumSpec& spec) {
  const TrackShape shape = track_shape(spec);
  const int n = static_cast<int>(shape.nodes.size());
  std::set<CanonicalCode> out;
  // Pruefer sequences over n labeled nodes.
  std::vector<int> seq(std::max(0, n - 2), 0);
  for (;;) {
    std::vector<int> degree(n, 1);
    for (int x : seq) ++degree[x];
    std::vector<std::pair<int, int>> edges;
    std::vector<int> deg = degree;
    for (int x : seq) {
      for (int leaf = 0; leaf < n; ++leaf)
        if (deg[leaf] == 1) {
          edges.emplace_back(leaf, x);
          --deg[leaf];
          --deg[x];
          break;
        }
    }
    std::vector<int> last;
    for (int v = 0; v < n; ++v)
      if (deg[v] == 1) last.push_back(v);
    edges.emplace_back(last[0], last[1]);

    std::vector<std::vector<int>> legs(n);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      legs[edges[e].first].push_back(e);
      legs[edges[e].second].push_back(e);
    }
    // Every node: every leg order and every split into its corners.
    std::vector<std::vector<std::vector<std::vector<int>>>> options(n);
    for (int v = 0; v < n; ++v) {
      const int corners = shape.nodes[v].second;
      std::vector<int> order = legs[v];
      std::sort(order.begin(), order.end());
      do {
        std::vector<int> cut(corners - 1, 0);
        std::function<void(int, int)> rec = [&](int i, int from) {
          if (i == corners - 1) {
            std::vector<std::vector<int>> c;
            int prev = 0;
            for (int k = 0; k <= corners - 1; ++k) {
              const int end = k < corners - 1 ? cut[k] : static_cast<int>(order.size());
              c.emplace_back(order.begin() + prev, order.begin() + end);
              prev = end;
            }
            options[v].push_back(c);
            return;
          }
          for (int x = from; x <= static_cast<int>(order.size()); ++x) {
            cut[i] = x;
            rec(i + 1, x);
          }
        };
        rec(0, 0);
      } while (std::next_permutation(order.begin(), order.end()));
    }
    std::vector<std::size_t> pick(n, 0);
    for (;;) {
      std::vector<Node> nodes;
      for (int v = 0; v < n; ++v) nodes.push_back({shape.nodes[v].first, options[v][pick[v]]});
      const TrainTrack t(nodes);
      if (validate(t).empty() && check_stratum(t, spec).empty()) out.insert(canonical_form(t).code);
      int v = 0;
      while (v < n && ++pick[v] == options[v].size()) pick[v++] = 0;
      if (v == n) break;
    }

    int i = 0;
    while (i < static_cast<int>(seq.size()) && ++seq[i] == n) seq[i++] = 0;
    if (i == static_cast<int>(seq.size())) break;
  }
  return out;
}

std::vector<std::vector<int>> closed_words(const FoldingAutomaton& a, int max_len) {
  std::vector<std::vector<int>> out;
  std::vector<int> w;
  std::function<void(int, int)> rec = [&](int start, int at) {
    if (!w.empty() && at == start) out.push_back(w);
    if (static_cast<int>(w.size()) == max_len) return;
    for (int arrow : a.outgoing[at]) {
      w.push_back(arrow);
      rec(start, a.arrows[arrow].target);
      w.pop_back();
    }
  };
  for (int v = 0; v < static_cast<int>(a.vertices.size()); ++v) rec(v, v);
  return out;
}

}  // namespace

TEST_CASE("automaton counts") {
  const auto& tt = automaton("two-trigon");
  CHECK(tt.vertices.size() == 9);
  CHECK(tt.fold_arrow_count() == 18);
  CHECK(tt.isomorphism_arrow_count() == 0);
  const auto& b3 = automaton("boundary-3prong");
  CHECK(b3.vertices.size() == 11);
  CHECK(b3.connection_count() == 50);
  CHECK(b3.fold_arrow_count() == 66);
  const auto& d4 = automaton("one-trigon");
  CHECK(d4.vertices.size() == 3);
  CHECK(d4.fold_arrow_count() == 6);
  const auto& fp = automaton("four-prong");
  CHECK(fp.vertices.size() == 3);
  CHECK(fp.fold_arrow_count() == 6);
  for (const char* name : {"two-trigon", "boundary-3prong", "one-trigon", "four-prong"})
    CHECK(automaton(name).strongly_connected());
}

TEST_CASE("enumeration matches brute force over all slot assignments") {
  for (const char* name : {"one-trigon", "four-prong", "boundary-3prong", "two-trigon", "1p4,2p1,b2"}) {
    const auto& a = automaton(name);
    const std::set<CanonicalCode> expect = brute_force_codes(a.stratum);
    const std::set<CanonicalCode> got(a.vertices.begin(), a.vertices.end());
    CHECK_MESSAGE(got == expect, name);
  }
}

TEST_CASE("two arrows in and out of every two-trigon vertex") {
  const auto& a = automaton("two-trigon");
  std::vector<int> in(a.vertices.size(), 0);
  for (const auto& arrow : a.arrows) ++in[arrow.target];
  for (std::size_t v = 0; v < a.vertices.size(); ++v) {
    CHECK(a.outgoing[v].size() == 2);
    CHECK(in[v] == 2);
  }
}

TEST_CASE("arrow matrices are a permutation plus one unit") {
  for (const char* name : {"two-trigon", "boundary-3prong", "four-prong", "1p4,2p1,b2"}) {
    const auto& a = automaton(name);
    for (const auto& arrow : a.arrows) {
      const TransMatrix m = arrow.matrix();
      TransMatrix p(a.edge_count);
      for (int j = 0; j < a.edge_count; ++j) p(j, arrow.permutation[j]) = 1;
      if (arrow.kind == ArrowKind::Fold) {
        CHECK(entry_sum(m) == a.edge_count + 1);
        p(arrow.rule_from, arrow.rule_to) += 1;
      } else {
        CHECK(entry_sum(m) == a.edge_count);
      }
      CHECK(m == p);
      CHECK(arrow.target >= 0);
      CHECK(arrow.target < static_cast<int>(a.vertices.size()));
    }
  }
}

TEST_CASE("fold and split are inverse") {
  for (const char* name : {"two-trigon", "boundary-3prong", "four-prong", "one-trigon", "1p4,2p1,b2"}) {
    const auto& a = automaton(name);
    for (int v = 0; v < static_cast<int>(a.vertices.size()); ++v) {
      const TrainTrack t = a.track(v);
      for (const auto& mv : fold_moves(t)) {
        const auto back = split_moves(mv.target.track);
        CHECK(std::find(back.begin(), back.end(), a.vertices[v]) != back.end());
      }
      for (const auto& code : split_moves(t)) {
        bool found = false;
        for (const auto& mv : fold_moves(TrainTrack::from_code(code))) found = found || mv.target.code == a.vertices[v];
        CHECK(found);
      }
    }
  }
}

TEST_CASE("fold moves come in pairs per cusp") {
  for (int v = 0; v < 11; ++v) {
    const TrainTrack t = automaton("boundary-3prong").track(v);
    CHECK(fold_moves(t).size() == 2 * cusps(t).size());
  }
}

TEST_CASE("mirror arrows preserve characteristic polynomials") {
  for (const char* name : {"two-trigon", "one-trigon", "boundary-3prong"}) {
    const auto& a = automaton(name);
    for (std::size_t i = 0; i < a.arrows.size(); ++i) {
      const int m = a.mirror_arrow[i];
      REQUIRE(m >= 0);
      CHECK(a.mirror_arrow[m] == static_cast<int>(i));
      CHECK(a.arrows[m].source == a.mirror_vertex[a.arrows[i].source]);
      CHECK(a.arrows[m].target == a.mirror_vertex[a.arrows[i].target]);
    }
    for (const auto& w : closed_words(a, 4)) {
      std::vector<int> mw;
      for (int x : w) mw.push_back(a.mirror_arrow[x]);
      CHECK(char_poly(path_matrix(a, w)) == char_poly(path_matrix(a, mw)));
    }
  }
}

TEST_CASE("isomorphism arrows match brute-force automorphisms") {
  CHECK(automaton("two-trigon").isomorphism_arrow_count() == 0);
  for (const char* name : {"1p4,2p1,b2", "boundary-3prong"}) {
    const auto& a = automaton(name);
    std::vector<int> iso(a.vertices.size(), 0);
    for (const auto& arrow : a.arrows)
      if (arrow.kind == ArrowKind::Isomorphism) {
        CHECK(arrow.source == arrow.target);
        ++iso[arrow.source];
      }
    for (std::size_t v = 0; v < a.vertices.size(); ++v)
      CHECK(iso[v] == oracle::brute_automorphisms(a.track(static_cast<int>(v))) - 1);
  }
}

TEST_CASE("order-2 symmetry gives one isomorphism arrow") {
  const auto& a = automaton("1p4,2p1,b2");
  int symmetric = 0;
  for (int v = 0; v < static_cast<int>(a.vertices.size()); ++v) {
    std::vector<const FoldArrow*> iso;
    for (const auto& arrow : a.arrows)
      if (arrow.kind == ArrowKind::Isomorphism && arrow.source == v) iso.push_back(&arrow);
    if (iso.size() != 1) continue;
    ++symmetric;
    const TransMatrix m = iso.front()->matrix();
    CHECK(m != TransMatrix::identity(a.edge_count));
    CHECK(m * m == TransMatrix::identity(a.edge_count));
  }
  CHECK(symmetric >= 1);
}

TEST_CASE("path matrices multiply along the word") {
  const auto& a = automaton("two-trigon");
  for (const auto& w : closed_words(a, 3)) {
    TransMatrix m = TransMatrix::identity(a.edge_count);
    for (int x : w) m = m * a.arrows[x].matrix();
    CHECK(path_matrix(a, w) == m);
  }
  // Two arrows that do not chain.
  int bad_first = 0;
  int bad_second = -1;
  for (int j = 0; j < static_cast<int>(a.arrows.size()); ++j)
    if (a.arrows[j].source != a.arrows[bad_first].target) bad_second = j;
  REQUIRE(bad_second >= 0);
  CHECK_THROWS_AS(path_matrix(a, {bad_first, bad_second}), DomainError);
}

TEST_CASE("annotations merge by key") {
  FoldingAutomaton a = automaton("one-trigon");
  const FoldArrow& first = a.arrows.front();
  ArrowAnnotation note;
  note.source = a.vertices[first.source];
  note.target = a.vertices[first.target];
  note.permutation = first.permutation;
  note.rule_from = first.rule_from;
  note.rule_to = first.rule_to;
  note.identity = false;
  note.braid = BraidWord::parse(4, "s1 s2");
  CHECK(apply_annotations(a, {note}) == 1);
  CHECK(a.arrows.front().braid == BraidWord::parse(4, "s1 s2"));
  CHECK(a.arrows.front().identity == false);

  ArrowAnnotation stray = note;
  stray.rule_from = (note.rule_from + 1) % a.edge_count;
  stray.rule_to = note.rule_from;
  CHECK_THROWS_AS(apply_annotations(a, {stray}), DomainError);
}

TEST_CASE("generation is deterministic") {
  const StratumSpec spec = parse_stratum("boundary-3prong", 5);
  const FoldingAutomaton a = build_automaton(spec, 5);
  const FoldingAutomaton b = build_automaton(spec, 5);
  CHECK(a.vertices == b.vertices);
  CHECK(a.arrows == b.arrows);
}

TEST_CASE("inconsistent stratum is rejected") {
  StratumSpec bad;
  bad.singularities = {{1, true, 5}, {3, false, 2}};
  bad.boundary_prongs = 1;
  CHECK_THROWS_AS(build_automaton(bad, 4), DomainError);
}
