#include "braidmin/automaton.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <set>

namespace braidmin {

namespace {

// Isomorphism class of a labeled tree whose nodes carry a type tag.
std::string typed_tree_key(const std::vector<std::pair<int, int>>& edges, const std::vector<int>& tag) {
  const int n = static_cast<int>(tag.size());
  std::vector<std::vector<int>> adj(n);
  for (auto [u, v] : edges) {
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  std::function<std::string(int, int)> encode = [&](int v, int parent) {
    std::vector<std::string> kids;
    for (int w : adj[v])
      if (w != parent) kids.push_back(encode(w, v));
    std::sort(kids.begin(), kids.end());
    std::string s = "(" + std::to_string(tag[v]);
    for (const auto& k : kids) s += k;
    return s + ")";
  };
  std::string best;
  for (int r = 0; r < n; ++r) {
    std::string s = encode(r, -1);
    if (best.empty() || s < best) best = std::move(s);
  }
  return best;
}

// Calls f(edges, degrees) for every labeled tree on n >= 2 nodes.
void for_each_tree(int n, const std::function<void(const std::vector<std::pair<int, int>>&, const std::vector<int>&)>& f) {
  if (n == 2) {
    f({{0, 1}}, {1, 1});
    return;
  }
  std::vector<int> seq(n - 2, 0);
  while (true) {
    std::vector<int> deg(n, 1);
    for (int x : seq) ++deg[x];
    std::vector<int> d = deg;
    std::vector<std::pair<int, int>> edges;
    for (int x : seq) {
      int leaf = 0;
      while (d[leaf] != 1) ++leaf;
      edges.emplace_back(leaf, x);
      --d[leaf];
      --d[x];
    }
    int u = -1;
    int v = -1;
    for (int i = 0; i < n; ++i)
      if (d[i] == 1) (u < 0 ? u : v) = i;
    edges.emplace_back(u, v);
    f(edges, deg);
    int pos = n - 3;
    while (pos >= 0 && ++seq[pos] == n) seq[pos--] = 0;
    if (pos < 0) break;
  }
}

// All ways to arrange the given legs counterclockwise into k nonempty corners.
std::vector<std::vector<std::vector<int>>> arrangements(std::vector<int> legs, int k) {
  std::vector<std::vector<std::vector<int>>> out;
  const int d = static_cast<int>(legs.size());
  if (d < k) return out;
  std::sort(legs.begin(), legs.end());
  do {
    // choose k-1 cut points among the d-1 gaps
    std::vector<bool> cut(d - 1, false);
    std::fill(cut.begin(), cut.begin() + (k - 1), true);
    do {
      std::vector<std::vector<int>> corners(1);
      for (int i = 0; i < d; ++i) {
        corners.back().push_back(legs[i]);
        if (i + 1 < d && cut[i]) corners.emplace_back();
      }
      out.push_back(std::move(corners));
    } while (std::prev_permutation(cut.begin(), cut.end()));
  } while (std::next_permutation(legs.begin(), legs.end()));
  return out;
}

LegPosition far_end(const TrainTrack& t, int edge, int near_node) {
  const auto [a, b] = t.ends(edge);
  return a.node == near_node ? b : a;
}

}  // namespace

std::string to_string(ArrowKind k) { return k == ArrowKind::Fold ? "fold" : "isomorphism"; }

TransMatrix FoldArrow::matrix() const {
  const int n = static_cast<int>(permutation.size());
  TransMatrix m(n);
  for (int j = 0; j < n; ++j) m(j, permutation[j]) = 1;
  if (kind == ArrowKind::Fold) m(rule_from, rule_to) += 1;
  return m;
}

std::vector<FoldMove> fold_moves(const TrainTrack& track) {
  require_valid(track);
  std::vector<FoldMove> out;
  for (const auto& cusp : cusps(track)) {
    const auto& corner = track.nodes()[cusp.node].corners[cusp.corner];
    const int a = corner[cusp.index];
    const int b = corner[cusp.index + 1];
    for (bool first_over : {true, false}) {
      std::vector<Node> nodes = track.nodes();
      FoldMove mv;
      mv.cusp = cusp;
      mv.first_over_second = first_over;
      mv.mover = first_over ? a : b;
      mv.along = first_over ? b : a;
      const LegPosition far = far_end(track, mv.along, cusp.node);
      auto& src = nodes[cusp.node].corners[cusp.corner];
      src.erase(src.begin() + cusp.index + (first_over ? 0 : 1));
      auto& dst_node = nodes[far.node];
      const int k = static_cast<int>(dst_node.corners.size());
      if (first_over) {
        auto& dst = dst_node.corners[(far.corner + 1) % k];
        dst.insert(dst.begin(), mv.mover);
      } else {
        dst_node.corners[(far.corner + k - 1) % k].push_back(mv.mover);
      }
      mv.target = canonical_form(TrainTrack(std::move(nodes)));
      mv.arrow.permutation = mv.target.edge_map;
      mv.arrow.rule_from = mv.mover;
      mv.arrow.rule_to = mv.target.edge_map[mv.along];
      mv.arrow.kind = ArrowKind::Fold;
      out.push_back(std::move(mv));
    }
  }
  return out;
}

std::vector<CanonicalCode> split_moves(const TrainTrack& track) {
  require_valid(track);
  std::vector<CanonicalCode> out;
  for (int q = 0; q < track.node_count(); ++q) {
    const auto& corners = track.nodes()[q].corners;
    const int k = static_cast<int>(corners.size());
    for (int d = 0; d < k; ++d) {
      if (corners[d].size() < 2) continue;
      for (bool from_front : {true, false}) {
        const int x = from_front ? corners[d].front() : corners[d].back();
        const int nd = from_front ? (d + k - 1) % k : (d + 1) % k;
        for (int y : corners[nd]) {
          if (y == x) continue;
          std::vector<Node> nodes = track.nodes();
          auto& src = nodes[q].corners[d];
          if (from_front) {
            src.erase(src.begin());
          } else {
            src.pop_back();
          }
          const LegPosition far = far_end(track, y, q);
          auto& dst = nodes[far.node].corners[far.corner];
          dst.insert(dst.begin() + far.index + (from_front ? 0 : 1), x);
          TrainTrack t(std::move(nodes));
          if (!validate(t).empty()) continue;
          out.push_back(canonical_form(t).code);
        }
      }
    }
  }
  return out;
}

std::vector<TrainTrack> enumerate_tracks(const StratumSpec& stratum, int punctures) {
  if (!stratum.consistent()) throw DomainError("stratum " + stratum.to_string() + " violates sum (1 - k/2) n_k = 2");
  if (stratum.puncture_count() != punctures + 1)
    throw DomainError("stratum " + stratum.to_string() + " does not have " + std::to_string(punctures + 1) +
                      " punctures");
  const TrackShape shape = track_shape(stratum);
  const int n = static_cast<int>(shape.nodes.size());
  std::map<CanonicalCode, TrainTrack> found;
  if (n < 2) return {};

  std::vector<int> tag(n);
  for (int i = 0; i < n; ++i) tag[i] = static_cast<int>(shape.nodes[i].first) * 1000 + shape.nodes[i].second;
  std::set<std::string> seen_trees;

  for_each_tree(n, [&](const std::vector<std::pair<int, int>>& edges, const std::vector<int>& deg) {
    int extra = 0;
    for (int i = 0; i < n; ++i) {
      if (deg[i] < shape.nodes[i].second) return;
      extra += deg[i] - shape.nodes[i].second;
    }
    if (extra != shape.boundary_cusps) return;
    if (!seen_trees.insert(typed_tree_key(edges, tag)).second) return;

    std::vector<std::vector<int>> incident(n);
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      incident[edges[e].first].push_back(e);
      incident[edges[e].second].push_back(e);
    }
    std::vector<std::vector<std::vector<std::vector<int>>>> options(n);
    for (int i = 0; i < n; ++i) options[i] = arrangements(incident[i], shape.nodes[i].second);

    std::vector<std::size_t> choice(n, 0);
    while (true) {
      std::vector<Node> nodes(n);
      for (int i = 0; i < n; ++i) nodes[i] = Node{shape.nodes[i].first, options[i][choice[i]]};
      TrainTrack t(std::move(nodes));
      if (validate(t).empty()) {
        CanonicalForm form = canonical_form(t);
        found.try_emplace(form.code, std::move(form.track));
      }
      int pos = n - 1;
      while (pos >= 0 && ++choice[pos] == options[pos].size()) choice[pos--] = 0;
      if (pos < 0) break;
    }
  });

  std::vector<TrainTrack> out;
  for (auto& [code, t] : found) out.push_back(std::move(t));
  return out;
}

std::vector<FoldArrow> isomorphism_arrows(const std::vector<TrainTrack>& tracks) {
  std::vector<FoldArrow> out;
  for (int v = 0; v < static_cast<int>(tracks.size()); ++v) {
    const CanonicalForm form = canonical_form(tracks[v]);
    std::vector<int> id(form.code[0]);
    std::iota(id.begin(), id.end(), 0);
    std::set<std::vector<int>> maps;
    for (const auto& m : form.automorphism_maps)
      if (m != id) maps.insert(m);
    for (const auto& m : maps) {
      FoldArrow a;
      a.source = v;
      a.target = v;
      a.permutation = m;
      a.kind = ArrowKind::Isomorphism;
      out.push_back(std::move(a));
    }
  }
  return out;
}

void FoldingAutomaton::finalize() {
  const int nv = static_cast<int>(vertices.size());
  std::map<CanonicalCode, int> lookup;
  for (int v = 0; v < nv; ++v) lookup[vertices[v]] = v;
  outgoing.assign(nv, {});
  for (int a = 0; a < static_cast<int>(arrows.size()); ++a) outgoing.at(arrows[a].source).push_back(a);

  std::vector<CanonicalForm> mirror_forms;
  std::vector<std::vector<std::vector<int>>> autos;
  mirror_vertex.assign(nv, -1);
  for (int v = 0; v < nv; ++v) {
    const TrainTrack t = track(v);
    autos.push_back(canonical_form(t).automorphism_maps);
    mirror_forms.push_back(canonical_form(t.mirrored()));
    const auto it = lookup.find(mirror_forms.back().code);
    if (it != lookup.end()) mirror_vertex[v] = it->second;
  }

  mirror_arrow.assign(arrows.size(), -1);
  for (int a = 0; a < static_cast<int>(arrows.size()); ++a) {
    const FoldArrow& fa = arrows[a];
    const int s = mirror_vertex[fa.source];
    const int t = mirror_vertex[fa.target];
    if (s < 0 || t < 0) continue;
    const TransMatrix m = fa.matrix();
    const auto& sig_s = mirror_forms[fa.source].edge_map;
    const auto& sig_t = mirror_forms[fa.target].edge_map;
    for (int b : outgoing[s]) {
      const FoldArrow& fb = arrows[b];
      if (fb.target != t || fb.kind != fa.kind) continue;
      const TransMatrix mb = fb.matrix();
      bool match = false;
      for (const auto& as : autos[s]) {
        for (const auto& at : autos[t]) {
          bool ok = true;
          for (int i = 0; i < edge_count && ok; ++i)
            for (int j = 0; j < edge_count && ok; ++j) ok = mb(as[sig_s[i]], at[sig_t[j]]) == m(i, j);
          if (ok) {
            match = true;
            break;
          }
        }
        if (match) break;
      }
      if (match) {
        mirror_arrow[a] = b;
        break;
      }
    }
  }
}

int FoldingAutomaton::vertex_index(const CanonicalCode& code) const {
  const auto it = std::find(vertices.begin(), vertices.end(), code);
  return it == vertices.end() ? -1 : static_cast<int>(it - vertices.begin());
}

int FoldingAutomaton::fold_arrow_count() const {
  return static_cast<int>(std::count_if(arrows.begin(), arrows.end(), [](const FoldArrow& a) { return a.kind == ArrowKind::Fold; }));
}

int FoldingAutomaton::isomorphism_arrow_count() const {
  return static_cast<int>(arrows.size()) - fold_arrow_count();
}

int FoldingAutomaton::connection_count() const {
  std::set<std::pair<int, int>> pairs;
  for (const auto& a : arrows) pairs.emplace(a.source, a.target);
  return static_cast<int>(pairs.size());
}

bool FoldingAutomaton::strongly_connected() const {
  const int nv = static_cast<int>(vertices.size());
  if (nv == 0) return false;
  auto reach = [&](bool forward) {
    std::vector<std::vector<int>> adj(nv);
    for (const auto& a : arrows) {
      if (forward) {
        adj[a.source].push_back(a.target);
      } else {
        adj[a.target].push_back(a.source);
      }
    }
    std::vector<char> seen(nv, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int w : adj[v])
        if (!seen[w]) {
          seen[w] = 1;
          ++count;
          stack.push_back(w);
        }
    }
    return count == nv;
  };
  return reach(true) && reach(false);
}

FoldingAutomaton build_automaton(const StratumSpec& stratum, int punctures) {
  FoldingAutomaton out;
  out.stratum = stratum.normalized();
  out.punctures = punctures;
  const std::vector<TrainTrack> tracks = enumerate_tracks(stratum, punctures);
  if (tracks.empty()) {
    out.finalize();
    return out;
  }
  out.edge_count = tracks.front().edge_count();
  for (const auto& t : tracks) out.vertices.push_back(canonical_form(t).code);
  std::map<CanonicalCode, int> index;
  for (int v = 0; v < static_cast<int>(out.vertices.size()); ++v) index[out.vertices[v]] = v;

  for (int v = 0; v < static_cast<int>(tracks.size()); ++v) {
    for (auto& mv : fold_moves(tracks[v])) {
      const auto it = index.find(mv.target.code);
      if (it == index.end()) throw StructureError("fold leaves the stratum");
      mv.arrow.source = v;
      mv.arrow.target = it->second;
      out.arrows.push_back(std::move(mv.arrow));
    }
  }
  for (auto& a : isomorphism_arrows(tracks)) out.arrows.push_back(std::move(a));
  out.finalize();
  return out;
}

int apply_annotations(FoldingAutomaton& automaton, const std::vector<ArrowAnnotation>& notes) {
  int applied = 0;
  for (const auto& note : notes) {
    const int s = automaton.vertex_index(note.source);
    const int t = automaton.vertex_index(note.target);
    bool hit = false;
    for (auto& a : automaton.arrows) {
      if (a.source == s && a.target == t && a.permutation == note.permutation && a.rule_from == note.rule_from &&
          a.rule_to == note.rule_to) {
        a.identity = note.identity;
        a.braid = note.braid;
        hit = true;
        ++applied;
        break;
      }
    }
    if (!hit) throw DomainError("annotation matches no arrow of the automaton");
  }
  return applied;
}

TransMatrix path_matrix(const FoldingAutomaton& automaton, const std::vector<int>& word) {
  TransMatrix m = TransMatrix::identity(automaton.edge_count);
  int at = -1;
  for (int a : word) {
    if (a < 0 || a >= static_cast<int>(automaton.arrows.size())) throw DomainError("arrow index out of range");
    const FoldArrow& fa = automaton.arrows[a];
    if (at >= 0 && fa.source != at) throw DomainError("arrow word is not a path");
    at = fa.target;
    m = m * fa.matrix();
  }
  return m;
}

}  // namespace braidmin
