#include "braidmin/track.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <sstream>

namespace braidmin {

namespace {

constexpr int kSideToken = -1;

// Flat counterclockwise slot list of a node: for each corner a side marker
// followed by the corner's legs.
std::vector<int> flat_slots(const Node& node) {
  std::vector<int> slots;
  for (const auto& corner : node.corners) {
    slots.push_back(kSideToken);
    slots.insert(slots.end(), corner.begin(), corner.end());
  }
  return slots;
}

struct SlotRef {
  int node;
  int slot;
};

struct Traversal {
  std::vector<std::vector<int>> slots;
  std::vector<std::array<SlotRef, 2>> leg_slots;  // per edge
};

Traversal make_traversal(const TrainTrack& track) {
  Traversal t;
  t.slots.reserve(track.nodes().size());
  t.leg_slots.assign(track.edge_count(), {SlotRef{-1, -1}, SlotRef{-1, -1}});
  std::vector<int> seen(track.edge_count(), 0);
  for (int n = 0; n < track.node_count(); ++n) {
    t.slots.push_back(flat_slots(track.nodes()[n]));
    const auto& s = t.slots.back();
    for (int i = 0; i < static_cast<int>(s.size()); ++i) {
      if (s[i] == kSideToken) continue;
      t.leg_slots[s[i]][seen[s[i]]++] = SlotRef{n, i};
    }
  }
  return t;
}

// Roots of the boundary walk: slots preceded by a leg of the same corner.
std::vector<SlotRef> walk_roots(const Traversal& t) {
  std::vector<SlotRef> roots;
  for (int n = 0; n < static_cast<int>(t.slots.size()); ++n) {
    const auto& s = t.slots[n];
    const int len = static_cast<int>(s.size());
    for (int i = 0; i < len; ++i) {
      if (s[i] != kSideToken && s[(i + len - 1) % len] != kSideToken) roots.push_back({n, i});
    }
  }
  return roots;
}

struct WalkResult {
  CanonicalCode code;
  std::vector<int> edge_map;
};

WalkResult walk(const TrainTrack& track, const Traversal& t, SlotRef root) {
  const int edges = track.edge_count();
  WalkResult r;
  r.edge_map.assign(edges, -1);
  std::vector<SlotRef> discovered{root};
  std::vector<char> node_seen(track.node_count(), 0);
  node_seen[root.node] = 1;
  int next_label = 0;
  int legs = 0;
  SlotRef cur = root;
  while (legs < 2 * edges) {
    const auto& s = t.slots[cur.node];
    const int len = static_cast<int>(s.size());
    const int token = s[cur.slot % len];
    if (token == kSideToken) {
      cur.slot = (cur.slot + 1) % len;
      continue;
    }
    ++legs;
    if (r.edge_map[token] < 0) r.edge_map[token] = next_label++;
    const auto& [a, b] = t.leg_slots[token];
    const SlotRef other = (a.node == cur.node && a.slot == cur.slot % len) ? b : a;
    if (!node_seen[other.node]) {
      node_seen[other.node] = 1;
      discovered.push_back(other);
    }
    cur = SlotRef{other.node, (other.slot + 1) % static_cast<int>(t.slots[other.node].size())};
  }
  r.code = {edges, track.node_count()};
  for (const auto& d : discovered) {
    const auto& s = t.slots[d.node];
    const int len = static_cast<int>(s.size());
    r.code.push_back(static_cast<int>(track.nodes()[d.node].kind));
    r.code.push_back(len);
    for (int j = 0; j < len; ++j) {
      const int token = s[(d.slot + j) % len];
      r.code.push_back(token == kSideToken ? 0 : r.edge_map[token] + 1);
    }
  }
  return r;
}

bool structurally_sound(const std::vector<Violation>& v) {
  for (auto x : v) {
    switch (x) {
      case Violation::UnpuncturedSmallPolygon:
      case Violation::PuncturedEmptyPolygon:
      case Violation::BoundaryWithoutCusp:
      case Violation::CuspAwayFromMultigon:
        break;
      default:
        return false;
    }
  }
  return true;
}

}  // namespace

std::string to_string(Violation v) {
  switch (v) {
    case Violation::NoExpandingEdges: return "track has no expanding edges";
    case Violation::BadEdgeEnds: return "an expanding edge does not have exactly two ends";
    case Violation::EdgeLabelRange: return "expanding edge labels are not 0..E-1";
    case Violation::EmptyCorner: return "a corner carries no expanding edge";
    case Violation::SelfLoop: return "an expanding edge joins a polygon to itself";
    case Violation::Disconnected: return "track is disconnected";
    case Violation::ExpandingRegion:
      return "a region away from the boundary puncture is bounded by expanding edges";
    case Violation::UnpuncturedSmallPolygon: return "unpunctured region with fewer than 3 cusps";
    case Violation::PuncturedEmptyPolygon: return "punctured region with no cusp";
    case Violation::BoundaryWithoutCusp: return "boundary region has no cusp";
    case Violation::CuspAwayFromMultigon:
      return "cusp between expanding edges away from an infinitesimal multigon";
  }
  return "unknown violation";
}

TrainTrack::TrainTrack(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  int legs = 0;
  int max_id = -1;
  for (const auto& n : nodes_)
    for (const auto& c : n.corners)
      for (int e : c) {
        ++legs;
        max_id = std::max(max_id, e);
      }
  edge_count_ = std::max(legs / 2, max_id + 1);
}

std::pair<LegPosition, LegPosition> TrainTrack::ends(int e) const {
  std::vector<LegPosition> found;
  for (int n = 0; n < node_count(); ++n)
    for (int c = 0; c < static_cast<int>(nodes_[n].corners.size()); ++c)
      for (int i = 0; i < static_cast<int>(nodes_[n].corners[c].size()); ++i)
        if (nodes_[n].corners[c][i] == e) found.push_back({n, c, i});
  if (found.size() != 2) throw StructureError("edge " + std::to_string(e) + " does not have two ends");
  return {found[0], found[1]};
}

int TrainTrack::boundary_cusp_count() const {
  int cusps = 0;
  for (const auto& n : nodes_)
    for (const auto& c : n.corners)
      if (!c.empty()) cusps += static_cast<int>(c.size()) - 1;
  return cusps;
}

TrainTrack TrainTrack::mirrored() const {
  std::vector<Node> m = nodes_;
  for (auto& n : m) {
    std::reverse(n.corners.begin(), n.corners.end());
    for (auto& c : n.corners) std::reverse(c.begin(), c.end());
  }
  return TrainTrack(std::move(m));
}

TrainTrack TrainTrack::from_code(const CanonicalCode& code) {
  if (code.size() < 2) throw StructureError("canonical code too short");
  const int edges = code[0];
  const int count = code[1];
  std::size_t pos = 2;
  std::vector<Node> nodes;
  for (int n = 0; n < count; ++n) {
    if (pos + 2 > code.size()) throw StructureError("canonical code truncated");
    const int kind = code[pos];
    const int len = code[pos + 1];
    pos += 2;
    if (kind < 0 || kind > 2 || len < 0 || pos + len > code.size())
      throw StructureError("malformed canonical code");
    std::vector<int> slots(code.begin() + pos, code.begin() + pos + len);
    pos += len;
    const auto first_side = std::find(slots.begin(), slots.end(), 0);
    if (first_side == slots.end()) throw StructureError("node without an infinitesimal side");
    std::rotate(slots.begin(), first_side, slots.end());
    Node node{static_cast<NodeKind>(kind), {}};
    for (int token : slots) {
      if (token == 0) {
        node.corners.emplace_back();
      } else {
        if (token > edges) throw StructureError("edge label out of range in canonical code");
        node.corners.back().push_back(token - 1);
      }
    }
    nodes.push_back(std::move(node));
  }
  if (pos != code.size()) throw StructureError("trailing data in canonical code");
  return TrainTrack(std::move(nodes));
}

std::vector<Violation> validate(const TrainTrack& track) {
  std::vector<Violation> out;
  const int edges = track.edge_count();
  if (edges == 0) out.push_back(Violation::NoExpandingEdges);

  std::vector<int> occurrences(edges, 0);
  std::vector<std::vector<int>> edge_nodes(edges);
  bool range_ok = true;
  bool empty_corner = false;
  for (int n = 0; n < track.node_count(); ++n) {
    for (const auto& c : track.nodes()[n].corners) {
      if (c.empty()) empty_corner = true;
      for (int e : c) {
        if (e < 0 || e >= edges) {
          range_ok = false;
          continue;
        }
        ++occurrences[e];
        edge_nodes[e].push_back(n);
      }
    }
  }
  if (std::any_of(occurrences.begin(), occurrences.end(), [](int k) { return k != 2; }))
    out.push_back(Violation::BadEdgeEnds);
  if (!range_ok) out.push_back(Violation::EdgeLabelRange);
  if (empty_corner) out.push_back(Violation::EmptyCorner);

  bool self_loop = false;
  std::vector<int> parent(track.node_count());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  int merges = 0;
  for (const auto& ns : edge_nodes) {
    if (ns.size() != 2) continue;
    if (ns[0] == ns[1]) {
      self_loop = true;
      continue;
    }
    const int a = find(ns[0]);
    const int b = find(ns[1]);
    if (a != b) {
      parent[a] = b;
      ++merges;
    }
  }
  if (self_loop) out.push_back(Violation::SelfLoop);
  if (track.node_count() > 0 && merges != track.node_count() - 1) out.push_back(Violation::Disconnected);
  if (edges > track.node_count() - 1 && track.node_count() > 0) out.push_back(Violation::ExpandingRegion);

  bool small_unpunctured = false;
  bool empty_punctured = false;
  bool bare_cusp = false;
  for (const auto& n : track.nodes()) {
    const int k = static_cast<int>(n.corners.size());
    switch (n.kind) {
      case NodeKind::Polygon:
        if (k < 3) small_unpunctured = true;
        break;
      case NodeKind::Punctured:
        if (k < 1) empty_punctured = true;
        break;
      case NodeKind::Switch:
        for (const auto& c : n.corners)
          if (c.size() > 1) bare_cusp = true;
        break;
    }
  }
  if (small_unpunctured) out.push_back(Violation::UnpuncturedSmallPolygon);
  if (empty_punctured) out.push_back(Violation::PuncturedEmptyPolygon);
  if (track.boundary_cusp_count() < 1) out.push_back(Violation::BoundaryWithoutCusp);
  if (bare_cusp) out.push_back(Violation::CuspAwayFromMultigon);
  return out;
}

void require_valid(const TrainTrack& track) {
  const auto v = validate(track);
  if (!v.empty()) throw StructureError("invalid train track: " + to_string(v.front()));
}

std::vector<CuspPosition> cusps(const TrainTrack& track) {
  const auto v = validate(track);
  if (!structurally_sound(v)) throw StructureError("invalid train track: " + to_string(v.front()));
  std::vector<CuspPosition> out;
  for (int n = 0; n < track.node_count(); ++n) {
    const auto& corners = track.nodes()[n].corners;
    for (int c = 0; c < static_cast<int>(corners.size()); ++c)
      for (int i = 0; i + 1 < static_cast<int>(corners[c].size()); ++i) out.push_back({n, c, i});
  }
  return out;
}

CanonicalForm canonical_form(const TrainTrack& track) {
  require_valid(track);
  const Traversal t = make_traversal(track);
  std::optional<WalkResult> best;
  std::vector<std::vector<int>> best_maps;
  for (const auto& root : walk_roots(t)) {
    WalkResult r = walk(track, t, root);
    if (!best || r.code < best->code) {
      best_maps = {r.edge_map};
      best = std::move(r);
    } else if (r.code == best->code) {
      best_maps.push_back(r.edge_map);
    }
  }
  CanonicalForm form;
  form.code = best->code;
  form.edge_map = best->edge_map;
  form.track = TrainTrack::from_code(form.code);
  form.automorphisms = static_cast<int>(best_maps.size());
  std::vector<int> inverse(track.edge_count());
  for (int e = 0; e < track.edge_count(); ++e) inverse[form.edge_map[e]] = e;
  for (const auto& m : best_maps) {
    std::vector<int> aut(track.edge_count());
    for (int c = 0; c < track.edge_count(); ++c) aut[c] = m[inverse[c]];
    form.automorphism_maps.push_back(std::move(aut));
  }
  return form;
}

int StratumSpec::euler_sum_twice() const {
  int s = 0;
  for (const auto& x : singularities) s += (2 - x.prongs) * x.count;
  return s;
}

bool StratumSpec::consistent() const {
  for (const auto& x : singularities) {
    if (x.count < 0 || x.prongs < 1) return false;
    if (!x.punctured && x.prongs < 3 && x.count > 0) return false;
  }
  if (euler_sum_twice() != 4) return false;
  if (boundary_prongs && count(*boundary_prongs, true) < 1) return false;
  return true;
}

int StratumSpec::puncture_count() const {
  int p = 0;
  for (const auto& x : singularities)
    if (x.punctured) p += x.count;
  return p;
}

int StratumSpec::count(int prongs, bool punctured) const {
  int c = 0;
  for (const auto& x : singularities)
    if (x.prongs == prongs && x.punctured == punctured) c += x.count;
  return c;
}

StratumSpec StratumSpec::normalized() const {
  std::map<std::pair<int, bool>, int> merged;
  for (const auto& x : singularities)
    if (x.count > 0) merged[{x.prongs, !x.punctured}] += x.count;
  StratumSpec out;
  out.boundary_prongs = boundary_prongs;
  for (const auto& [key, c] : merged) out.singularities.push_back({key.first, !key.second, c});
  return out;
}

std::string StratumSpec::to_string() const {
  std::ostringstream os;
  bool first = true;
  for (const auto& x : normalized().singularities) {
    if (!first) os << ',';
    first = false;
    os << x.prongs << (x.punctured ? 'p' : 'u') << x.count;
  }
  if (boundary_prongs) os << ",b" << *boundary_prongs;
  return os.str();
}

StratumSpec parse_stratum(const std::string& text, int interior_punctures) {
  const int p = interior_punctures;
  StratumSpec spec;
  if (text == "two-trigon") {
    spec = {{{1, true, p + 1}, {3, false, 2}}, 1};
  } else if (text == "one-trigon") {
    spec = {{{1, true, p + 1}, {3, false, 1}}, 1};
  } else if (text == "four-prong") {
    spec = {{{1, true, p + 1}, {4, false, 1}}, 1};
  } else if (text == "boundary-3prong") {
    spec = {{{1, true, p}, {3, true, 1}}, 3};
  } else {
    std::istringstream is(text);
    std::string tok;
    while (std::getline(is, tok, ',')) {
      if (tok.empty()) throw DomainError("empty token in stratum '" + text + "'");
      try {
        if (tok[0] == 'b') {
          spec.boundary_prongs = std::stoi(tok.substr(1));
          continue;
        }
        std::size_t used = 0;
        const int k = std::stoi(tok, &used);
        if (used >= tok.size() || (tok[used] != 'p' && tok[used] != 'u'))
          throw DomainError("bad stratum token '" + tok + "'");
        const int c = std::stoi(tok.substr(used + 1));
        spec.singularities.push_back({k, tok[used] == 'p', c});
      } catch (const std::invalid_argument&) {
        throw DomainError("bad stratum token '" + tok + "'");
      } catch (const std::out_of_range&) {
        throw DomainError("bad stratum token '" + tok + "'");
      }
    }
    spec = spec.normalized();
  }
  if (!spec.consistent())
    throw DomainError("stratum " + spec.to_string() + " violates sum (1 - k/2) n_k = 2");
  if (interior_punctures >= 0 && spec.puncture_count() != interior_punctures + 1)
    throw DomainError("stratum " + spec.to_string() + " does not have " +
                      std::to_string(interior_punctures + 1) + " punctures");
  return spec;
}

TrackShape track_shape(const StratumSpec& spec) {
  if (!spec.consistent()) throw DomainError("inconsistent stratum " + spec.to_string());
  if (!spec.boundary_prongs) throw DomainError("stratum " + spec.to_string() + " has no boundary prong count");
  TrackShape shape;
  shape.boundary_cusps = *spec.boundary_prongs;
  bool boundary_taken = false;
  for (const auto& x : spec.normalized().singularities) {
    for (int i = 0; i < x.count; ++i) {
      if (x.punctured && !boundary_taken && x.prongs == shape.boundary_cusps) {
        boundary_taken = true;
        continue;
      }
      shape.nodes.emplace_back(x.punctured ? NodeKind::Punctured : NodeKind::Polygon, x.prongs);
    }
  }
  std::sort(shape.nodes.begin(), shape.nodes.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return static_cast<int>(a.first) > static_cast<int>(b.first);
    return a.second > b.second;
  });
  return shape;
}

std::vector<std::string> check_stratum(const TrainTrack& track, const StratumSpec& spec) {
  std::vector<std::string> out;
  const TrackShape shape = track_shape(spec);
  std::vector<std::pair<NodeKind, int>> have;
  for (const auto& n : track.nodes()) have.emplace_back(n.kind, static_cast<int>(n.corners.size()));
  auto key = [](const auto& a, const auto& b) {
    if (a.first != b.first) return static_cast<int>(a.first) > static_cast<int>(b.first);
    return a.second > b.second;
  };
  std::sort(have.begin(), have.end(), key);
  if (have != shape.nodes) out.push_back("complementary regions do not match stratum " + spec.to_string());
  if (track.boundary_cusp_count() != shape.boundary_cusps)
    out.push_back("boundary region has " + std::to_string(track.boundary_cusp_count()) + " cusps, expected " +
                  std::to_string(shape.boundary_cusps));
  return out;
}

}  // namespace braidmin
