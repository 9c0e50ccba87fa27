#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace braidmin {

/// Raised when an operation needs a structurally valid train track.
class StructureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on inconsistent singularity data or out-of-domain arguments.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

enum class NodeKind : int {
  Punctured = 0,  // infinitesimal polygon enclosing an interior puncture
  Polygon = 1,    // unpunctured infinitesimal polygon (non-punctured singularity)
  Switch = 2,     // bare switch between expanding edges, outside the local models
};

/// An infinitesimal polygon (or a bare switch) of a train track.
///
/// `corners` lists the corners in counterclockwise order; each corner holds
/// the expanding-edge legs attached there, again counterclockwise. An
/// infinitesimal side sits between consecutive corners. Consecutive legs of
/// one corner bound a cusp of the region containing the boundary puncture.
/// A bare switch stores its two sides as two "corners".
struct Node {
  NodeKind kind = NodeKind::Punctured;
  std::vector<std::vector<int>> corners;

  friend bool operator==(const Node&, const Node&) = default;
};

/// A position between two consecutive legs of a corner.
struct CuspPosition {
  int node = 0;
  int corner = 0;
  int index = 0;  // cusp lies between legs `index` and `index + 1`

  friend bool operator==(const CuspPosition&, const CuspPosition&) = default;
  friend auto operator<=>(const CuspPosition&, const CuspPosition&) = default;
};

/// One end of an expanding edge.
struct LegPosition {
  int node = 0;
  int corner = 0;
  int index = 0;
};

/// Canonical code: a flat integer sequence
/// `[E, N, (kind, slot_count, slots...)*N]` where a slot is 0 for an
/// infinitesimal side and 1..E for an expanding-edge leg.
using CanonicalCode = std::vector<int>;

enum class Violation : int {
  NoExpandingEdges,
  BadEdgeEnds,           // an edge id does not occur exactly twice
  EdgeLabelRange,        // edge ids are not exactly 0..E-1
  EmptyCorner,           // a corner with no legs
  SelfLoop,              // both ends of an edge on one node
  Disconnected,
  ExpandingRegion,       // a region other than the boundary one bounded by expanding edges
  UnpuncturedSmallPolygon,
  PuncturedEmptyPolygon,
  BoundaryWithoutCusp,   // region of the boundary puncture would be a 0-gon
  CuspAwayFromMultigon,  // cusp at a bare switch
};

std::string to_string(Violation v);

/// Combinatorial train track on a punctured disk: a tree of infinitesimal
/// polygons joined by expanding edges, with a planar rotation system.
/// The boundary puncture lives in the unique region touching expanding edges.
class TrainTrack {
 public:
  TrainTrack() = default;
  explicit TrainTrack(std::vector<Node> nodes);

  const std::vector<Node>& nodes() const { return nodes_; }
  int node_count() const { return static_cast<int>(nodes_.size()); }
  int edge_count() const { return edge_count_; }

  /// Both ends of edge `e`; requires a structurally sound track.
  std::pair<LegPosition, LegPosition> ends(int e) const;

  /// Number of cusps of the boundary region (its prong count).
  int boundary_cusp_count() const;

  TrainTrack mirrored() const;

  static TrainTrack from_code(const CanonicalCode& code);

  friend bool operator==(const TrainTrack&, const TrainTrack&) = default;

 private:
  std::vector<Node> nodes_;
  int edge_count_ = 0;
};

/// Order-stable list of violated invariants; empty iff the track is valid.
std::vector<Violation> validate(const TrainTrack& track);

/// Throws StructureError naming the first violated invariant.
void require_valid(const TrainTrack& track);

std::vector<CuspPosition> cusps(const TrainTrack& track);

struct CanonicalForm {
  CanonicalCode code;
  TrainTrack track;             // relabeled so that track == from_code(code)
  std::vector<int> edge_map;    // old edge id -> canonical edge id
  int automorphisms = 1;        // roots attaining the minimal code
  std::vector<std::vector<int>> automorphism_maps;  // canonical id -> canonical id
};

/// Minimum-over-roots serialization of the boundary traversal. Edge labels
/// follow the order of first appearance along the boundary word.
CanonicalForm canonical_form(const TrainTrack& track);

/// Singularity class of a measured foliation: `count` singularities with
/// `prongs` prongs each, punctured or not.
struct Singularity {
  int prongs = 1;
  bool punctured = true;
  int count = 1;

  friend bool operator==(const Singularity&, const Singularity&) = default;
  friend auto operator<=>(const Singularity&, const Singularity&) = default;
};

/// Singularity data of one search stratum on a punctured sphere.
/// The boundary puncture is one of the punctured singularities; when
/// `boundary_prongs` is unset the stratum is not tied to a track model.
struct StratumSpec {
  std::vector<Singularity> singularities;
  std::optional<int> boundary_prongs;

  /// Twice the Euler-characteristic sum, sum (2 - k) n_k; equals 4 on the sphere.
  int euler_sum_twice() const;
  bool consistent() const;
  int puncture_count() const;
  int count(int prongs, bool punctured) const;

  /// Merges duplicate classes and sorts; the form used for comparison.
  StratumSpec normalized() const;
  std::string to_string() const;

  friend bool operator==(const StratumSpec&, const StratumSpec&) = default;
};

/// Parses `1p6,3u2,b1` style strings (`p` punctured, `u` unpunctured,
/// `b` boundary prongs) or one of the named strata
/// (two-trigon, one-trigon, four-prong, boundary-3prong) for the given
/// number of interior punctures.
StratumSpec parse_stratum(const std::string& text, int interior_punctures);

/// Node multiset of tracks in a stratum: interior punctured singularities
/// become punctured polygons, non-punctured ones unpunctured polygons.
struct TrackShape {
  std::vector<std::pair<NodeKind, int>> nodes;  // (kind, corner count), sorted
  int boundary_cusps = 1;
};
TrackShape track_shape(const StratumSpec& spec);

/// Stratum conformance: node types and boundary prongs match `spec`.
std::vector<std::string> check_stratum(const TrainTrack& track, const StratumSpec& spec);

}  // namespace braidmin
