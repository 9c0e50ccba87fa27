#pragma once

#include <optional>
#include <string>
#include <vector>

#include "braidmin/braid.hpp"
#include "braidmin/track.hpp"
#include "braidmin/transmatrix.hpp"

namespace braidmin {

enum class ArrowKind : int { Fold = 0, Isomorphism = 1 };

std::string to_string(ArrowKind k);

/// One arrow of a folding automaton. Edge labels are 0-based canonical labels:
/// source edge j maps onto target edge permutation[j], and for a fold the
/// edge rule_from additionally runs over target edge rule_to.
struct FoldArrow {
  int source = -1;
  int target = -1;
  std::vector<int> permutation;
  int rule_from = -1;
  int rule_to = -1;
  ArrowKind kind = ArrowKind::Fold;
  std::optional<bool> identity;  // unknown unless curated
  std::optional<BraidWord> braid;

  TransMatrix matrix() const;

  friend bool operator==(const FoldArrow&, const FoldArrow&) = default;
};

/// Result of folding one cusp of a track.
struct FoldMove {
  CuspPosition cusp;
  bool first_over_second = true;  // the earlier leg of the cusp is folded along the later one
  int mover = -1;                 // edge that slides, in source labels
  int along = -1;                 // edge it slides over, in source labels
  CanonicalForm target;
  FoldArrow arrow;                // source/target indices left unset
};

/// Two moves per cusp, in cusp order.
std::vector<FoldMove> fold_moves(const TrainTrack& track);

/// Canonical codes of all tracks folding onto `track` by one move.
std::vector<CanonicalCode> split_moves(const TrainTrack& track);

/// Complete duplicate-free list of canonical tracks of the stratum, sorted by code.
std::vector<TrainTrack> enumerate_tracks(const StratumSpec& stratum, int punctures);

/// Nontrivial self-isomorphisms of canonical tracks, as permutation arrows.
/// Source and target are indices into `tracks`.
std::vector<FoldArrow> isomorphism_arrows(const std::vector<TrainTrack>& tracks);

struct FoldingAutomaton {
  StratumSpec stratum;
  int punctures = 0;  // interior punctures
  int edge_count = 0;
  std::vector<CanonicalCode> vertices;
  std::vector<FoldArrow> arrows;

  // Derived by finalize().
  std::vector<std::vector<int>> outgoing;
  std::vector<int> mirror_vertex;
  std::vector<int> mirror_arrow;  // -1 when no matching arrow exists

  void finalize();
  int vertex_index(const CanonicalCode& code) const;
  TrainTrack track(int v) const { return TrainTrack::from_code(vertices.at(v)); }

  int fold_arrow_count() const;
  int isomorphism_arrow_count() const;
  /// Distinct ordered (source, target) pairs joined by some arrow.
  int connection_count() const;
  bool strongly_connected() const;
};

/// Empty automaton (no vertices) when the stratum has no valid tracks.
FoldingAutomaton build_automaton(const StratumSpec& stratum, int punctures);

/// Curated data for one arrow, keyed by (source, target, permutation, rule).
struct ArrowAnnotation {
  CanonicalCode source;
  CanonicalCode target;
  std::vector<int> permutation;
  int rule_from = -1;
  int rule_to = -1;
  std::optional<bool> identity;
  std::optional<BraidWord> braid;
};

/// Merges annotations; throws DomainError naming an annotation that matches no arrow.
int apply_annotations(FoldingAutomaton& automaton, const std::vector<ArrowAnnotation>& notes);

/// Product of arrow matrices along a word; throws DomainError if it is not a path.
TransMatrix path_matrix(const FoldingAutomaton& automaton, const std::vector<int>& word);

}  // namespace braidmin
