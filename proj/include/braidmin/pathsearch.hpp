#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "braidmin/automaton.hpp"
#include "braidmin/polynomial.hpp"

namespace braidmin {

/// Raised when a search exceeds a configured resource cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A loop power gamma^(N+k) that never needs to appear in a minimal path:
/// M(gamma)^(N+k) has the pattern of M(gamma)^N and dominates it.
struct AvoidWord {
  std::vector<int> loop;  // primitive closed arrow word gamma
  int base = 0;           // N
  int period = 0;         // k
  std::vector<int> word() const;  // gamma repeated N+k times
};

struct AvoidSet {
  int max_loop_len = 0;
  int probe_limit = 0;
  std::vector<AvoidWord> words;
};

/// Loops up to max_loop_len arrows; each loop gets the least N+k (then least
/// N) with N, k >= 1 and N+k <= probe_limit. Loops without such a pair, or
/// whose powers overflow, are skipped.
AvoidSet build_avoid_set(const FoldingAutomaton& automaton, int max_loop_len, int probe_limit = 12);

/// Multi-pattern matcher over arrow words.
class AvoidMatcher {
 public:
  AvoidMatcher(const AvoidSet& avoid, int alphabet);
  int start() const { return 0; }
  /// Next state, or -1 when a forbidden word ends here.
  int step(int state, int arrow) const { return delta_[static_cast<std::size_t>(state) * alphabet_ + arrow]; }
  bool contains_forbidden(const std::vector<int>& word) const;

 private:
  int alphabet_ = 0;
  std::vector<int> delta_;
};

struct SearchOptions {
  double lambda_bound = 0;
  std::optional<std::int64_t> maxnorm;  // default max_norm_bound(lambda_bound, E)
  std::optional<std::int64_t> sum_threshold;  // default max(3, floor(lambda_bound) + 1)
  bool equality_bucket = false;
  int threads = 1;
  double tol = 1e-9;
  std::int64_t max_layer_paths = 400'000'000;
  std::int64_t max_memory_bytes = std::int64_t{24} << 30;
  bool progress = false;  // per-layer lines on stderr
};

struct SearchStats {
  std::int64_t layers = 0;
  std::int64_t paths_expanded = 0;   // extensions generated
  std::int64_t paths_kept = 0;
  std::int64_t pruned_norm = 0;
  std::int64_t pruned_sum = 0;
  std::int64_t pruned_avoid = 0;
  std::int64_t closed_paths = 0;
  std::int64_t pf_closed = 0;
  std::int64_t eigen_tested = 0;     // characteristic polynomials examined
  std::int64_t max_layer_paths = 0;
  std::int64_t max_norm_seen = 0;
  std::int64_t max_length = 0;
  std::int64_t peak_layer_bytes = 0;
};

struct Candidate {
  int start = 0;
  std::vector<int> word;  // least cyclic rotation
  TransMatrix matrix;
  IntPolynomial char_poly;
  IntPolynomial min_poly;
  RootEnclosure dilatation;
  int compare_to_bound = -1;  // -1 below the bound, 0 equal
  int rotation_class = 0;
  int mirror_class = 0;
};

struct SearchResult {
  std::int64_t maxnorm = 0;
  std::int64_t sum_threshold = 0;
  std::vector<Candidate> candidates;  // strictly below the bound, by dilatation
  std::vector<Candidate> equality;    // exactly at the bound
  int rotation_classes = 0;
  int mirror_classes = 0;
  SearchStats stats;
};

std::int64_t default_sum_threshold(double lambda_bound);

enum class Rejection { None, NotClosed, NotPF, AboveBound, EqualBound };
std::string to_string(Rejection r);

struct Classification {
  Rejection reason = Rejection::None;
  std::optional<Candidate> candidate;  // set for None and EqualBound
};

/// Classifies a closed arrow word against the bound.
Classification classify_closed(const FoldingAutomaton& automaton, const std::vector<int>& word,
                               double lambda_bound, double tol = 1e-9);

/// One layer of paths: each entry is an arrow word.
using Layer = std::vector<std::vector<int>>;

/// Extensions by one arrow that avoid forbidden words, keep the entry sum
/// within maxnorm and keep some row and some column sum below sum_threshold.
Layer children(const Layer& layer, const FoldingAutomaton& automaton, std::int64_t maxnorm,
               const AvoidSet& avoid, std::int64_t sum_threshold);

/// Layered search for closed PF paths with dilatation below the bound.
SearchResult search(const FoldingAutomaton& automaton, const AvoidSet& avoid, const SearchOptions& options);

/// Least rotation of a cyclic word.
std::vector<int> least_rotation(const std::vector<int>& word);

}  // namespace braidmin
