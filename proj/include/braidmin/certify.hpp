#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "braidmin/automaton.hpp"
#include "braidmin/pathsearch.hpp"

namespace braidmin {

/// Strata of pseudo-Anosov maps of the sphere with `punctures` punctured
/// singularities: solutions of sum (2 - k) n_k = 4 ordered by n_1
/// descending, then fewer singularities, then larger maximal prong count.
std::vector<StratumSpec> enumerate_strata(int punctures);

enum class Resolution { Search, Analytic, Reduction };
std::string to_string(Resolution r);

struct StratumResolution {
  Resolution kind = Resolution::Search;
  StratumSpec spec;            // as enumerated
  StratumSpec search_spec;     // with the boundary puncture chosen (search strata)
  StratumSpec reduces_to;      // reduction strata
  IntPolynomial analytic_poly; // analytic strata: lower bound is its largest root
  std::string justification;
};

/// Four 1-prongs after capping punctured 2-prongs: double cover to a torus,
/// lower bound (3 + sqrt 5) / 2. Other punctured 2-prongs: cap them and
/// puncture as many non-punctured singularities. Everything else is searched
/// with the boundary at a punctured singularity of maximal prong count.
StratumResolution resolve_stratum(const StratumSpec& spec);

/// Parameters for one stratum of a certification run.
struct StratumConfig {
  std::string stratum;  // name or n_k string, as accepted by parse_stratum
  double lambda_bound = 0;
  std::optional<std::int64_t> maxnorm;
  bool equality_bucket = false;
  int max_loop_len = 2;
  bool avoid = true;
};

struct CertifyConfig {
  int punctures = 5;  // interior punctures, i.e. braid strands
  double tol = 1e-9;
  int threads = 1;
  std::vector<StratumConfig> strata;
};

/// Defaults reproducing the 4- and 5-strand results.
CertifyConfig preset_config(int strands);

struct StratumRecord {
  int index = 0;  // 1-based position in enumerate_strata
  StratumResolution resolution;
  std::optional<FoldingAutomaton> automaton;
  double lambda_bound = 0;
  std::int64_t maxnorm_default = 0;
  bool equality_bucket = false;
  std::optional<AvoidSet> avoid;
  std::optional<SearchResult> search;
  RootEnclosure analytic_value;
  /// Certified lower bound for dilatations in this stratum.
  double lower_bound() const;
};

struct Conclusion {
  bool certified = false;
  std::vector<std::string> failures;
  RootEnclosure minimum;
  IntPolynomial min_poly;
  int witness_stratum = 0;
  std::vector<int> witness_word;
  std::optional<BraidWord> witness_braid;
};

StratumRecord run_stratum(const StratumSpec& spec, int index, const StratumConfig& cfg, const CertifyConfig& run);

/// Global minimum over the records; fails listing strata that are missing
/// or whose lower bound undercuts the minimum.
Conclusion certify_minimum(const std::vector<StratumRecord>& records, int punctures);

struct CertifyRun {
  CertifyConfig config;
  std::vector<StratumRecord> records;
  Conclusion conclusion;
};

/// Resolves every configured stratum and certifies the minimum. Strata
/// absent from the configuration are reported as missing.
CertifyRun certify(const CertifyConfig& config);

/// Unannotated arrows on the path (indices into the word).
struct Unannotated {
  std::vector<int> positions;
};

/// Concatenated braid annotations along the path; identity arrows contribute
/// nothing.
std::variant<BraidWord, Unannotated> compose_word(const std::vector<int>& word, const FoldingAutomaton& automaton);

}  // namespace braidmin
