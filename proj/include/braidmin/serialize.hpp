#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "braidmin/automaton.hpp"
#include "braidmin/certify.hpp"

namespace braidmin {

using Json = nlohmann::json;

inline constexpr int kFormatVersion = 1;
inline constexpr const char* kToolVersion = "braidmin 1.0.0";

/// Raised when a file cannot be read or written.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised on malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string sha256_hex(const std::string& bytes);

/// SHA-256 of the canonical dump of `j` without its "digest" member.
std::string content_digest(const Json& j);

/// Adds the "digest" member.
Json with_digest(Json j);

Json automaton_to_json(const FoldingAutomaton& a);
/// Validates structure, matrices and digest.
FoldingAutomaton automaton_from_json(const Json& j);

std::vector<ArrowAnnotation> annotations_from_json(const Json& j);

Json avoid_to_json(const AvoidSet& avoid);
Json candidate_to_json(const Candidate& c);
Json stats_to_json(const SearchStats& s);
/// Counters that depend on the machine (timings, memory) are not included.
Json record_to_json(const StratumRecord& r);

/// Certificate for a single search (no global conclusion).
Json search_certificate(const StratumRecord& r, const Json& invocation);
Json certify_certificate(const CertifyRun& run, const Json& invocation);

Json config_to_json(const CertifyConfig& c);
CertifyConfig config_from_json(const Json& j);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> lines;
  void fail(std::string msg) {
    ok = false;
    lines.push_back("FAIL " + std::move(msg));
  }
};

/// Recomputes every candidate from the embedded automata and checks the
/// stored matrices, polynomials, intervals, conclusion and digests.
VerifyReport verify_certificate(const Json& certificate, double tol = 1e-9);

Json read_json_file(const std::string& path);
/// Writes the key-sorted dump, indented by one space, followed by a newline.
void write_json_file(const std::string& path, const Json& j);

}  // namespace braidmin
