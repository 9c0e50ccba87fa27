#include "doctest.h"

#include <cmath>
#include <map>
#include <set>

#include "braidmin/certify.hpp"
#include "oracles.hpp"

using namespace braidmin;

namespace {

const CertifyRun& preset_run(int strands) {
  static std::map<int, CertifyRun> cache;
  auto it = cache.find(strands);
  if (it == cache.end()) it = cache.emplace(strands, certify(preset_config(strands))).first;
  return it->second;
}

bool mentions(const std::vector<std::string>& failures, const std::string& text) {
  for (const auto& f : failures)
    if (f.find(text) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("strata agree with a brute-force Diophantine enumeration") {
  for (int p = 1; p <= 9; ++p) {
    std::set<std::string> got;
    for (const auto& s : enumerate_strata(p)) {
      CHECK(s.consistent());
      CHECK(got.insert(s.to_string()).second);
    }
    CHECK(got == oracle::brute_strata(p));
  }
  CHECK_THROWS_AS(enumerate_strata(0), DomainError);
}

TEST_CASE("six punctures give the five cases in order") {
  std::vector<std::string> names;
  for (const auto& s : enumerate_strata(6)) names.push_back(s.to_string());
  CHECK(names == std::vector<std::string>{"1p6,4u1", "1p6,3u2", "1p5,3p1", "1p5,2p1,3u1", "1p4,2p2"});
  std::vector<std::string> five;
  for (const auto& s : enumerate_strata(5)) five.push_back(s.to_string());
  CHECK(five == std::vector<std::string>{"1p5,3u1", "1p4,2p1"});
}

TEST_CASE("stratum resolution") {
  SUBCASE("four 1-prongs and punctured 2-prongs are analytic") {
    const auto r = resolve_stratum(parse_stratum("1p4,2p2", 5));
    CHECK(r.kind == Resolution::Analytic);
    CHECK(r.analytic_poly == IntPolynomial::from_descending({1, -3, 1}));
    CHECK(verify_root(r.analytic_poly, 2.61803, 1e-5));
    CHECK(compare_largest_root(r.analytic_poly, 1.72208) > 0);
  }
  SUBCASE("a punctured 2-prong next to a 3-prong reduces") {
    const auto r = resolve_stratum(parse_stratum("1p5,2p1,3u1", 5));
    CHECK(r.kind == Resolution::Reduction);
    CHECK(r.reduces_to.to_string() == "1p5,3p1");
    CHECK_FALSE(r.justification.empty());
  }
  SUBCASE("search strata carry the boundary at a maximal punctured singularity") {
    const auto two = resolve_stratum(parse_stratum("two-trigon", 5));
    CHECK(two.kind == Resolution::Search);
    CHECK(two.search_spec == parse_stratum("two-trigon", 5));
    const auto b3 = resolve_stratum(parse_stratum("1p5,3p1", 5));
    CHECK(b3.search_spec == parse_stratum("boundary-3prong", 5));
    CHECK(resolve_stratum(parse_stratum("four-prong", 5)).search_spec == parse_stratum("four-prong", 5));
  }
  SUBCASE("unclassifiable and inconsistent strata") {
    StratumSpec s;
    s.singularities = {{1, true, 5}, {2, true, 1}, {3, true, 1}};
    CHECK_THROWS_AS(resolve_stratum(s), DomainError);
    StratumSpec bad;
    bad.singularities = {{1, true, 3}};
    CHECK_THROWS_AS(resolve_stratum(bad), DomainError);
  }
}

TEST_CASE("five-strand preset certifies the minimum") {
  const CertifyRun& run = preset_run(5);
  const Conclusion& c = run.conclusion;
  CHECK(c.certified);
  CHECK(c.failures.empty());
  CHECK(std::abs(c.minimum.mid() - 1.72208) <= 1e-5);
  CHECK(c.min_poly == IntPolynomial::from_descending({1, -1, -1, -1, 1}));
  CHECK(c.witness_stratum == 3);
  REQUIRE(run.records.size() == 5);
  CHECK(std::abs(run.records[0].lower_bound() - 2.15372) <= 1e-5);
  CHECK(run.records[1].lower_bound() > 2.01);
  CHECK(std::abs(run.records[1].lower_bound() - 2.01536) <= 1e-5);
  CHECK(run.records[2].lower_bound() == doctest::Approx(c.minimum.lo));
  CHECK(std::isinf(run.records[3].lower_bound()));
  CHECK(std::abs(run.records[4].lower_bound() - 2.61803) <= 1e-5);
  for (const auto& r : run.records)
    if (r.search) {
      CHECK(r.search->maxnorm >= r.maxnorm_default);
      for (const auto& cand : r.search->candidates) CHECK(divides(cand.min_poly, cand.char_poly));
    }
}

TEST_CASE("four-strand preset certifies the minimum") {
  const CertifyRun& run = preset_run(4);
  CHECK(run.conclusion.certified);
  CHECK(std::abs(run.conclusion.minimum.mid() - 2.29663) <= 1e-5);
  CHECK(run.conclusion.min_poly == IntPolynomial::from_descending({1, -2, 0, -2, 1}));
  CHECK(run.records.size() == 2);
}

TEST_CASE("missing records fail certification") {
  const CertifyRun& run = preset_run(5);
  for (std::size_t drop = 0; drop < run.records.size(); ++drop) {
    std::vector<StratumRecord> records;
    for (std::size_t i = 0; i < run.records.size(); ++i)
      if (i != drop) records.push_back(run.records[i]);
    const Conclusion c = certify_minimum(records, 5);
    CHECK_FALSE(c.certified);
    CHECK(mentions(c.failures, "(" + std::to_string(drop + 1) + ")"));
  }
  CertifyConfig cfg = preset_config(5);
  cfg.strata.erase(cfg.strata.begin() + 1);
  const CertifyRun partial = certify(cfg);
  CHECK_FALSE(partial.conclusion.certified);
  CHECK(mentions(partial.conclusion.failures, "1p6,3u2 has no record"));
}

TEST_CASE("a stratum undercutting the minimum fails certification") {
  CertifyConfig cfg = preset_config(5);
  cfg.strata[1].lambda_bound = 1.5;  // two-trigon: no candidates, bound 1.5 below the minimum
  const CertifyRun run = certify(cfg);
  CHECK_FALSE(run.conclusion.certified);
  CHECK(mentions(run.conclusion.failures, "(2)"));
}

TEST_CASE("a search below the norm bound fails certification") {
  CertifyConfig cfg = preset_config(5);
  cfg.strata[2].maxnorm = 9;
  const CertifyRun run = certify(cfg);
  CHECK_FALSE(run.conclusion.certified);
  CHECK(mentions(run.conclusion.failures, "below the norm bound"));
}

TEST_CASE("configured strata must match the puncture count") {
  CertifyConfig cfg = preset_config(4);
  cfg.strata.push_back({"1p6,3u2", 2.0});
  CHECK_THROWS_AS(certify(cfg), DomainError);
  CHECK_THROWS_AS(preset_config(6), DomainError);
}

TEST_CASE("certification does not depend on the thread count") {
  CertifyConfig cfg = preset_config(5);
  cfg.threads = 4;
  const CertifyRun run = certify(cfg);
  const CertifyRun& one = preset_run(5);
  REQUIRE(run.records.size() == one.records.size());
  for (std::size_t i = 0; i < run.records.size(); ++i) {
    if (!one.records[i].search) continue;
    const auto& a = one.records[i].search->candidates;
    const auto& b = run.records[i].search->candidates;
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].word == b[k].word);
  }
  CHECK(run.conclusion.witness_word == one.conclusion.witness_word);
}
