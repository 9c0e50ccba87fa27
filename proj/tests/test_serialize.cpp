#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <functional>
#include <map>

#include "braidmin/serialize.hpp"

using namespace braidmin;

namespace {

const FoldingAutomaton& automaton(const std::string& name, int p) {
  static std::map<std::string, FoldingAutomaton> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, build_automaton(parse_stratum(name, p), p)).first;
  return it->second;
}

const Json& certificate4() {
  static const Json cert = [] {
    const CertifyConfig cfg = preset_config(4);
    return certify_certificate(certify(cfg), {{"command", "certify"}, {"config", config_to_json(cfg)}, {"punctures", 4}});
  }();
  return cert;
}

bool has_line(const VerifyReport& r, const std::string& text) {
  for (const auto& l : r.lines)
    if (l.rfind("FAIL ", 0) == 0 && l.find(text) != std::string::npos) return true;
  return false;
}

// Applies `edit` and re-stamps the digest so only the edited content is wrong.
Json tampered(Json j, const std::function<void(Json&)>& edit) {
  edit(j);
  return with_digest(std::move(j));
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("braidmin_test_" + name)).string();
}

}  // namespace

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  const Json j = with_digest({{"a", 1}, {"b", {1, 2}}});
  CHECK(j["digest"] == content_digest(j));
  CHECK(content_digest(j) == content_digest(Json{{"b", {1, 2}}, {"a", 1}}));
}

TEST_CASE("automaton round trip") {
  for (auto [name, p] : {std::pair{"two-trigon", 5}, std::pair{"1p4,2p1,b2", 4}, std::pair{"boundary-3prong", 5}}) {
    const FoldingAutomaton& a = automaton(name, p);
    const Json j = automaton_to_json(a);
    CHECK(j["format"] == "braidmin-automaton");
    CHECK(j["counts"]["vertices"] == a.vertices.size());
    const FoldingAutomaton b = automaton_from_json(j);
    CHECK(b.vertices == a.vertices);
    CHECK(b.arrows == a.arrows);
    CHECK(b.edge_count == a.edge_count);
    CHECK(b.stratum == a.stratum);
    CHECK(b.mirror_arrow == a.mirror_arrow);
    CHECK(automaton_to_json(b).dump() == j.dump());
    CHECK(Json::parse(j.dump()) == j);
  }
}

TEST_CASE("malformed automata are rejected") {
  const Json j = automaton_to_json(automaton("two-trigon", 5));
  CHECK_THROWS_AS(automaton_from_json(tampered(j, [](Json& x) {
                    auto& m = x["arrows"][0]["matrix"];
                    m[0] = m[0].get<int>() + 1;
                  })),
                  FormatError);
  CHECK_THROWS_AS(automaton_from_json(tampered(j, [](Json& x) {
                    x["arrows"][0]["permutation"][0] = 2;
                    x["arrows"][0]["permutation"][1] = 2;
                  })),
                  FormatError);
  CHECK_THROWS_AS(automaton_from_json(tampered(j, [](Json& x) { x["arrows"][0]["target"] = 99; })), FormatError);
  CHECK_THROWS_AS(automaton_from_json(tampered(j, [](Json& x) { x["vertices"][0][0] = 1; })), FormatError);
  CHECK_THROWS_AS(automaton_from_json(tampered(j, [](Json& x) { x.erase("edge_count"); })), FormatError);
  CHECK_THROWS_AS(automaton_from_json(tampered(j, [](Json& x) { x["format"] = "other"; })), FormatError);
  Json stale = j;
  stale["arrows"][0]["braid"] = "s1";
  CHECK_THROWS_AS(automaton_from_json(stale), FormatError);
}

TEST_CASE("annotations") {
  FoldingAutomaton a = automaton("two-trigon", 5);
  const FoldArrow& f = a.arrows[0];
  std::vector<int> perm;
  for (int x : f.permutation) perm.push_back(x + 1);
  const Json j = {{"punctures", 5},
                  {"annotations",
                   {{{"source", a.vertices[f.source]},
                     {"target", a.vertices[f.target]},
                     {"permutation", perm},
                     {"rule", f.rule_from < 0 ? Json(nullptr) : Json({f.rule_from + 1, f.rule_to + 1})},
                     {"identity", false},
                     {"braid", "s1 s2^-1"}}}}};
  const auto notes = annotations_from_json(j);
  REQUIRE(notes.size() == 1);
  CHECK(notes[0].braid->to_string() == "s1 s2^-1");
  CHECK(apply_annotations(a, notes) == 1);
  CHECK(a.arrows[0].braid->to_string() == "s1 s2^-1");
  CHECK(automaton_from_json(automaton_to_json(a)).arrows[0].braid == a.arrows[0].braid);
  Json bad = j;
  bad["annotations"][0]["braid"] = "s9";
  CHECK_THROWS(annotations_from_json(bad));
}

TEST_CASE("config round trip") {
  for (int strands : {4, 5}) {
    const CertifyConfig c = preset_config(strands);
    const CertifyConfig d = config_from_json(config_to_json(c));
    CHECK(d.punctures == c.punctures);
    CHECK(d.tol == c.tol);
    REQUIRE(d.strata.size() == c.strata.size());
    for (std::size_t i = 0; i < c.strata.size(); ++i) {
      CHECK(d.strata[i].stratum == c.strata[i].stratum);
      CHECK(d.strata[i].lambda_bound == c.strata[i].lambda_bound);
      CHECK(d.strata[i].maxnorm == c.strata[i].maxnorm);
      CHECK(d.strata[i].equality_bucket == c.strata[i].equality_bucket);
      CHECK(d.strata[i].avoid == c.strata[i].avoid);
    }
    CHECK(config_to_json(d) == config_to_json(c));
  }
  CHECK_THROWS_AS(config_from_json(Json{{"punctures", "five"}}), FormatError);
}

TEST_CASE("a certificate verifies") {
  const Json& cert = certificate4();
  CHECK(cert["format"] == "braidmin-certificate");
  CHECK(cert["conclusion"]["certified"] == true);
  const VerifyReport r = verify_certificate(cert);
  CHECK(r.ok);
  for (const auto& l : r.lines) CHECK(l.rfind("ok   ", 0) == 0);
  CHECK(verify_certificate(Json::parse(cert.dump())).ok);
}

TEST_CASE("tampering is detected") {
  const Json& cert = certificate4();
  SUBCASE("digest") {
    Json j = cert;
    j["strata"][0]["lambda_bound"] = 2.31;
    const VerifyReport r = verify_certificate(j);
    CHECK_FALSE(r.ok);
    CHECK(has_line(r, "certificate digest mismatch"));
  }
  SUBCASE("matrix entry") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) {
      auto& m = j["strata"][0]["candidates"][0]["matrix"];
      m[0] = m[0].get<int>() + 1;
    }));
    CHECK_FALSE(r.ok);
    CHECK(has_line(r, "stratum (1) 1p5,3u1 candidates[0]: stored matrix differs"));
  }
  SUBCASE("dilatation interval") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) {
      j["strata"][0]["candidates"][0]["dilatation"] = {2.2, 2.25};
    }));
    CHECK(has_line(r, "candidates[0]: dilatation interval does not contain"));
  }
  SUBCASE("minimal polynomial") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) {
      j["strata"][0]["candidates"][0]["min_poly"] = {1, -3, 1};
    }));
    CHECK(has_line(r, "minimal polynomial"));
  }
  SUBCASE("closed word") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) {
      auto& w = j["strata"][0]["candidates"][0]["word"];
      w.erase(w.size() - 1);
    }));
    CHECK_FALSE(r.ok);
  }
  SUBCASE("embedded automaton") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) {
      auto& a = j["automata"].begin().value();
      a["arrows"][0]["kind"] = "isomorphism";
    }));
    CHECK(has_line(r, "digest key does not match content"));
    CHECK(has_line(r, "automaton is not embedded"));
  }
  SUBCASE("avoid word") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) {
      auto& words = j["strata"][0]["avoid"]["words"];
      REQUIRE_FALSE(words.empty());
      words[0]["base"] = 0;
    }));
    CHECK(has_line(r, "avoid word 0 is not justified"));
  }
  SUBCASE("norm bound") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) { j["strata"][0]["maxnorm"] = 20; }));
    CHECK(has_line(r, "searched below the norm bound"));
  }
  SUBCASE("missing stratum") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) { j["strata"].erase(1); }));
    CHECK(has_line(r, "1p4,2p1 has no record"));
  }
  SUBCASE("conclusion") {
    const VerifyReport r = verify_certificate(tampered(cert, [](Json& j) { j["conclusion"]["minimum"] = {2.0, 2.1}; }));
    CHECK(has_line(r, "conclusion minimum does not match"));
    const VerifyReport w = verify_certificate(tampered(cert, [](Json& j) { j["conclusion"]["witness"]["stratum"] = 2; }));
    CHECK(has_line(w, "witness"));
  }
  SUBCASE("not a certificate") {
    CHECK_FALSE(verify_certificate(Json::object()).ok);
    CHECK_FALSE(verify_certificate(automaton_to_json(automaton("two-trigon", 5))).ok);
  }
}

TEST_CASE("search certificates verify") {
  const FoldingAutomaton& a = automaton("boundary-3prong", 5);
  StratumRecord rec;
  rec.index = 3;
  rec.resolution = resolve_stratum(parse_stratum("boundary-3prong", 5));
  rec.automaton = a;
  rec.lambda_bound = 1.7221;
  rec.maxnorm_default = max_norm_bound(1.7221, a.edge_count);
  rec.equality_bucket = true;
  rec.avoid = build_avoid_set(a, 2);
  rec.search = search(a, *rec.avoid, {.lambda_bound = 1.7221, .maxnorm = 12, .equality_bucket = true});
  const Json cert = search_certificate(rec, {{"command", "search"}});
  const VerifyReport r = verify_certificate(cert);
  CHECK(r.ok);
  CHECK(cert["strata"][0]["candidates"].size() == 4);
}

TEST_CASE("certificates do not depend on the thread count") {
  CertifyConfig cfg = preset_config(4);
  cfg.threads = 3;
  const Json cert =
      certify_certificate(certify(cfg), {{"command", "certify"}, {"config", config_to_json(cfg)}, {"punctures", 4}});
  CHECK(cert.dump() == certificate4().dump());
}

TEST_CASE("files") {
  const std::string path = temp_path("roundtrip.json");
  write_json_file(path, certificate4());
  CHECK(read_json_file(path) == certificate4());
  std::ifstream in(path);
  const std::string text((std::istreambuf_iterator<char>(in)), {});
  CHECK(text == certificate4().dump(1) + "\n");
  std::filesystem::remove(path);

  CHECK_THROWS_AS(read_json_file(temp_path("does_not_exist.json")), IoError);
  const std::string junk = temp_path("junk.json");
  std::ofstream(junk) << "{not json";
  CHECK_THROWS_AS(read_json_file(junk), FormatError);
  std::filesystem::remove(junk);
  CHECK_THROWS_AS(write_json_file("/nonexistent-dir/x.json", Json::object()), IoError);
}
