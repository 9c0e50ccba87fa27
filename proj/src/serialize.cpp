#include "braidmin/serialize.hpp"

#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include <openssl/evp.h>

#include "braidmin/spectral.hpp"

namespace braidmin {

namespace {

Json poly_to_json(const IntPolynomial& p) {
  Json arr = Json::array();
  for (const auto& c : p.coefficients()) {
    if (c >= std::numeric_limits<std::int64_t>::min() && c <= std::numeric_limits<std::int64_t>::max()) {
      arr.push_back(static_cast<std::int64_t>(c));
    } else {
      arr.push_back(c.str());
    }
  }
  return arr;
}

IntPolynomial poly_from_json(const Json& j) {
  if (!j.is_array()) throw FormatError("polynomial must be an array of coefficients");
  std::vector<std::string> c;
  for (const auto& x : j) {
    if (x.is_number_integer()) {
      c.push_back(std::to_string(x.get<std::int64_t>()));
    } else if (x.is_string()) {
      c.push_back(x.get<std::string>());
    } else {
      throw FormatError("polynomial coefficient must be an integer");
    }
  }
  try {
    return IntPolynomial::from_strings(c);
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
}

Json interval(const RootEnclosure& r) { return Json::array({r.lo, r.hi}); }

template <typename T>
T field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw FormatError(std::string("field '") + key + "' has the wrong type");
  }
}

std::string join_words(const std::vector<int>& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + std::to_string(w[i]);
  return s;
}

}  // namespace

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

std::string content_digest(const Json& j) {
  Json copy = j;
  if (copy.is_object()) copy.erase("digest");
  return sha256_hex(copy.dump());
}

Json with_digest(Json j) {
  j["digest"] = content_digest(j);
  return j;
}

Json automaton_to_json(const FoldingAutomaton& a) {
  Json j;
  j["format"] = "braidmin-automaton";
  j["version"] = kFormatVersion;
  j["stratum"] = a.stratum.to_string();
  j["punctures"] = a.punctures;
  j["edge_count"] = a.edge_count;
  j["vertices"] = a.vertices;
  Json arrows = Json::array();
  for (const auto& fa : a.arrows) {
    Json x;
    x["source"] = fa.source;
    x["target"] = fa.target;
    std::vector<int> perm;
    for (int p : fa.permutation) perm.push_back(p + 1);
    x["permutation"] = perm;
    x["rule"] = fa.kind == ArrowKind::Fold ? Json::array({fa.rule_from + 1, fa.rule_to + 1}) : Json(nullptr);
    x["kind"] = to_string(fa.kind);
    x["identity"] = fa.identity ? Json(*fa.identity) : Json(nullptr);
    x["braid"] = fa.braid ? Json(fa.braid->to_string()) : Json(nullptr);
    x["matrix"] = fa.matrix().row_major();
    arrows.push_back(std::move(x));
  }
  j["arrows"] = std::move(arrows);
  j["counts"] = {{"vertices", a.vertices.size()},
                 {"fold_arrows", a.fold_arrow_count()},
                 {"isomorphism_arrows", a.isomorphism_arrow_count()},
                 {"connections", a.connection_count()},
                 {"strongly_connected", a.strongly_connected()}};
  return with_digest(std::move(j));
}

FoldingAutomaton automaton_from_json(const Json& j) {
  if (field<std::string>(j, "format") != "braidmin-automaton") throw FormatError("not an automaton file");
  if (field<int>(j, "version") != kFormatVersion) throw FormatError("unsupported automaton format version");
  FoldingAutomaton a;
  a.punctures = field<int>(j, "punctures");
  try {
    a.stratum = parse_stratum(field<std::string>(j, "stratum"), a.punctures);
  } catch (const DomainError& e) {
    throw FormatError(e.what());
  }
  a.edge_count = field<int>(j, "edge_count");
  a.vertices = field<std::vector<CanonicalCode>>(j, "vertices");
  for (std::size_t v = 0; v < a.vertices.size(); ++v) {
    try {
      const TrainTrack t = TrainTrack::from_code(a.vertices[v]);
      if (canonical_form(t).code != a.vertices[v]) throw FormatError("vertex " + std::to_string(v) + " is not canonical");
      if (t.edge_count() != a.edge_count) throw FormatError("vertex " + std::to_string(v) + " has the wrong edge count");
      if (!check_stratum(t, a.stratum).empty())
        throw FormatError("vertex " + std::to_string(v) + " is outside the stratum");
    } catch (const StructureError& e) {
      throw FormatError("vertex " + std::to_string(v) + ": " + e.what());
    }
  }
  const int nv = static_cast<int>(a.vertices.size());
  const Json& arrows = j.at("arrows");
  if (!arrows.is_array()) throw FormatError("arrows must be an array");
  for (std::size_t i = 0; i < arrows.size(); ++i) {
    const Json& x = arrows[i];
    const std::string where = "arrow " + std::to_string(i);
    FoldArrow fa;
    fa.source = field<int>(x, "source");
    fa.target = field<int>(x, "target");
    if (fa.source < 0 || fa.source >= nv || fa.target < 0 || fa.target >= nv)
      throw FormatError(where + " references an undeclared vertex");
    const auto kind = field<std::string>(x, "kind");
    if (kind == "fold") {
      fa.kind = ArrowKind::Fold;
    } else if (kind == "isomorphism") {
      fa.kind = ArrowKind::Isomorphism;
    } else {
      throw FormatError(where + " has unknown kind '" + kind + "'");
    }
    const auto perm = field<std::vector<int>>(x, "permutation");
    if (static_cast<int>(perm.size()) != a.edge_count) throw FormatError(where + " permutation has the wrong length");
    std::vector<char> hit(a.edge_count, 0);
    for (int p : perm) {
      if (p < 1 || p > a.edge_count || hit[p - 1]) throw FormatError(where + " permutation is not a bijection of 1..E");
      hit[p - 1] = 1;
      fa.permutation.push_back(p - 1);
    }
    if (fa.kind == ArrowKind::Fold) {
      const auto rule = field<std::vector<int>>(x, "rule");
      if (rule.size() != 2 || rule[0] < 1 || rule[0] > a.edge_count || rule[1] < 1 || rule[1] > a.edge_count)
        throw FormatError(where + " has a malformed rule");
      fa.rule_from = rule[0] - 1;
      fa.rule_to = rule[1] - 1;
    } else if (!x.at("rule").is_null()) {
      throw FormatError(where + ": isomorphism arrows carry no rule");
    }
    if (x.contains("identity") && !x.at("identity").is_null()) fa.identity = field<bool>(x, "identity");
    if (x.contains("braid") && !x.at("braid").is_null()) {
      try {
        fa.braid = BraidWord::parse(a.punctures, field<std::string>(x, "braid"));
      } catch (const DomainError& e) {
        throw FormatError(where + ": " + e.what());
      }
    }
    if (x.contains("matrix") && field<std::vector<std::int64_t>>(x, "matrix") != fa.matrix().row_major())
      throw FormatError(where + " matrix does not match its permutation and rule");
    a.arrows.push_back(std::move(fa));
  }
  if (j.contains("digest") && field<std::string>(j, "digest") != content_digest(j))
    throw FormatError("automaton digest mismatch");
  a.finalize();
  return a;
}

std::vector<ArrowAnnotation> annotations_from_json(const Json& j) {
  std::vector<ArrowAnnotation> out;
  const int strands = field<int>(j, "punctures");
  const Json& list = j.at("annotations");
  for (const auto& x : list) {
    ArrowAnnotation n;
    n.source = field<CanonicalCode>(x, "source");
    n.target = field<CanonicalCode>(x, "target");
    for (int p : field<std::vector<int>>(x, "permutation")) n.permutation.push_back(p - 1);
    if (!x.at("rule").is_null()) {
      const auto rule = field<std::vector<int>>(x, "rule");
      if (rule.size() != 2) throw FormatError("annotation rule must have two entries");
      n.rule_from = rule[0] - 1;
      n.rule_to = rule[1] - 1;
    }
    if (x.contains("identity") && !x.at("identity").is_null()) n.identity = field<bool>(x, "identity");
    if (x.contains("braid") && !x.at("braid").is_null()) {
      try {
        n.braid = BraidWord::parse(strands, field<std::string>(x, "braid"));
      } catch (const DomainError& e) {
        throw FormatError(e.what());
      }
    }
    out.push_back(std::move(n));
  }
  return out;
}

Json avoid_to_json(const AvoidSet& avoid) {
  Json words = Json::array();
  for (const auto& w : avoid.words) words.push_back({{"loop", w.loop}, {"base", w.base}, {"period", w.period}});
  Json j = {{"max_loop_len", avoid.max_loop_len}, {"probe_limit", avoid.probe_limit}, {"words", std::move(words)}};
  return with_digest(std::move(j));
}

Json candidate_to_json(const Candidate& c) {
  return {{"start", c.start},
          {"word", c.word},
          {"matrix", c.matrix.row_major()},
          {"char_poly", poly_to_json(c.char_poly)},
          {"char_poly_text", c.char_poly.to_string()},
          {"min_poly", poly_to_json(c.min_poly)},
          {"min_poly_text", c.min_poly.to_string()},
          {"dilatation", interval(c.dilatation)},
          {"exact", c.dilatation.exact},
          {"bound", c.compare_to_bound < 0 ? "below" : "equal"},
          {"rotation_class", c.rotation_class},
          {"mirror_class", c.mirror_class}};
}

Json stats_to_json(const SearchStats& s) {
  return {{"layers", s.layers},
          {"paths_expanded", s.paths_expanded},
          {"paths_kept", s.paths_kept},
          {"pruned_norm", s.pruned_norm},
          {"pruned_sum", s.pruned_sum},
          {"pruned_avoid", s.pruned_avoid},
          {"closed_paths", s.closed_paths},
          {"pf_closed", s.pf_closed},
          {"eigen_tested", s.eigen_tested},
          {"max_layer_paths", s.max_layer_paths},
          {"max_norm_seen", s.max_norm_seen},
          {"max_length", s.max_length}};
}

Json record_to_json(const StratumRecord& r) {
  Json j;
  j["index"] = r.index;
  j["stratum"] = r.resolution.spec.to_string();
  j["resolution"] = to_string(r.resolution.kind);
  j["justification"] = r.resolution.justification;
  switch (r.resolution.kind) {
    case Resolution::Analytic:
      j["polynomial"] = poly_to_json(r.resolution.analytic_poly);
      j["polynomial_text"] = r.resolution.analytic_poly.to_string();
      j["value"] = interval(r.analytic_value);
      break;
    case Resolution::Reduction:
      j["reduces_to"] = r.resolution.reduces_to.to_string();
      break;
    case Resolution::Search: {
      j["search_stratum"] = r.resolution.search_spec.to_string();
      j["automaton"] = r.automaton ? content_digest(automaton_to_json(*r.automaton)) : "";
      j["lambda_bound"] = r.lambda_bound;
      j["maxnorm_default"] = r.maxnorm_default;
      j["equality_bucket"] = r.equality_bucket;
      j["avoid"] = r.avoid ? avoid_to_json(*r.avoid) : Json(nullptr);
      if (r.search) {
        const SearchResult& s = *r.search;
        j["maxnorm"] = s.maxnorm;
        j["sum_threshold"] = s.sum_threshold;
        Json c = Json::array();
        for (const auto& x : s.candidates) c.push_back(candidate_to_json(x));
        Json e = Json::array();
        for (const auto& x : s.equality) e.push_back(candidate_to_json(x));
        j["candidates"] = std::move(c);
        j["equality"] = std::move(e);
        j["classes"] = {{"rotation", s.rotation_classes}, {"mirror", s.mirror_classes}};
        j["stats"] = stats_to_json(s.stats);
        // length <= norm - E + 1 for fold words, so the norm bound also bounds the length
        j["binding_bound"] = s.stats.max_norm_seen >= s.maxnorm ? "norm" : "none";
      }
      break;
    }
  }
  j["lower_bound"] = r.lower_bound() == std::numeric_limits<double>::infinity() ? Json(nullptr) : Json(r.lower_bound());
  return j;
}

namespace {

Json certificate_shell(const Json& invocation) {
  Json j;
  j["format"] = "braidmin-certificate";
  j["version"] = kFormatVersion;
  j["tool"] = kToolVersion;
  j["invocation"] = invocation;
  j["automata"] = Json::object();
  j["strata"] = Json::array();
  j["conclusion"] = nullptr;
  return j;
}

void embed(Json& cert, const StratumRecord& r) {
  if (r.automaton) {
    Json a = automaton_to_json(*r.automaton);
    const std::string key = a["digest"].get<std::string>();
    cert["automata"][key] = std::move(a);
  }
  cert["strata"].push_back(record_to_json(r));
}

}  // namespace

Json search_certificate(const StratumRecord& r, const Json& invocation) {
  Json j = certificate_shell(invocation);
  embed(j, r);
  return with_digest(std::move(j));
}

Json certify_certificate(const CertifyRun& run, const Json& invocation) {
  Json j = certificate_shell(invocation);
  for (const auto& r : run.records) embed(j, r);
  const Conclusion& c = run.conclusion;
  Json concl;
  concl["certified"] = c.certified;
  concl["failures"] = c.failures;
  if (c.witness_stratum > 0) {
    concl["minimum"] = interval(c.minimum);
    concl["min_poly"] = poly_to_json(c.min_poly);
    concl["min_poly_text"] = c.min_poly.to_string();
    concl["witness"] = {{"stratum", c.witness_stratum},
                        {"word", c.witness_word},
                        {"braid", c.witness_braid ? Json(c.witness_braid->to_string()) : Json(nullptr)}};
  } else {
    concl["minimum"] = nullptr;
    concl["min_poly"] = nullptr;
    concl["min_poly_text"] = nullptr;
    concl["witness"] = nullptr;
  }
  j["conclusion"] = std::move(concl);
  return with_digest(std::move(j));
}

Json config_to_json(const CertifyConfig& c) {
  Json strata = Json::array();
  for (const auto& s : c.strata) {
    Json x = {{"stratum", s.stratum},
              {"equality_bucket", s.equality_bucket},
              {"max_loop_len", s.max_loop_len},
              {"avoid", s.avoid}};
    x["lambda"] = s.lambda_bound > 0 ? Json(s.lambda_bound) : Json(nullptr);
    x["maxnorm"] = s.maxnorm ? Json(*s.maxnorm) : Json(nullptr);
    strata.push_back(std::move(x));
  }
  return {{"punctures", c.punctures}, {"tol", c.tol}, {"strata", std::move(strata)}};
}

CertifyConfig config_from_json(const Json& j) {
  CertifyConfig c;
  c.punctures = field<int>(j, "punctures");
  if (j.contains("tol")) c.tol = field<double>(j, "tol");
  if (!j.contains("strata") || !j.at("strata").is_array()) throw FormatError("config needs a 'strata' array");
  for (const auto& x : j.at("strata")) {
    StratumConfig s;
    s.stratum = field<std::string>(x, "stratum");
    if (x.contains("lambda") && !x.at("lambda").is_null()) s.lambda_bound = field<double>(x, "lambda");
    if (x.contains("maxnorm") && !x.at("maxnorm").is_null()) s.maxnorm = field<std::int64_t>(x, "maxnorm");
    if (x.contains("equality_bucket")) s.equality_bucket = field<bool>(x, "equality_bucket");
    if (x.contains("max_loop_len")) s.max_loop_len = field<int>(x, "max_loop_len");
    if (x.contains("avoid")) s.avoid = field<bool>(x, "avoid");
    c.strata.push_back(std::move(s));
  }
  return c;
}

VerifyReport verify_certificate(const Json& cert, double tol) {
  VerifyReport rep;
  if (!cert.is_object() || cert.value("format", "") != "braidmin-certificate") {
    rep.fail("not a certificate file");
    return rep;
  }
  if (!cert.contains("digest") || !cert["digest"].is_string() || cert["digest"].get<std::string>() != content_digest(cert))
    rep.fail("certificate digest mismatch");

  std::map<std::string, FoldingAutomaton> automata;
  if (cert.contains("automata") && cert["automata"].is_object()) {
    for (const auto& [key, value] : cert["automata"].items()) {
      try {
        if (content_digest(value) != key) throw FormatError("digest key does not match content");
        automata.emplace(key, automaton_from_json(value));
      } catch (const std::exception& e) {
        rep.fail("automaton " + key.substr(0, 12) + ": " + e.what());
      }
    }
  }

  struct Best {
    double lo = std::numeric_limits<double>::infinity();
    std::vector<int> word;
    int stratum = 0;
  } best;
  std::vector<std::pair<int, double>> lower_bounds;
  std::vector<std::string> strata_seen;
  std::vector<int> short_searches;

  for (const auto& rec : cert.value("strata", Json::array())) {
    const int idx = rec.value("index", 0);
    const std::string sname = "stratum (" + std::to_string(idx) + ") " + rec.value("stratum", "?");
    strata_seen.push_back(rec.value("stratum", ""));
    try {
      const std::string kind = field<std::string>(rec, "resolution");
      if (kind == "analytic") {
        const IntPolynomial p = poly_from_json(rec.at("polynomial"));
        const auto v = field<std::vector<double>>(rec, "value");
        if (v.size() != 2 || compare_largest_root(p, exact_rational(v[0])) < 0 ||
            compare_largest_root(p, exact_rational(v[1])) > 0) {
          rep.fail(sname + ": analytic interval does not contain the largest root");
        } else {
          rep.lines.push_back("ok   " + sname + ": analytic bound " + p.to_string());
          lower_bounds.emplace_back(idx, v[0]);
        }
        continue;
      }
      if (kind == "reduction") {
        rep.lines.push_back("ok   " + sname + ": reduces to " + field<std::string>(rec, "reduces_to"));
        continue;
      }
      const auto it = automata.find(field<std::string>(rec, "automaton"));
      if (it == automata.end()) {
        rep.fail(sname + ": automaton is not embedded");
        continue;
      }
      const FoldingAutomaton& a = it->second;
      const double bound = field<double>(rec, "lambda_bound");
      double stratum_min = bound;
      if (a.edge_count > 0 && field<std::int64_t>(rec, "maxnorm") < max_norm_bound(bound, a.edge_count))
        short_searches.push_back(idx);
      if (rec.contains("avoid") && !rec["avoid"].is_null()) {
        int k = 0;
        for (const auto& w : rec["avoid"].value("words", Json::array())) {
          const auto loop = field<std::vector<int>>(w, "loop");
          const int base = field<int>(w, "base");
          const int period = field<int>(w, "period");
          bool justified = false;
          try {
            if (!loop.empty() && base >= 1 && period >= 1 &&
                a.arrows.at(loop.front()).source == a.arrows.at(loop.back()).target) {
              const TransMatrix lo = power(path_matrix(a, loop), base);
              const TransMatrix hi = power(path_matrix(a, loop), base + period);
              justified = same_pattern(hi, lo) && dominates(hi, lo);
            }
          } catch (const std::exception&) {
          }
          if (!justified) rep.fail(sname + ": avoid word " + std::to_string(k) + " is not justified");
          ++k;
        }
      }
      for (const char* list : {"candidates", "equality"}) {
        const bool eq = std::string(list) == "equality";
        int k = 0;
        for (const auto& c : rec.value(list, Json::array())) {
          const std::string cname = sname + " " + list + "[" + std::to_string(k++) + "]";
          const auto word = field<std::vector<int>>(c, "word");
          bool good = true;
          auto bad = [&](const std::string& why) {
            rep.fail(cname + ": " + why);
            good = false;
          };
          TransMatrix m;
          try {
            m = path_matrix(a, word);
          } catch (const std::exception& e) {
            bad(e.what());
            continue;
          }
          if (word.empty() || a.arrows[word.front()].source != a.arrows[word.back()].target) bad("path is not closed");
          if (field<std::vector<std::int64_t>>(c, "matrix") != m.row_major())
            bad("stored matrix differs from the product along word " + join_words(word));
          if (!is_perron_frobenius(m)) bad("matrix is not Perron-Frobenius");
          const IntPolynomial cp = char_poly(m);
          if (poly_from_json(c.at("char_poly")) != cp) bad("characteristic polynomial mismatch");
          const auto iv = field<std::vector<double>>(c, "dilatation");
          if (iv.size() != 2 || !(iv[0] <= iv[1]) || compare_largest_root(cp, exact_rational(iv[0])) < 0 ||
              compare_largest_root(cp, exact_rational(iv[1])) > 0) {
            bad("dilatation interval does not contain the largest root of the characteristic polynomial");
          } else if (iv[1] - iv[0] > std::max(tol, 1e-9) && !field<bool>(c, "exact")) {
            bad("dilatation interval wider than the tolerance");
          }
          const int cmp = compare_largest_root(cp, bound);
          if (eq ? cmp != 0 : cmp >= 0) bad(eq ? "dilatation is not equal to the bound" : "dilatation is not below the bound");
          const IntPolynomial mp = poly_from_json(c.at("min_poly"));
          if (mp.is_zero() || !divides(mp, cp) || (iv.size() == 2 && (compare_largest_root(mp, exact_rational(iv[0])) < 0 ||
                                                                      compare_largest_root(mp, exact_rational(iv[1])) > 0)))
            bad("minimal polynomial does not divide the characteristic polynomial at the dilatation");
          if (good) {
            rep.lines.push_back("ok   " + cname + ": " + cp.to_string() + ", dilatation in [" +
                                std::to_string(iv[0]) + ", " + std::to_string(iv[1]) + "]");
            if (iv[0] < best.lo) best = {iv[0], word, idx};
            stratum_min = std::min(stratum_min, iv[0]);
          }
        }
      }
      lower_bounds.emplace_back(idx, stratum_min);
    } catch (const std::exception& e) {
      rep.fail(sname + ": " + e.what());
    }
  }

  const Json& concl = cert.contains("conclusion") ? cert["conclusion"] : Json();
  if (concl.is_object() && !concl["minimum"].is_null()) {
    try {
      const auto mn = field<std::vector<double>>(concl, "minimum");
      const auto& w = concl.at("witness");
      if (mn.size() != 2 || mn[0] != best.lo) rep.fail("conclusion minimum does not match the least candidate");
      if (field<std::vector<int>>(w, "word") != best.word || field<int>(w, "stratum") != best.stratum)
        rep.fail("conclusion witness does not match the least candidate");
      if (field<bool>(concl, "certified")) {
        const int punctures = cert.at("invocation").value("punctures", 0);
        const auto required = enumerate_strata(punctures + 1);
        for (std::size_t i = 0; i < required.size(); ++i)
          if (std::find(strata_seen.begin(), strata_seen.end(), required[i].to_string()) == strata_seen.end())
            rep.fail("certified conclusion but stratum " + required[i].to_string() + " has no record");
        for (int idx : short_searches)
          rep.fail("certified conclusion but stratum (" + std::to_string(idx) + ") was searched below the norm bound");
        for (const auto& [idx, lb] : lower_bounds)
          if (idx != best.stratum && mn.size() == 2 && lb < mn[1])
            rep.fail("certified conclusion but stratum (" + std::to_string(idx) + ") has a lower bound below the minimum");
      }
      if (rep.ok) rep.lines.push_back("ok   conclusion: minimum " + field<std::string>(concl, "min_poly_text"));
    } catch (const std::exception& e) {
      rep.fail(std::string("conclusion: ") + e.what());
    }
  }
  return rep;
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << j.dump(1) << '\n';
  if (!out) throw IoError("write failed for " + path);
}

}  // namespace braidmin
