#include "braidmin/certify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

namespace braidmin {

namespace {

StratumSpec strip_boundary(const StratumSpec& s) {
  StratumSpec out = s.normalized();
  out.boundary_prongs.reset();
  return out;
}

int max_prong(const StratumSpec& s) {
  int k = 0;
  for (const auto& x : s.singularities) k = std::max(k, x.prongs);
  return k;
}

int singularity_total(const StratumSpec& s) {
  int t = 0;
  for (const auto& x : s.singularities) t += x.count;
  return t;
}

}  // namespace

std::vector<StratumSpec> enumerate_strata(int punctures) {
  if (punctures < 1) throw DomainError("need at least one puncture");
  std::vector<StratumSpec> out;
  for (int p1 = punctures; p1 >= 4; --p1) {
    const int deficit = p1 - 4;           // paid by (k - 2) per singularity with k >= 3
    const int rest = punctures - p1;      // punctured singularities with k >= 2
    // items: punctured k = 2..deficit+2, unpunctured k = 3..deficit+2
    std::vector<std::pair<int, bool>> items;
    for (int k = 2; k <= deficit + 2; ++k) items.emplace_back(k, true);
    for (int k = 3; k <= deficit + 2; ++k) items.emplace_back(k, false);
    std::vector<int> counts(items.size(), 0);
    std::function<void(std::size_t, int, int)> rec = [&](std::size_t i, int cost_left, int punct_left) {
      if (i == items.size()) {
        if (cost_left != 0 || punct_left != 0) return;
        StratumSpec s;
        if (p1 > 0) s.singularities.push_back({1, true, p1});
        for (std::size_t j = 0; j < items.size(); ++j)
          if (counts[j] > 0) s.singularities.push_back({items[j].first, items[j].second, counts[j]});
        out.push_back(s.normalized());
        return;
      }
      const auto [k, punctured] = items[i];
      for (int c = 0;; ++c) {
        const int cost = c * (k - 2);
        if (cost > cost_left || (punctured && c > punct_left)) break;
        counts[i] = c;
        rec(i + 1, cost_left - cost, punctured ? punct_left - c : punct_left);
      }
      counts[i] = 0;
    };
    rec(0, deficit, rest);
  }
  std::stable_sort(out.begin(), out.end(), [](const StratumSpec& a, const StratumSpec& b) {
    const int na = a.count(1, true);
    const int nb = b.count(1, true);
    if (na != nb) return na > nb;
    if (singularity_total(a) != singularity_total(b)) return singularity_total(a) < singularity_total(b);
    if (max_prong(a) != max_prong(b)) return max_prong(a) > max_prong(b);
    return a.to_string() < b.to_string();
  });
  return out;
}

std::string to_string(Resolution r) {
  switch (r) {
    case Resolution::Search: return "search";
    case Resolution::Analytic: return "analytic";
    case Resolution::Reduction: return "reduction";
  }
  return "unknown";
}

StratumResolution resolve_stratum(const StratumSpec& input) {
  const StratumSpec spec = strip_boundary(input);
  if (!spec.consistent()) throw DomainError("stratum " + spec.to_string() + " violates sum (1 - k/2) n_k = 2");
  StratumResolution r;
  r.spec = spec;
  const int twos = spec.count(2, true);
  bool only_low = true;
  for (const auto& x : spec.singularities)
    if (!(x.punctured && x.prongs <= 2)) only_low = false;
  if (only_low && spec.count(1, true) == 4) {
    r.kind = Resolution::Analytic;
    r.analytic_poly = IntPolynomial::from_descending({1, -3, 1});
    r.justification =
        "after capping punctured 2-prongs the foliation has four 1-prong singularities; the map lifts to an "
        "Anosov map of the torus, so its dilatation is at least (3 + sqrt 5) / 2";
    return r;
  }
  if (twos > 0) {
    StratumSpec reduced;
    int to_puncture = twos;
    std::vector<Singularity> sing = spec.singularities;
    std::sort(sing.begin(), sing.end(), [](const Singularity& a, const Singularity& b) { return a.prongs > b.prongs; });
    for (auto& x : sing) {
      if (x.punctured && x.prongs == 2) continue;
      if (!x.punctured && to_puncture > 0) {
        const int moved = std::min(to_puncture, x.count);
        to_puncture -= moved;
        if (moved > 0) reduced.singularities.push_back({x.prongs, true, moved});
        if (x.count > moved) reduced.singularities.push_back({x.prongs, false, x.count - moved});
        continue;
      }
      reduced.singularities.push_back(x);
    }
    if (to_puncture > 0) throw DomainError("stratum " + spec.to_string() + " cannot be classified");
    r.kind = Resolution::Reduction;
    r.reduces_to = reduced.normalized();
    r.justification =
        "capping off the punctured 2-prong singularities and puncturing as many periodic non-punctured "
        "singularities keeps the map and its dilatation";
    return r;
  }
  r.kind = Resolution::Search;
  r.search_spec = spec;
  int boundary = 0;
  for (const auto& x : spec.singularities)
    if (x.punctured) boundary = std::max(boundary, x.prongs);
  r.search_spec.boundary_prongs = boundary;
  r.justification = "exhaustive search of the folding automaton";
  return r;
}

CertifyConfig preset_config(int strands) {
  CertifyConfig c;
  c.punctures = strands;
  if (strands == 5) {
    c.strata = {
        {"four-prong", 2.2, 56, false, 2, true},
        {"two-trigon", 2.02, std::nullopt, false, 2, true},
        {"boundary-3prong", 1.7221, 12, true, 2, true},
        {"1p5,2p1,3u1", 0, std::nullopt, false, 2, true},
        {"1p4,2p2", 0, std::nullopt, false, 2, true},
    };
  } else if (strands == 4) {
    c.strata = {
        {"one-trigon", 2.3, std::nullopt, false, 2, true},
        {"1p4,2p1", 0, std::nullopt, false, 2, true},
    };
  } else {
    throw DomainError("no preset for " + std::to_string(strands) + " strands");
  }
  return c;
}

double StratumRecord::lower_bound() const {
  switch (resolution.kind) {
    case Resolution::Search:
      if (search && !search->candidates.empty()) return search->candidates.front().dilatation.lo;
      return lambda_bound;
    case Resolution::Analytic:
      return analytic_value.lo;
    case Resolution::Reduction:
      return std::numeric_limits<double>::infinity();
  }
  return 0;
}

StratumRecord run_stratum(const StratumSpec& spec, int index, const StratumConfig& cfg, const CertifyConfig& run) {
  StratumRecord rec;
  rec.index = index;
  rec.resolution = resolve_stratum(spec);
  if (rec.resolution.kind == Resolution::Analytic) {
    rec.analytic_value = largest_real_root(rec.resolution.analytic_poly, run.tol);
    return rec;
  }
  if (rec.resolution.kind == Resolution::Reduction) return rec;

  const StratumSpec named = parse_stratum(cfg.stratum, run.punctures);
  if (named.boundary_prongs) rec.resolution.search_spec.boundary_prongs = named.boundary_prongs;
  rec.automaton = build_automaton(rec.resolution.search_spec, run.punctures);
  rec.lambda_bound = cfg.lambda_bound;
  rec.equality_bucket = cfg.equality_bucket;
  rec.maxnorm_default = rec.automaton->edge_count > 0 ? max_norm_bound(cfg.lambda_bound, rec.automaton->edge_count) : 0;
  rec.avoid = cfg.avoid ? build_avoid_set(*rec.automaton, cfg.max_loop_len) : AvoidSet{};
  SearchOptions opt;
  opt.lambda_bound = cfg.lambda_bound;
  opt.maxnorm = cfg.maxnorm;
  opt.equality_bucket = cfg.equality_bucket;
  opt.threads = run.threads;
  opt.tol = run.tol;
  rec.search = search(*rec.automaton, *rec.avoid, opt);
  return rec;
}

Conclusion certify_minimum(const std::vector<StratumRecord>& records, int punctures) {
  Conclusion c;
  const std::vector<StratumSpec> required = enumerate_strata(punctures + 1);
  auto find = [&](const StratumSpec& s) -> const StratumRecord* {
    for (const auto& r : records)
      if (strip_boundary(r.resolution.spec) == strip_boundary(s)) return &r;
    return nullptr;
  };
  for (std::size_t i = 0; i < required.size(); ++i) {
    const StratumRecord* r = find(required[i]);
    if (!r) {
      c.failures.push_back("stratum (" + std::to_string(i + 1) + ") " + required[i].to_string() + " has no record");
      continue;
    }
    if (r->resolution.kind == Resolution::Reduction && !find(r->resolution.reduces_to))
      c.failures.push_back("stratum (" + std::to_string(i + 1) + ") reduces to " +
                           r->resolution.reduces_to.to_string() + ", which has no record");
    if (r->resolution.kind == Resolution::Search && !r->search)
      c.failures.push_back("stratum (" + std::to_string(i + 1) + ") was not searched");
    if (r->search && r->search->maxnorm < r->maxnorm_default)
      c.failures.push_back("stratum (" + std::to_string(i + 1) + ") was searched with maxnorm " +
                           std::to_string(r->search->maxnorm) + ", below the norm bound " +
                           std::to_string(r->maxnorm_default));
  }
  for (const auto& r : records) {
    bool known = false;
    for (const auto& s : required) known = known || strip_boundary(s) == strip_boundary(r.resolution.spec);
    if (!known) c.failures.push_back("record for " + r.resolution.spec.to_string() + " is not a stratum");
  }

  const Candidate* best = nullptr;
  const StratumRecord* best_rec = nullptr;
  for (const auto& r : records) {
    if (!r.search) continue;
    for (const auto* list : {&r.search->candidates, &r.search->equality})
      for (const auto& cand : *list)
        if (!best || cand.dilatation.lo < best->dilatation.lo) {
          best = &cand;
          best_rec = &r;
        }
  }
  if (!best) {
    c.failures.push_back("no candidate found in any stratum");
    return c;
  }
  c.minimum = best->dilatation;
  c.min_poly = best->min_poly;
  c.witness_stratum = best_rec->index;
  c.witness_word = best->word;
  if (best_rec->automaton) {
    const auto w = compose_word(best->word, *best_rec->automaton);
    if (std::holds_alternative<BraidWord>(w)) c.witness_braid = std::get<BraidWord>(w);
  }
  for (const auto& r : records) {
    if (&r == best_rec || r.resolution.kind == Resolution::Reduction) continue;
    if (r.lower_bound() < c.minimum.hi)
      c.failures.push_back("stratum (" + std::to_string(r.index) + ") " + r.resolution.spec.to_string() +
                           " has lower bound " + std::to_string(r.lower_bound()) + " below the minimum");
  }
  c.certified = c.failures.empty();
  return c;
}

CertifyRun certify(const CertifyConfig& config) {
  CertifyRun run;
  run.config = config;
  const std::vector<StratumSpec> required = enumerate_strata(config.punctures + 1);
  std::vector<std::string> unknown;
  for (const auto& entry : config.strata) {
    const StratumSpec spec = strip_boundary(parse_stratum(entry.stratum, config.punctures));
    const auto it = std::find(required.begin(), required.end(), spec);
    if (it == required.end()) {
      unknown.push_back(entry.stratum);
      continue;
    }
    run.records.push_back(run_stratum(spec, static_cast<int>(it - required.begin()) + 1, entry, config));
  }
  std::sort(run.records.begin(), run.records.end(),
            [](const StratumRecord& a, const StratumRecord& b) { return a.index < b.index; });
  run.conclusion = certify_minimum(run.records, config.punctures);
  for (const auto& u : unknown) run.conclusion.failures.push_back("configured stratum " + u + " is not a stratum");
  run.conclusion.certified = run.conclusion.failures.empty();
  return run;
}

std::variant<BraidWord, Unannotated> compose_word(const std::vector<int>& word, const FoldingAutomaton& automaton) {
  BraidWord acc(std::max(1, automaton.punctures), {});
  Unannotated missing;
  for (int i = 0; i < static_cast<int>(word.size()); ++i) {
    const FoldArrow& a = automaton.arrows.at(word[i]);
    if (a.identity && *a.identity) continue;
    if (!a.braid) {
      missing.positions.push_back(i);
      continue;
    }
    if (missing.positions.empty()) acc = acc * *a.braid;
  }
  if (!missing.positions.empty()) return missing;
  return acc;
}

}  // namespace braidmin
