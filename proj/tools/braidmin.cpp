// braidmin: generate folding automata, search them, certify and verify.

#include <sys/resource.h>

#include <chrono>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "braidmin/certify.hpp"
#include "braidmin/serialize.hpp"

using namespace braidmin;

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,       // bad arguments, unreadable or unwritable files
  kInvalid = 2,     // validation, domain and format errors
  kResource = 3,    // search aborted at a resource cap
  kUncertified = 4,
  kMismatch = 5,    // verify found a mismatch
};

double peak_rss_mb() {
  rusage u{};
  getrusage(RUSAGE_SELF, &u);
  return static_cast<double>(u.ru_maxrss) / 1024.0;
}

Json stats_with_resources(const SearchStats& s) {
  Json j = stats_to_json(s);
  j["peak_layer_bytes"] = s.peak_layer_bytes;
  return j;
}

void write_stats(const std::string& path, Json j, double seconds) {
  if (path.empty()) return;
  j["wall_seconds"] = seconds;
  j["peak_rss_mb"] = peak_rss_mb();
  write_json_file(path, j);
}

void report_record(const StratumRecord& r) {
  std::cerr << "stratum " << r.resolution.spec.to_string() << ": " << to_string(r.resolution.kind);
  if (r.resolution.kind == Resolution::Analytic) std::cerr << ", bound " << r.analytic_value.lo;
  if (r.resolution.kind == Resolution::Reduction) std::cerr << " to " << r.resolution.reduces_to.to_string();
  if (r.search) {
    std::cerr << ", maxnorm " << r.search->maxnorm << ", " << r.search->candidates.size() << " candidates, "
              << r.search->equality.size() << " at the bound, " << r.search->stats.eigen_tested << " matrices tested";
    if (!r.search->candidates.empty()) std::cerr << ", least " << r.search->candidates.front().dilatation.lo;
  }
  std::cerr << "\n";
}

struct GenArgs {
  int punctures = 5;
  std::string stratum;
  std::string out;
  std::string overlay;
};

int cmd_gen(const GenArgs& a) {
  const StratumSpec spec = parse_stratum(a.stratum, a.punctures);
  FoldingAutomaton automaton = build_automaton(spec, a.punctures);
  if (automaton.vertices.empty()) throw DomainError("stratum " + spec.to_string() + " has no train tracks");
  if (!a.overlay.empty()) apply_annotations(automaton, annotations_from_json(read_json_file(a.overlay)));
  const Json j = automaton_to_json(automaton);
  if (a.out.empty() || a.out == "-") {
    std::cout << j.dump(1) << "\n";
  } else {
    write_json_file(a.out, j);
  }
  std::cerr << "wrote " << (a.out.empty() ? "-" : a.out) << ": " << automaton.vertices.size() << " vertices, " << automaton.arrows.size()
            << " arrows, " << automaton.connection_count() << " connections\n";
  return kOk;
}

struct SearchArgs {
  std::string automaton;
  double lambda = 0;
  std::optional<std::int64_t> maxnorm;
  std::string avoid = "auto";
  int max_loop_len = 2;
  int threads = 1;
  double tol = 1e-9;
  bool equality = false;
  std::string format = "json";
  std::string overlay;
  std::string out;
  std::string stats_out;
  bool progress = false;
  std::int64_t max_layer_paths = 400'000'000;
  std::int64_t max_memory_mb = 24 * 1024;
};

int cmd_search(const SearchArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const Json file = read_json_file(a.automaton);
  FoldingAutomaton automaton = automaton_from_json(file);
  if (!a.overlay.empty()) apply_annotations(automaton, annotations_from_json(read_json_file(a.overlay)));
  if (!(a.lambda > 1)) throw DomainError("lambda must exceed 1");

  StratumRecord rec;
  rec.resolution.kind = Resolution::Search;
  rec.resolution.spec = automaton.stratum;
  rec.resolution.spec.boundary_prongs.reset();
  rec.resolution.search_spec = automaton.stratum;
  rec.resolution.justification = "exhaustive search of the folding automaton";
  const auto strata = enumerate_strata(automaton.punctures + 1);
  for (std::size_t i = 0; i < strata.size(); ++i)
    if (strata[i] == rec.resolution.spec.normalized()) rec.index = static_cast<int>(i) + 1;
  rec.lambda_bound = a.lambda;
  rec.equality_bucket = a.equality;
  rec.maxnorm_default = max_norm_bound(a.lambda, automaton.edge_count);
  rec.avoid = a.avoid == "auto" ? build_avoid_set(automaton, a.max_loop_len) : AvoidSet{};

  SearchOptions opt;
  opt.lambda_bound = a.lambda;
  opt.maxnorm = a.maxnorm;
  opt.equality_bucket = a.equality;
  opt.threads = a.threads;
  opt.tol = a.tol;
  opt.progress = a.progress;
  opt.max_layer_paths = a.max_layer_paths;
  opt.max_memory_bytes = a.max_memory_mb << 20;
  rec.automaton = std::move(automaton);
  rec.search = search(*rec.automaton, *rec.avoid, opt);

  const Json invocation = {{"command", "search"},
                           {"automaton", content_digest(file)},
                           {"lambda", a.lambda},
                           {"maxnorm", a.maxnorm ? Json(*a.maxnorm) : Json(nullptr)},
                           {"avoid", a.avoid},
                           {"max_loop_len", a.max_loop_len},
                           {"equality_bucket", a.equality},
                           {"tol", a.tol},
                           {"overlay", !a.overlay.empty()}};
  write_json_file(a.out, search_certificate(rec, invocation));
  report_record(rec);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_stats(a.stats_out, {{"search", stats_with_resources(rec.search->stats)}, {"threads", a.threads}}, secs);
  return kOk;
}

struct CertifyArgs {
  std::string config;
  int preset = 0;
  int threads = 1;
  std::optional<double> tol;
  std::string out;
  std::string stats_out;
};

int cmd_certify(const CertifyArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  CertifyConfig cfg = a.config.empty() ? preset_config(a.preset) : config_from_json(read_json_file(a.config));
  if (a.tol) cfg.tol = *a.tol;
  cfg.threads = a.threads;
  const CertifyRun run = certify(cfg);
  Json invocation = {{"command", "certify"}, {"config", config_to_json(cfg)}, {"punctures", cfg.punctures}};
  write_json_file(a.out, certify_certificate(run, invocation));
  for (const auto& r : run.records) report_record(r);

  Json stats = Json::object();
  for (const auto& r : run.records)
    if (r.search) stats[r.resolution.spec.to_string()] = stats_with_resources(r.search->stats);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_stats(a.stats_out, {{"strata", stats}, {"threads", a.threads}}, secs);

  const Conclusion& c = run.conclusion;
  if (c.witness_stratum > 0)
    std::cout << "minimum dilatation in [" << std::setprecision(12) << c.minimum.lo << ", " << c.minimum.hi
              << "], root of " << c.min_poly.to_string() << "\n";
  if (!c.certified) {
    for (const auto& f : c.failures) std::cout << "FAIL " << f << "\n";
    std::cout << "not certified\n";
    return kUncertified;
  }
  std::cout << "certified\n";
  return kOk;
}

int cmd_verify(const std::string& path, double tol) {
  const VerifyReport rep = verify_certificate(read_json_file(path), tol);
  for (const auto& l : rep.lines) std::cout << l << "\n";
  std::cout << (rep.ok ? "verified" : "verification failed") << "\n";
  return rep.ok ? kOk : kMismatch;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum dilatation search over train track folding automata"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen", "Generate the folding automaton of a stratum");
  g->add_option("--punctures", gen.punctures, "Interior punctures (braid strands)")->default_val(5);
  g->add_option("--stratum", gen.stratum, "Stratum name or singularity list such as 1p5,3u1,b3")->required();
  g->add_option("--out,-o", gen.out, "Output automaton file (default stdout)");
  g->add_option("--overlay", gen.overlay, "Annotation overlay (braid words, identity flags)");

  SearchArgs sa;
  auto* s = app.add_subcommand("search", "Search an automaton for paths below a dilatation bound");
  s->add_option("automaton", sa.automaton, "Automaton file")->required();
  s->add_option("--lambda", sa.lambda, "Dilatation bound")->required();
  s->add_option("--maxnorm", sa.maxnorm, "Entry-sum bound (default from the lambda bound)");
  s->add_option("--avoid", sa.avoid, "Avoid set")->check(CLI::IsMember({"auto", "none"}))->default_val("auto");
  s->add_option("--max-loop-len", sa.max_loop_len, "Longest loop considered for the avoid set")->default_val(2);
  s->add_option("--threads", sa.threads, "Worker threads")->check(CLI::PositiveNumber)->default_val(1);
  s->add_option("--tol", sa.tol, "Certification tolerance")->check(CLI::PositiveNumber)->default_val(1e-9);
  s->add_flag("--equality-bucket", sa.equality, "Also report paths with dilatation equal to the bound");
  s->add_option("--format", sa.format, "Output format")->check(CLI::IsMember({"json"}))->default_val("json");
  s->add_option("--overlay", sa.overlay, "Annotation overlay");
  s->add_option("--out,-o", sa.out, "Output certificate file")->required();
  s->add_option("--stats-out", sa.stats_out, "Timing and memory report");
  s->add_flag("--progress", sa.progress, "Per-layer progress on stderr");
  s->add_option("--max-layer-paths", sa.max_layer_paths, "Abort when a layer holds more paths")
      ->check(CLI::PositiveNumber)
      ->default_val(sa.max_layer_paths);
  s->add_option("--max-memory-mb", sa.max_memory_mb, "Abort when the layers need more memory")
      ->check(CLI::PositiveNumber)
      ->default_val(sa.max_memory_mb);

  CertifyArgs ca;
  auto* c = app.add_subcommand("certify", "Resolve every stratum and certify the minimum");
  auto* cfg_opt = c->add_option("--config", ca.config, "Configuration file");
  c->add_option("--preset", ca.preset, "Built-in configuration for 4 or 5 strands")
      ->check(CLI::IsMember({4, 5}))
      ->excludes(cfg_opt);
  c->add_option("--threads", ca.threads, "Worker threads")->check(CLI::PositiveNumber)->default_val(1);
  c->add_option("--tol", ca.tol, "Certification tolerance")->check(CLI::PositiveNumber);
  c->add_option("--out,-o", ca.out, "Output certificate file")->required();
  c->add_option("--stats-out", ca.stats_out, "Timing and memory report");

  std::string verify_path;
  double verify_tol = 1e-9;
  auto* v = app.add_subcommand("verify", "Recompute and check a certificate");
  v->add_option("certificate", verify_path, "Certificate file")->required();
  v->add_option("--tol", verify_tol, "Largest accepted interval width")->check(CLI::PositiveNumber)->default_val(1e-9);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*g) return cmd_gen(gen);
    if (*s) return cmd_search(sa);
    if (*c) {
      if (ca.config.empty() && ca.preset == 0) throw CLI::RequiredError("--config or --preset");
      return cmd_certify(ca);
    }
    if (*v) return cmd_verify(verify_path, verify_tol);
  } catch (const CLI::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const ResourceError& e) {
    std::cerr << "aborted: " << e.what() << "\n";
    return kResource;
  } catch (const FormatError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kInvalid;
  } catch (const StructureError& e) {
    std::cerr << "invalid track: " << e.what() << "\n";
    return kInvalid;
  } catch (const DomainError& e) {
    std::cerr << "domain error: " << e.what() << "\n";
    return kInvalid;
  } catch (const OverflowError& e) {
    std::cerr << "overflow: " << e.what() << "\n";
    return kInvalid;
  }
  return kUsage;
}
