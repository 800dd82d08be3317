#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "ccm/ccm.hpp"

namespace fs = std::filesystem;
using ccm::Json;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kInputError = 2;
constexpr int kVerificationFailure = 3;

struct SamplerFlags {
  std::string edges;
  std::string colors;
  std::string algo = "sirius";
  std::int64_t iters = -1;
  bool lazy = false;
  bool strict = false;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  void add(CLI::App* app, bool require_inputs = true) {
    auto* e = app->add_option("--edges", edges, "edge list file (u<TAB>v per line)");
    auto* c = app->add_option("--colors", colors, "vertex color file (vertex<TAB>color per line)");
    if (require_inputs) {
      e->required();
      c->required();
    }
    app->add_option("--algo", algo, "sirius | sirius-b | cm")->capture_default_str();
    app->add_option("--iters", iters, "iterations per chain (default ceil(m ln m))");
    app->add_flag("--lazy", lazy, "run the lazy chain");
    app->add_flag("--strict", strict, "refuse to run a chain without an aperiodicity witness");
    app->add_option("--seed", seed, "64-bit seed")->envname("CCM_SEED")->capture_default_str();
    app->add_option("--threads", threads, "parallel chains")->capture_default_str();
  }

  ccm::ChainConfig config(const ccm::ColoredMultigraph& g) const {
    ccm::ChainConfig c;
    c.algorithm = ccm::parse_algorithm(algo);
    c.iterations = iters >= 0 ? std::uint64_t(iters) : ccm::default_iterations(g.num_edges());
    c.laziness = lazy ? ccm::Laziness::Half : ccm::Laziness::None;
    c.strict = strict;
    c.seed = seed;
    return c;
  }
};

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ccm::InputError(path.string(), 0, "cannot write file");
  out << text;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json manifest(const std::string& command, const std::string& edges, const std::string& colors,
              const ccm::ChainConfig& cfg, std::size_t z, const Json& score, const std::string& out) {
  return Json{{"tool", "ccm"},
              {"version", ccm::kVersion},
              {"command", command},
              {"inputs", {{"edges", edges}, {"colors", colors}}},
              {"chain", ccm::to_json(cfg)},
              {"samples", z},
              {"score", score},
              {"out", out},
              {"resolved_seed", cfg.seed}};
}

std::string sample_name(std::size_t i, std::size_t z) {
  std::ostringstream os;
  const int width = std::max<int>(3, int(std::to_string(z - 1).size()));
  os << "sample_" << std::setw(width) << std::setfill('0') << i << ".tsv";
  return os.str();
}

int run_sample(const std::string& edges, const std::string& colors, ccm::ChainConfig cfg, std::size_t z,
               std::size_t threads, const std::string& out) {
  const auto lg = ccm::load_graph_files(colors, edges);
  if (!cfg.iterations) cfg.iterations = ccm::default_iterations(lg.graph.num_edges());
  if (z == 0) throw ccm::InputError("--samples", 0, "need at least one sample");
  fs::create_directories(out);
  std::cerr << "ccm: sampling " << z << " graph(s), n=" << lg.graph.num_vertices() << " m=" << lg.graph.num_edges()
            << " t=" << *cfg.iterations << " algo=" << ccm::to_string(cfg.algorithm) << "\n";
  const auto ens = ccm::sample_ensemble(lg.graph, cfg, {z, threads, 0});

  Json tallies = Json::array();
  for (std::size_t i = 0; i < z; ++i) {
    std::ostringstream es;
    ccm::write_edges(es, ens.graphs[i], lg.vertex_names);
    write_file(fs::path(out) / sample_name(i, z), es.str());
    Json t = ccm::to_json(ens.results[i].tally);
    t["sample"] = sample_name(i, z);
    t["laziness_forced"] = ens.results[i].laziness_forced;
    tallies.push_back(t);
    if (ens.results[i].laziness_forced && i == 0)
      std::cerr << "ccm: warning: no aperiodicity witness, running the lazy chain\n";
  }
  std::ostringstream cs;
  ccm::write_colors(cs, lg);
  write_file(fs::path(out) / "colors.tsv", cs.str());
  write_file(fs::path(out) / "tallies.json", dump(tallies));
  write_file(fs::path(out) / "manifest.json", dump(manifest("sample", edges, colors, cfg, z, nullptr, out)));
  std::cerr << "ccm: wrote " << z << " sample(s) to " << out << "\n";
  return kOk;
}

int run_diagnose(const SamplerFlags& f, std::optional<std::uint64_t> stride, const std::string& out) {
  const auto lg = ccm::load_graph_files(f.colors, f.edges);
  auto cfg = f.config(lg.graph);
  cfg.trace = true;
  cfg.trace_stride = stride;
  auto g = lg.graph;
  std::mt19937_64 rng(ccm::derive_seed(cfg.seed, 0));
  const double start_r = ccm::degree_assortativity(g);
  std::cerr << "ccm: diagnosing t=" << *cfg.iterations << " algo=" << ccm::to_string(cfg.algorithm) << "\n";
  const auto result = ccm::run_chain(g, cfg, rng);

  fs::create_directories(out);
  std::ostringstream csv;
  ccm::write_trace_csv(csv, result.trace);
  write_file(fs::path(out) / "trace.csv", csv.str());

  const auto& t = result.tally;
  const double steps = double(t.total() - t.lazy_hold);
  Json summary{{"n", g.num_vertices()},
               {"m", g.num_edges()},
               {"theta", g.num_edges() >= 2 ? Json(ccm::theta(g)) : Json(nullptr)},
               {"tally", ccm::to_json(t)},
               {"out_of_space_fraction", steps > 0 ? Json(double(t.out_of_space) / steps) : Json(nullptr)},
               {"cdes_fraction", steps > 0 ? Json(double(t.valid()) / steps) : Json(nullptr)},
               {"acceptance_rate", t.valid() > 0 ? Json(double(t.accepted) / double(t.valid())) : Json(nullptr)},
               {"laziness_forced", result.laziness_forced},
               {"assortativity_initial", ccm::number_or_null(start_r)},
               {"assortativity_final", ccm::number_or_null(ccm::degree_assortativity(g))},
               {"trace_rows", result.trace.snapshots.size()}};
  write_file(fs::path(out) / "summary.json", dump(summary));
  write_file(fs::path(out) / "manifest.json", dump(manifest("diagnose", f.edges, f.colors, cfg, 1, nullptr, out)));
  std::cout << dump(summary);
  return kOk;
}

int run_stats(const std::string& edges, const std::string& colors, std::size_t top_k) {
  const auto lg = ccm::load_graph_files(colors, edges);
  std::cout << dump(ccm::graph_stats(lg.graph, lg.vertex_names, lg.color_names, top_k));
  return kOk;
}

int run_test(const SamplerFlags& f, const std::string& score_name, std::size_t z, const ccm::RwcConfig& rcfg,
             const std::string& out) {
  const auto lg = ccm::load_graph_files(f.colors, f.edges);
  const auto cfg = f.config(lg.graph);
  const ccm::Score score = ccm::parse_score(score_name);
  std::cerr << "ccm: significance test score=" << ccm::to_string(score) << " null=" << ccm::to_string(cfg.algorithm)
            << " z=" << z << "\n";
  const auto r = ccm::significance_test(lg.graph, cfg, score, z, rcfg, f.threads);
  Json j = ccm::to_json(r);
  j["config"] = {{"chain", ccm::to_json(cfg)}, {"samples", z}, {"rwc", ccm::to_json(rcfg)}};
  if (!out.empty()) {
    fs::create_directories(out);
    write_file(fs::path(out) / "significance.json", dump(j));
    write_file(fs::path(out) / "manifest.json",
               dump(manifest("test", f.edges, f.colors, cfg, z, ccm::to_string(score), out)));
  }
  std::cout << dump(j);
  return kOk;
}

int run_verify(const std::string& edges, const std::string& colors, std::size_t limit, const std::string& dot) {
  const auto lg = ccm::load_graph_files(colors, edges);
  const auto atlas = ccm::enumerate_states(lg.graph, limit);
  std::cerr << "ccm: " << atlas.size() << " states\n";
  const auto report = ccm::verify_theorems(atlas);
  if (!dot.empty()) {
    std::ostringstream os;
    ccm::write_dot(os, atlas);
    write_file(dot, os.str());
  }
  std::cout << dump(ccm::to_json(report));
  return report.passed() ? kOk : kVerificationFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Samplers for multigraphs with a fixed colored degree matrix"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ccm::kVersion);

  SamplerFlags sample_flags;
  std::size_t samples = 1;
  std::string sample_out = "ccm_out";
  std::string manifest_path;
  auto* sample = app.add_subcommand("sample", "draw graphs with the input's CDM");
  sample_flags.add(sample, false);
  sample->add_option("--samples", samples, "number of independent samples")->capture_default_str();
  sample->add_option("--out", sample_out, "output directory")->capture_default_str();
  sample->add_option("--manifest", manifest_path, "re-run a saved manifest");

  SamplerFlags diag_flags;
  std::uint64_t stride = 0;
  std::string diag_out = "ccm_diagnose";
  auto* diagnose = app.add_subcommand("diagnose", "trace assortativity and outcome tallies");
  diag_flags.add(diagnose);
  diagnose->add_option("--trace-stride", stride, "iterations between snapshots (default t/100)");
  diagnose->add_option("--out", diag_out, "output directory")->capture_default_str();

  std::string stats_edges, stats_colors;
  std::size_t top_k = 10;
  auto* stats = app.add_subcommand("stats", "theta, M, top-degree M_v, JCM and CDM digest");
  stats->add_option("--edges", stats_edges)->required();
  stats->add_option("--colors", stats_colors)->required();
  stats->add_option("--top-k", top_k)->capture_default_str();

  SamplerFlags test_flags;
  std::string score = "rwc", null_model;
  std::size_t test_samples = 100;
  ccm::RwcConfig rcfg;
  std::string test_out;
  auto* test = app.add_subcommand("test", "significance of a score against null samples");
  test_flags.add(test);
  test->add_option("--score", score, "rwc | m")->capture_default_str();
  test->add_option("--null", null_model, "sirius | sirius-b | cm (alias of --algo)");
  test->add_option("--samples", test_samples)->capture_default_str();
  test->add_option("--restart", rcfg.restart)->capture_default_str();
  test->add_option("--influencers", rcfg.influencers)->capture_default_str();
  test->add_option("--out", test_out, "also write significance.json and manifest.json here");

  std::string verify_edges, verify_colors, dot;
  std::size_t limit = 5000;
  auto* verify = app.add_subcommand("verify", "enumerate the state space and check the chain properties");
  verify->add_option("--edges", verify_edges)->required();
  verify->add_option("--colors", verify_colors)->required();
  verify->add_option("--limit", limit)->capture_default_str();
  verify->add_option("--dot", dot, "write the move graph in DOT format");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInputError;
  }

  try {
    if (*sample) {
      if (!manifest_path.empty()) {
        std::ifstream in(manifest_path);
        if (!in) throw ccm::InputError(manifest_path, 0, "cannot open manifest");
        const Json m = Json::parse(in);
        const std::string out = sample->count("--out") ? sample_out : m.at("out").get<std::string>();
        return run_sample(m.at("inputs").at("edges").get<std::string>(),
                          m.at("inputs").at("colors").get<std::string>(), ccm::chain_config_from_json(m.at("chain")),
                          m.at("samples").get<std::size_t>(), sample_flags.threads, out);
      }
      if (sample_flags.edges.empty() || sample_flags.colors.empty())
        throw ccm::InputError("sample", 0, "--edges and --colors are required without --manifest");
      ccm::ChainConfig cfg;
      cfg.algorithm = ccm::parse_algorithm(sample_flags.algo);
      if (sample_flags.iters >= 0) cfg.iterations = std::uint64_t(sample_flags.iters);
      cfg.laziness = sample_flags.lazy ? ccm::Laziness::Half : ccm::Laziness::None;
      cfg.strict = sample_flags.strict;
      cfg.seed = sample_flags.seed;
      return run_sample(sample_flags.edges, sample_flags.colors, cfg, samples, sample_flags.threads, sample_out);
    }
    if (*diagnose) {
      std::optional<std::uint64_t> s;
      if (stride > 0) s = stride;
      return run_diagnose(diag_flags, s, diag_out);
    }
    if (*stats) return run_stats(stats_edges, stats_colors, top_k);
    if (*test) {
      if (!null_model.empty()) test_flags.algo = null_model;
      return run_test(test_flags, score, test_samples, rcfg, test_out);
    }
    if (*verify) return run_verify(verify_edges, verify_colors, limit, dot);
  } catch (const ccm::InputError& e) {
    std::cerr << "ccm: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ccm::GraphError& e) {
    std::cerr << "ccm: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const ccm::AtlasLimitExceeded& e) {
    std::cerr << "ccm: " << e.what() << "\n";
    return kInputError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "ccm: input error: " << e.what() << "\n";
    return kInputError;
  } catch (const Json::exception& e) {
    std::cerr << "ccm: malformed manifest: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "ccm: error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kOk;
}
