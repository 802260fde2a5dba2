// ltn: run linear transform network experiments and write CSV results.
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "ltn/config.hpp"
#include "ltn/csv.hpp"
#include "ltn/error.hpp"
#include "ltn/experiments.hpp"

namespace fs = std::filesystem;
using namespace ltn;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> restarts;
  std::string out = ".";
};

// --seed beats LTN_SEED, which beats the config file.
std::optional<std::uint64_t> effective_seed(const Common& c) {
  if (c.seed) return c.seed;
  if (const char* env = std::getenv("LTN_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') throw Error(ErrorCode::ConfigError, "LTN_SEED must be an unsigned integer");
    return v;
  }
  return std::nullopt;
}

void apply(const Common& c, std::uint64_t& seed, int& restarts) {
  if (auto s = effective_seed(c)) seed = *s;
  if (c.restarts) {
    if (*c.restarts < 1) throw Error(ErrorCode::ConfigError, "--restarts must be positive");
    restarts = *c.restarts;
  }
}

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "JSON configuration file");
  if (config_required) opt->required();
  app->add_option("--seed", c.seed, "random seed (overrides LTN_SEED and the config)");
  app->add_option("--restarts", c.restarts, "number of random restarts");
  app->add_option("--out", c.out, "output directory")->capture_default_str();
}

fs::path out_dir(const Common& c) {
  fs::create_directories(c.out);
  return fs::path(c.out);
}

int run_solve(const Common& c) {
  NetworkConfig cfg = load_network_config(c.config);
  const fs::path dir = out_dir(c);
  EdgeTransforms transforms;
  std::vector<double> per_receiver;
  double distortion = 0.0;
  int iterations = 0;
  std::vector<std::vector<double>> traces;
  if (cfg.noisy) {
    apply(c, cfg.noisy_options.seed, cfg.noisy_options.restarts);
    const NoisySolveState st = optimize_noisy(cfg.graph, cfg.model, cfg.W, cfg.noisy_options);
    transforms = st.transforms;
    per_receiver = st.receiver_distortion;
    distortion = st.distortion;
    iterations = st.iterations;
    traces = st.restart_traces;
  } else {
    apply(c, cfg.ideal.seed, cfg.ideal.restarts);
    const IdealSolveState st = optimize_ideal(cfg.graph, cfg.model, cfg.W, cfg.ideal);
    transforms = st.transforms;
    per_receiver = st.receiver_distortion;
    distortion = st.distortion;
    iterations = st.iterations;
    traces = st.restart_traces;
    for (size_t k = 0; k < st.transform.layers.size(); ++k)
      write_matrix_csv((dir / ("layer_" + std::to_string(k + 1) + ".csv")).string(), st.transform.layers[k]);
  }
  write_trace_csv((dir / "trace.csv").string(), traces);
  {
    CsvWriter w((dir / "summary.csv").string(), {"quantity", "value"});
    w.row({"distortion", format_number(distortion)});
    w.row({"iterations", std::to_string(iterations)});
    for (size_t i = 0; i < per_receiver.size(); ++i)
      w.row({"D_" + cfg.graph.name(cfg.graph.receivers()[i]), format_number(per_receiver[i])});
  }
  for (int e = 0; e < cfg.graph.num_edges(); ++e) {
    const Edge& ed = cfg.graph.edge(e);
    write_matrix_csv((dir / ("L_" + cfg.graph.name(ed.tail) + "_" + cfg.graph.name(ed.head) + ".csv")).string(),
                     transforms[static_cast<size_t>(e)]);
  }
  std::printf("distortion %s after %d iterations\n", format_number(distortion).c_str(), iterations);
  return 0;
}

int run_bounds(const Common& c) {
  const NetworkConfig cfg = load_network_config(c.config);
  const CutsetScan scan = cutset_scan(cfg.graph, cfg.model, cfg.W, cfg.noisy);
  write_bounds_csv((out_dir(c) / "bounds.csv").string(), cfg.graph, scan);
  std::printf("%zu cuts, tightest bound %s\n", scan.reports.size(), format_number(scan.bound).c_str());
  return 0;
}

int run_hybrid_cmd(const Common& c) {
  HybridConfig cfg = c.config.empty() ? HybridConfig{} : load_hybrid_config(c.config);
  apply(c, cfg.solver.seed, cfg.solver.restarts);
  const HybridResult res = run_hybrid(cfg);
  write_hybrid_csv(out_dir(c).string(), res);
  for (const HybridRow& r : res.rows)
    std::printf("c=%d %-12s D=%s bound=%s\n", r.c, to_string(r.mode), format_number(r.distortion).c_str(),
                format_number(r.bound_ideal).c_str());
  return 0;
}

int run_noisy_cmd(const Common& c) {
  NoisyGridConfig cfg = c.config.empty() ? NoisyGridConfig{} : load_noisy_grid_config(c.config);
  apply(c, cfg.seed, cfg.restarts);
  const std::vector<NoisyGridRow> rows = run_distributed_noisy(cfg);
  write_noisy_grid_csv((out_dir(c) / "noisy_grid.csv").string(), rows);
  std::printf("%zu grid points written\n", rows.size());
  return 0;
}

int run_unicast_cmd(const Common& c) {
  UnicastConfig cfg = c.config.empty() ? UnicastConfig{} : load_unicast_config(c.config);
  apply(c, cfg.solver.seed, cfg.solver.restarts);
  const UnicastResult res = run_multiple_unicast(cfg);
  write_unicast_csv(out_dir(c).string(), res);
  for (const TableRow& r : res.table)
    std::printf("%-8s %-18s %s\n", to_string(r.assignment), r.method.c_str(), format_number(r.value).c_str());
  return 0;
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::NumericalFailure:
    case ErrorCode::MaxIterExceeded:
    case ErrorCode::Infeasible:
    case ErrorCode::SingularInnovationGram:
    case ErrorCode::NotNilpotent:
    case ErrorCode::GenerationFailed:
      return kExitNumerical;
    default:
      return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear transform network optimization and cut-set bounds"};
  app.require_subcommand(1);
  Common solve, bounds, hybrid, noisy, unicast;
  add_common(app.add_subcommand("solve", "optimize one configured network"), solve, true);
  add_common(app.add_subcommand("bounds", "cut-set lower bounds for one configured network"), bounds, true);
  add_common(app.add_subcommand("hybrid", "distortion versus source bandwidth on the hybrid network"), hybrid, false);
  add_common(app.add_subcommand("distributed-noisy", "power-compression-distortion grid"), noisy, false);
  add_common(app.add_subcommand("multiple-unicast", "butterfly baselines and distortion region"), unicast, false);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  try {
    if (app.got_subcommand("solve")) return run_solve(solve);
    if (app.got_subcommand("bounds")) return run_bounds(bounds);
    if (app.got_subcommand("hybrid")) return run_hybrid_cmd(hybrid);
    if (app.got_subcommand("distributed-noisy")) return run_noisy_cmd(noisy);
    return run_unicast_cmd(unicast);
  } catch (const Error& e) {
    std::cerr << "ltn: " << e.what() << "\n";
    return exit_code(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "ltn: " << e.what() << "\n";
    return kExitConfig;
  }
}
