// Command-line driver: sample files, sweeps and golden checks.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "cubeperc/embedding.hpp"
#include "cubeperc/error.hpp"
#include "cubeperc/harness.hpp"
#include "cubeperc/metrics.hpp"
#include "cubeperc/percolation.hpp"

using namespace cubeperc;

namespace {

constexpr int kExitCellError = 1;
constexpr int kExitConfigError = 2;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string out;
  std::string format = "csv";
  int max_n = kDefaultDimensionCap;
};

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") {
    std::cout << text;
    return;
  }
  std::ofstream file(g.out, std::ios::binary);
  if (!file) throw Error(Errc::InvalidArgument, "cannot write " + g.out);
  file << text;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::ConfigError, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_config(const Globals& g, SweepConfig config) {
  config.max_n = g.max_n;
  config.threads = g.threads;
  const SweepResult result = run_sweep(config);
  emit(g, result.csv);
  if (result.failed_rows > 0) {
    std::cerr << result.failed_rows << " of " << result.rows << " rows failed\n";
    return kExitCellError;
  }
  return 0;
}

// Flags shared by the single-experiment subcommands.
struct CellFlags {
  std::vector<int> n{12};
  std::vector<double> alpha{0.25};
  std::uint64_t seeds = 1;
};

void add_cell_flags(CLI::App* cmd, CellFlags& f) {
  cmd->add_option("-n,--n", f.n, "cube dimensions")->delimiter(',');
  cmd->add_option("-a,--alpha", f.alpha, "exponents, p = n^-alpha")->delimiter(',');
  cmd->add_option("--seeds", f.seeds, "seeds per cell")->check(CLI::PositiveNumber);
}

SweepConfig cell_config(ExperimentKind kind, const Globals& g, const CellFlags& f) {
  SweepConfig c;
  c.kind = kind;
  c.n_values = f.n;
  c.alphas = f.alpha;
  c.base_seed = g.seed;
  c.seed_count = f.seeds;
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Percolated hypercube experiments"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "base seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker threads, 0 = hardware")->capture_default_str();
  app.add_option("--out", g.out, "output path, default stdout");
  app.add_option("--format", g.format, "output format")->check(CLI::IsMember({"csv"}))->capture_default_str();
  app.add_option("--max-n", g.max_n, "largest dimension to materialize")
      ->check(CLI::Range(1, kMaxDimension))
      ->capture_default_str();

  // sample
  auto* sample_cmd = app.add_subcommand("sample", "draw a percolated cube and write it in binary form");
  int sample_n = 12;
  double sample_p = -1.0;
  double sample_alpha = 0.25;
  std::string sample_model = "bond";
  sample_cmd->add_option("-n,--n", sample_n, "dimension")->capture_default_str();
  sample_cmd->add_option("-p,--p", sample_p, "open probability (overrides --alpha)");
  sample_cmd->add_option("-a,--alpha", sample_alpha, "p = n^-alpha")->capture_default_str();
  sample_cmd->add_option("--model", sample_model, "bond or site")
      ->check(CLI::IsMember({"bond", "site"}))
      ->capture_default_str();

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a parameter sweep from a JSON config");
  std::string config_path;
  sweep_cmd->add_option("config", config_path, "sweep config (JSON)")->required();

  CellFlags distort_flags, cycles_flags, route_flags, moments_flags;

  auto* distort_cmd = app.add_subcommand("distort", "good-map distortion per sample");
  add_cell_flags(distort_cmd, distort_flags);
  int exact_cap = kDefaultExactCap;
  std::uint64_t distort_pairs = 1000;
  distort_cmd->add_option("--exact-cap", exact_cap, "largest n evaluated exactly")->capture_default_str();
  distort_cmd->add_option("--pairs", distort_pairs, "sampled pairs past the cap")->capture_default_str();

  auto* cycles_cmd = app.add_subcommand("cycles", "short open cycles near a giant vertex");
  add_cell_flags(cycles_cmd, cycles_flags);
  int max_length = 8;
  int radius = 0;
  cycles_cmd->add_option("--max-length", max_length, "longest cycle")->capture_default_str();
  cycles_cmd->add_option("--radius", radius, "open-distance radius around the vertex")->capture_default_str();

  auto* route_cmd = app.add_subcommand("route", "local routing between adjacent giant vertices");
  add_cell_flags(route_cmd, route_flags);
  std::uint64_t route_pairs = 100;
  std::uint64_t query_budget = 1'000'000;
  route_cmd->add_option("--pairs", route_pairs, "routes per sample")->capture_default_str();
  route_cmd->add_option("--query-budget", query_budget, "distinct edge queries per route")->capture_default_str();

  auto* moments_cmd = app.add_subcommand("moments", "open-path count moments, analytic and Monte Carlo");
  add_cell_flags(moments_cmd, moments_flags);
  int depth = 2;
  std::uint64_t trials = 10'000;
  moments_cmd->add_option("-l,--depth", depth, "NeighborRetrace depth l")->capture_default_str();
  moments_cmd->add_option("--trials", trials, "Monte Carlo trials")->capture_default_str();

  auto* verify_cmd = app.add_subcommand("verify", "rerun golden configs and compare");
  std::string golden_dir = "tests/goldens";
  verify_cmd->add_option("dir", golden_dir, "directory of <name>.json / <name>.csv pairs")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  try {
    if (*sample_cmd) {
      const CubeShape shape(sample_n);
      const double p = sample_p >= 0.0 ? sample_p : std::pow(static_cast<double>(sample_n), -sample_alpha);
      const PercModel model = sample_model == "site" ? PercModel::site_model(p) : PercModel::bond_model(p);
      const auto s = PercolationSample::sample(shape, model, g.seed, SampleMode::Materialized, g.max_n, g.threads);
      const ComponentLabeling labels = components(s);
      std::cerr << "n=" << sample_n << " p=" << format_number(p) << " open_edges=" << s.open_edge_count()
                << " components=" << labels.sizes.size() << " giant=" << labels.giant_size() << "\n";
      if (!g.out.empty()) {
        const auto bytes = serialize(s);
        std::ofstream file(g.out, std::ios::binary);
        if (!file) throw Error(Errc::InvalidArgument, "cannot write " + g.out);
        file.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      }
      return 0;
    }
    if (*sweep_cmd) {
      const SweepConfig config = parse_config(slurp(config_path));
      Globals local = g;
      // The config's own cap holds unless --max-n is given explicitly.
      if (app.get_option("--max-n")->count() == 0) local.max_n = config.max_n;
      if (app.get_option("--threads")->count() == 0) local.threads = config.threads;
      return run_config(local, config);
    }
    if (*distort_cmd) {
      SweepConfig c = cell_config(ExperimentKind::Distortion, g, distort_flags);
      c.exact_cap = exact_cap;
      c.pairs = distort_pairs;
      return run_config(g, c);
    }
    if (*cycles_cmd) {
      SweepConfig c = cell_config(ExperimentKind::CycleCensus, g, cycles_flags);
      c.max_cycle_length = max_length;
      c.radius = radius;
      return run_config(g, c);
    }
    if (*route_cmd) {
      SweepConfig c = cell_config(ExperimentKind::Route, g, route_flags);
      c.pairs = route_pairs;
      c.route_query_budget = query_budget;
      return run_config(g, c);
    }
    if (*moments_cmd) {
      SweepConfig c = cell_config(ExperimentKind::Moments, g, moments_flags);
      c.path_depth = depth;
      c.trials = trials;
      return run_config(g, c);
    }
    if (*verify_cmd) {
      const GoldenReport report = verify_goldens(golden_dir);
      for (const auto& check : report.checks) {
        const char* status = check.status == GoldenStatus::Pass            ? "PASS"
                             : check.status == GoldenStatus::MissingGolden ? "MISSING"
                                                                           : "MISMATCH";
        std::cout << status << " " << check.name;
        if (!check.detail.empty()) std::cout << "  " << check.detail;
        std::cout << "\n";
      }
      return report.passed() ? 0 : kExitCellError;
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == Errc::ConfigError ? kExitConfigError : kExitCellError;
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return kExitCellError;
  }
  return 0;
}
