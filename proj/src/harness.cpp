#include "cubeperc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "cubeperc/cycles.hpp"
#include "cubeperc/embedding.hpp"
#include "cubeperc/error.hpp"
#include "cubeperc/mix.hpp"
#include "cubeperc/parallel.hpp"
#include "cubeperc/percolation.hpp"
#include "cubeperc/routing.hpp"

namespace cubeperc {

using json = nlohmann::json;

std::string_view to_string(ExperimentKind kind) noexcept {
  switch (kind) {
    case ExperimentKind::NeighborDist: return "NeighborDist";
    case ExperimentKind::Distortion: return "Distortion";
    case ExperimentKind::CycleCensus: return "CycleCensus";
    case ExperimentKind::Route: return "Route";
    case ExperimentKind::Moments: return "Moments";
  }
  return "Unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto kind : {ExperimentKind::NeighborDist, ExperimentKind::Distortion, ExperimentKind::CycleCensus,
                    ExperimentKind::Route, ExperimentKind::Moments}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(Errc::ConfigError, "unknown experiment kind '" + std::string(name) + "'");
}

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) noexcept { return mix64(base_seed, index); }

void SweepConfig::validate() const {
  auto fail = [](const std::string& what) { throw Error(Errc::ConfigError, what); };
  if (max_n < 1 || max_n > kMaxDimension) fail("max_n outside [1, 30]");
  for (int n : n_values) {
    if (n < 1 || n > max_n) fail("n=" + std::to_string(n) + " outside [1, max_n=" + std::to_string(max_n) + "]");
    if (kind == ExperimentKind::Moments && (path_depth < 1 || path_depth > n - 1)) {
      fail("path_depth must lie in [1, n-1] for every n");
    }
  }
  for (double a : alphas) {
    if (!(a >= 0.0) || !std::isfinite(a)) fail("alpha must be a finite non-negative number");
  }
  if (pairs < 1) fail("pairs must be positive");
  if (cutoff < 0) fail("cutoff must be non-negative");
  if (exact_cap < 1 || exact_cap > kMaxDimension) fail("exact_cap outside [1, 30]");
  if (trials < 1) fail("trials must be positive");
  if (max_cycle_length < 3) fail("max_cycle_length must be at least 3");
  if (radius < 0) fail("radius must be non-negative");
  if (cycle_budget < 1) fail("cycle_budget must be positive");
  if (route_radius < 1) fail("route_radius must be positive");
  if (route_query_budget < 1) fail("route_query_budget must be positive");
}

SweepConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw Error(Errc::ConfigError, "config must be a JSON object");
  SweepConfig c;
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "kind") c.kind = parse_experiment_kind(value.get<std::string>());
      else if (key == "n") c.n_values = value.get<std::vector<int>>();
      else if (key == "alpha") c.alphas = value.get<std::vector<double>>();
      else if (key == "base_seed") c.base_seed = value.get<std::uint64_t>();
      else if (key == "seed_count") c.seed_count = value.get<std::uint64_t>();
      else if (key == "threads") c.threads = value.get<unsigned>();
      else if (key == "max_n") c.max_n = value.get<int>();
      else if (key == "pairs") c.pairs = value.get<std::uint64_t>();
      else if (key == "cutoff") c.cutoff = value.get<int>();
      else if (key == "exact_cap") c.exact_cap = value.get<int>();
      else if (key == "path_depth") c.path_depth = value.get<int>();
      else if (key == "trials") c.trials = value.get<std::uint64_t>();
      else if (key == "max_cycle_length") c.max_cycle_length = value.get<int>();
      else if (key == "radius") c.radius = value.get<int>();
      else if (key == "cycle_budget") c.cycle_budget = value.get<std::uint64_t>();
      else if (key == "route_radius") c.route_radius = value.get<int>();
      else if (key == "route_query_budget") c.route_query_budget = value.get<std::uint64_t>();
      else if (key == "tolerances") c.tolerances = value.get<std::map<std::string, double>>();
      else throw Error(Errc::ConfigError, "unknown config key '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw Error(Errc::ConfigError, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

std::string to_json(const SweepConfig& c) {
  json doc = {
      {"kind", std::string(to_string(c.kind))},
      {"n", c.n_values},
      {"alpha", c.alphas},
      {"base_seed", c.base_seed},
      {"seed_count", c.seed_count},
      {"max_n", c.max_n},
      {"pairs", c.pairs},
      {"cutoff", c.cutoff},
      {"exact_cap", c.exact_cap},
      {"path_depth", c.path_depth},
      {"trials", c.trials},
      {"max_cycle_length", c.max_cycle_length},
      {"radius", c.radius},
      {"cycle_budget", c.cycle_budget},
      {"route_radius", c.route_radius},
      {"route_query_budget", c.route_query_budget},
  };
  if (!c.tolerances.empty()) doc["tolerances"] = c.tolerances;
  return doc.dump(2);
}

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, result.ptr);
}

std::vector<std::string> experiment_columns(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::NeighborDist:
      return {"median_adj_dist", "frac_le_cutoff", "overflow_frac", "giant_frac", "pairs", "exhaustive"};
    case ExperimentKind::Distortion:
      return {"l", "m", "map_built", "bad_vertices", "exactness", "d_plus", "d_minus", "distortion",
              "stretch_bound", "within_bound"};
    case ExperimentKind::CycleCensus:
      return {"vertex", "max_length", "radius", "cycles", "cycles_len4", "truncated", "expansions", "giant_frac"};
    case ExperimentKind::Route:
      return {"routes", "found", "not_found", "exhausted", "median_queries", "mean_queries", "mean_path_len",
              "locality_ok"};
    case ExperimentKind::Moments:
      return {"l", "family_size", "analytic_mean", "second_moment", "second_exact", "mc_mean", "mc_trials",
              "z_score", "scaled_correction"};
  }
  return {};
}

namespace {

using Row = std::vector<std::string>;

template <typename T>
std::string str(T v) {
  return std::to_string(v);
}

double giant_fraction(const ComponentLabeling& labels, const CubeShape& shape) {
  return static_cast<double>(labels.giant_size()) / static_cast<double>(shape.vertex_count());
}

Row neighbor_dist_row(const SweepConfig& c, const CubeShape& shape, double p, std::uint64_t seed) {
  const auto sample = PercolationSample::sample(shape, PercModel::bond_model(p), seed, SampleMode::Materialized,
                                                c.max_n, 1);
  const ComponentLabeling labels = components(sample);
  const auto stats = neighbor_distance_stats(sample, labels, c.pairs, c.cutoff, trial_seed(seed, 1));
  return {str(stats.median()),          format_number(stats.frac_within_cutoff()),
          format_number(stats.overflow_frac()), format_number(giant_fraction(labels, shape)),
          str(stats.pairs),             str(stats.exhaustive ? 1 : 0)};
}

Row distortion_row(const SweepConfig& c, const CubeShape& shape, double alpha, double p, std::uint64_t seed) {
  const CoordinatePartition part = make_partition(shape, alpha);
  const auto sample = PercolationSample::sample(shape, PercModel::bond_model(p), seed, SampleMode::Materialized,
                                                c.max_n, 1);
  const int stretch = 2 * part.l + 13;
  const GoodMapResult built = build_good_map(sample, part, 1);
  if (const auto* failure = std::get_if<MapFailure>(&built)) {
    return {str(part.l), str(part.m), "0", str(failure->bad_vertices.size()), "", "", "",
            "", str(stretch), ""};
  }
  const VertexMap& map = std::get<VertexMap>(built);
  const DistortionMode mode = shape.n() <= c.exact_cap ? DistortionMode::exact()
                                                       : DistortionMode::sampled(c.pairs, trial_seed(seed, 3));
  const DistortionReport r = evaluate_distortion(sample, map, mode, c.exact_cap);
  const bool within = !r.infinite && r.d_plus <= stretch && 3 * r.minus_num > r.minus_den;
  return {str(part.l),
          str(part.m),
          "1",
          "0",
          r.exactness == Exactness::Exact ? "exact" : "sampled",
          format_number(r.d_plus),
          format_number(r.d_minus),
          format_number(r.distortion),
          str(stretch),
          str(within ? 1 : 0)};
}

Row cycle_census_row(const SweepConfig& c, const CubeShape& shape, double p, std::uint64_t seed) {
  const auto sample = PercolationSample::sample(shape, PercModel::bond_model(p), seed, SampleMode::Materialized,
                                                c.max_n, 1);
  const ComponentLabeling labels = components(sample);
  const std::vector<Vertex> giant = labels.members(labels.giant);
  CounterRng rng(trial_seed(seed, 2));
  const Vertex v = giant[static_cast<std::size_t>(rng.below(giant.size()))];
  const CycleCensus census = find_cycles_near(sample, v, {c.max_cycle_length, c.radius, c.cycle_budget});
  return {str(v),
          str(c.max_cycle_length),
          str(c.radius),
          str(census.cycles.size()),
          str(census.count_of_length(4)),
          str(census.budget_exceeded ? 1 : 0),
          str(census.expansions),
          format_number(giant_fraction(labels, shape))};
}

Row route_row(const SweepConfig& c, const CubeShape& shape, double p, std::uint64_t seed) {
  const PercModel model = PercModel::bond_model(p);
  const auto materialized = PercolationSample::sample(shape, model, seed, SampleMode::Materialized, c.max_n, 1);
  const auto lazy = PercolationSample::sample(shape, model, seed, SampleMode::Lazy);
  const ComponentLabeling labels = components(materialized);
  const auto pairs = giant_adjacent_pairs(shape, labels, c.pairs, trial_seed(seed, 4));

  std::uint64_t found = 0, not_found = 0, exhausted = 0, path_total = 0;
  double query_total = 0.0;
  bool locality = true;
  std::vector<std::uint64_t> queries;
  for (const auto& [a, b] : pairs) {
    const RouteTrace t = local_route(lazy, a, b, {c.route_radius, c.route_query_budget, false});
    queries.push_back(t.queries);
    query_total += static_cast<double>(t.queries);
    locality = locality && audit_locality(t, lazy, a, b);
    switch (t.outcome) {
      case RouteOutcome::Found:
        ++found;
        path_total += t.path.size() - 1;
        break;
      case RouteOutcome::NotFound: ++not_found; break;
      case RouteOutcome::BudgetExhausted: ++exhausted; break;
    }
  }
  std::sort(queries.begin(), queries.end());
  const std::string median = queries.empty() ? "" : str(queries[(queries.size() - 1) / 2]);
  const std::string mean_q = queries.empty() ? "" : format_number(query_total / static_cast<double>(queries.size()));
  const std::string mean_len =
      found == 0 ? "" : format_number(static_cast<double>(path_total) / static_cast<double>(found));
  return {str(pairs.size()), str(found), str(not_found), str(exhausted), median, mean_q,
          mean_len, str(locality ? 1 : 0)};
}

Row moments_row(const SweepConfig& c, const CubeShape& shape, double alpha, double p, std::uint64_t seed) {
  const PathFamilySpec spec{shape, NeighborRetrace{c.path_depth}, 0, 1};
  const MomentEstimate est = analytic_moments(spec, p);
  const MonteCarloCount mc = monte_carlo_open_paths(spec, p, c.trials, seed);
  const double sigma = std::sqrt(std::max(0.0, est.variance()) / static_cast<double>(mc.trials));
  const double z = sigma > 0.0 ? (mc.mean - est.mean) / sigma : 0.0;
  const double scaled = est.mean > 0.0 ? (est.second_moment() / (est.mean * est.mean) - 1.0) *
                                             std::pow(static_cast<double>(shape.n()), 1.0 - 2.0 * alpha)
                                       : 0.0;
  return {str(c.path_depth),
          str(est.family_size),
          format_number(est.mean),
          format_number(est.second_moment()),
          str(est.capped() ? 0 : 1),
          format_number(mc.mean),
          str(mc.trials),
          format_number(z),
          format_number(scaled)};
}

std::string csv_field(const std::string& raw) {
  if (raw.find_first_of(",\"\r\n") == std::string::npos) return raw;
  std::string out = "\"";
  for (char ch : raw) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

struct Cell {
  int n;
  double alpha;
  std::uint64_t seed_index;
};

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  config.validate();
  std::vector<int> ns = config.n_values;
  std::vector<double> alphas = config.alphas;
  std::sort(ns.begin(), ns.end());
  std::sort(alphas.begin(), alphas.end());

  std::vector<Cell> cells;
  for (int n : ns) {
    for (double a : alphas) {
      for (std::uint64_t i = 0; i < config.seed_count; ++i) cells.push_back({n, a, i});
    }
  }

  const std::vector<std::string> columns = experiment_columns(config.kind);
  std::vector<std::string> lines(cells.size());
  std::vector<char> failed(cells.size(), 0);
  auto run_cell = [&](std::size_t k) {
    const Cell& cell = cells[k];
    const CubeShape shape(cell.n);
    const double p = std::pow(static_cast<double>(cell.n), -cell.alpha);
    const std::uint64_t seed = trial_seed(config.base_seed, cell.seed_index);
    Row values;
    std::string error;
    try {
      switch (config.kind) {
        case ExperimentKind::NeighborDist: values = neighbor_dist_row(config, shape, p, seed); break;
        case ExperimentKind::Distortion: values = distortion_row(config, shape, cell.alpha, p, seed); break;
        case ExperimentKind::CycleCensus: values = cycle_census_row(config, shape, p, seed); break;
        case ExperimentKind::Route: values = route_row(config, shape, p, seed); break;
        case ExperimentKind::Moments: values = moments_row(config, shape, cell.alpha, p, seed); break;
      }
    } catch (const std::exception& e) {
      error = e.what();
      values.assign(columns.size(), "");
      failed[k] = 1;
    }
    std::string line = str(cell.n) + "," + format_number(cell.alpha) + "," + format_number(p) + "," + str(seed);
    for (const auto& v : values) line += "," + csv_field(v);
    line += "," + csv_field(error) + "\n";
    lines[k] = std::move(line);
  };

  const unsigned workers = std::min<unsigned>(resolve_threads(config.threads),
                                              static_cast<unsigned>(std::max<std::size_t>(cells.size(), 1)));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < cells.size(); k = next++) run_cell(k);
  };
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  SweepResult result;
  result.csv = "# schema=cubeperc." + std::string(to_string(config.kind)) + ".v1\n";
  result.csv += "n,alpha,p,seed";
  for (const auto& col : columns) result.csv += "," + col;
  result.csv += ",error\n";
  for (const auto& line : lines) result.csv += line;
  result.rows = cells.size();
  result.failed_rows = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  return result;
}

bool GoldenReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const GoldenCheck& c) { return c.status == GoldenStatus::Pass; });
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        out.back() += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        out.back() += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.emplace_back();
    } else {
      out.back() += ch;
    }
  }
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s == "inf") {
    out = std::numeric_limits<double>::infinity();
    return true;
  }
  const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
  return r.ec == std::errc() && r.ptr == s.data() + s.size();
}

}  // namespace

GoldenCheck compare_csv(const std::string& name, const std::string& expected, const std::string& actual,
                        const std::map<std::string, double>& tolerances) {
  GoldenCheck check{name, GoldenStatus::Pass, ""};
  if (tolerances.empty() && expected == actual) return check;
  const auto exp_lines = split_lines(expected);
  const auto act_lines = split_lines(actual);
  auto mismatch = [&](std::size_t line, const std::string& what) {
    check.status = GoldenStatus::Mismatch;
    check.detail = "line " + std::to_string(line + 1) + ": " + what;
    return check;
  };
  if (exp_lines.size() != act_lines.size()) {
    return mismatch(std::min(exp_lines.size(), act_lines.size()),
                    "expected " + std::to_string(exp_lines.size()) + " lines, got " + std::to_string(act_lines.size()));
  }
  std::vector<std::string> header;
  for (std::size_t i = 0; i < exp_lines.size(); ++i) {
    const std::string& e = exp_lines[i];
    const std::string& a = act_lines[i];
    if (e.rfind('#', 0) == 0 || header.empty()) {
      if (e != a) return mismatch(i, "expected '" + e + "', got '" + a + "'");
      if (e.rfind('#', 0) != 0) header = split_fields(e);
      continue;
    }
    const auto ef = split_fields(e);
    const auto af = split_fields(a);
    if (ef.size() != af.size() || ef.size() != header.size()) return mismatch(i, "field count differs");
    for (std::size_t f = 0; f < ef.size(); ++f) {
      if (ef[f] == af[f]) continue;
      const auto tol = tolerances.find(header[f]);
      double x = 0.0;
      double y = 0.0;
      if (tol != tolerances.end() && parse_double(ef[f], x) && parse_double(af[f], y) &&
          std::abs(x - y) <= tol->second) {
        continue;
      }
      return mismatch(i, "column " + header[f] + ": expected '" + ef[f] + "', got '" + af[f] + "'");
    }
  }
  if (tolerances.empty() && expected != actual) return mismatch(0, "byte streams differ");
  return check;
}

GoldenReport verify_goldens(const std::filesystem::path& directory) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw Error(Errc::MissingGolden, "golden directory " + directory.string() + " not found");
  }
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (entry.path().extension() == ".json") configs.push_back(entry.path());
  }
  std::sort(configs.begin(), configs.end());
  if (configs.empty()) throw Error(Errc::MissingGolden, "no golden configs in " + directory.string());

  auto slurp = [](const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };

  GoldenReport report;
  for (const auto& cfg_path : configs) {
    const std::string name = cfg_path.stem().string();
    fs::path csv_path = cfg_path;
    csv_path.replace_extension(".csv");
    if (!fs::exists(csv_path)) {
      report.checks.push_back({name, GoldenStatus::MissingGolden, csv_path.filename().string() + " not found"});
      continue;
    }
    const SweepConfig config = parse_config(slurp(cfg_path));
    const SweepResult result = run_sweep(config);
    report.checks.push_back(compare_csv(name, slurp(csv_path), result.csv, config.tolerances));
  }
  return report;
}

}  // namespace cubeperc
