#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/metrics.hpp"

namespace cubeperc {

enum class ExperimentKind { NeighborDist, Distortion, CycleCensus, Route, Moments };

std::string_view to_string(ExperimentKind kind) noexcept;
ExperimentKind parse_experiment_kind(std::string_view name);

/// A grid of (n, alpha) cells, each run for `seed_count` seeds with p = n^-alpha.
/// Seed i of every cell is mix64(base_seed, i).
struct SweepConfig {
  ExperimentKind kind = ExperimentKind::NeighborDist;
  std::vector<int> n_values;
  std::vector<double> alphas;
  std::uint64_t base_seed = 1;
  std::uint64_t seed_count = 1;
  unsigned threads = 0;
  int max_n = kDefaultDimensionCap;

  // NeighborDist / Route / Distortion (sampled mode)
  std::uint64_t pairs = 1000;
  int cutoff = 9;
  // Distortion
  int exact_cap = kDefaultExactCap;
  // Moments
  int path_depth = 2;
  std::uint64_t trials = 10'000;
  // CycleCensus
  int max_cycle_length = 8;
  int radius = 0;
  std::uint64_t cycle_budget = 5'000'000;
  // Route
  int route_radius = 64;
  std::uint64_t route_query_budget = 1'000'000;

  /// Absolute tolerances per column for golden comparison; other columns compare exactly.
  std::map<std::string, double> tolerances;

  /// Throws ConfigError when a knob violates a module precondition.
  void validate() const;
};

SweepConfig parse_config(std::string_view json_text);
std::string to_json(const SweepConfig& config);

std::uint64_t trial_seed(std::uint64_t base_seed, std::uint64_t index) noexcept;

/// Experiment-specific column names (between the common n,alpha,p,seed and error).
std::vector<std::string> experiment_columns(ExperimentKind kind);

struct SweepResult {
  std::string csv;
  std::size_t rows = 0;
  std::size_t failed_rows = 0;
};

/// Runs every (n, alpha, seed) row; n and alpha ascending, seeds by index. Output is
/// byte-identical for identical configs regardless of thread count.
SweepResult run_sweep(const SweepConfig& config);

/// Formats a double with the shortest round-trip representation, "." decimal.
std::string format_number(double value);

enum class GoldenStatus { Pass, MissingGolden, Mismatch };

struct GoldenCheck {
  std::string name;
  GoldenStatus status = GoldenStatus::Pass;
  std::string detail;
};

struct GoldenReport {
  std::vector<GoldenCheck> checks;
  bool passed() const;
};

/// Compares `expected` against `actual` CSV text, using per-column tolerances when given.
GoldenCheck compare_csv(const std::string& name, const std::string& expected, const std::string& actual,
                        const std::map<std::string, double>& tolerances);

/// For every <name>.json config in `directory`, reruns it and compares against <name>.csv.
GoldenReport verify_goldens(const std::filesystem::path& directory);

}  // namespace cubeperc
