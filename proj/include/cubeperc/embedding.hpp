#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/metrics.hpp"
#include "cubeperc/percolation.hpp"

namespace cubeperc {

/// A good vertex with the >= 2m vertices it reaches by open two-step A-paths.
struct GoodnessCertificate {
  Vertex vertex = 0;
  std::vector<Vertex> witnesses;  // ascending; each differs from `vertex` in exactly two A-bits
};

/// Vertices reachable from v by an open path of two distinct A-coordinate edges.
std::vector<Vertex> a_distance_two(const PercolationSample& sample, Vertex v, const CoordinatePartition& partition);

std::optional<GoodnessCertificate> is_good(const PercolationSample& sample, Vertex v,
                                           const CoordinatePartition& partition);

struct MapFailure {
  std::vector<Vertex> bad_vertices;  // vertices with no good B-neighbour, ascending
};

using GoodMapResult = std::variant<VertexMap, MapFailure>;

/// f(x) = x ^ (1 << b) for the lowest b in B whose flip is good. Failure is a value.
GoodMapResult build_good_map(const PercolationSample& sample, const CoordinatePartition& partition,
                             unsigned threads = 0);

/// First family path (enumeration order) whose every edge is open.
std::optional<Path> find_open_path(const PercolationSample& sample, const PathFamilySpec& spec);

inline constexpr std::uint64_t kSecondMomentFamilyCap = 10'000;

struct MomentEstimate {
  std::uint64_t family_size = 0;
  int path_length = 0;
  double mean = 0.0;
  /// Exact E X^2 from the pairwise shared-edge census; absent past the family cap.
  std::optional<double> second_moment_exact;
  /// 1 + n^(2 alpha - 1) with alpha = -log p / log n (leading correction, unit constant).
  double ratio_bound = 1.0;
  /// Census of ordered path pairs by number of shared edges.
  std::map<int, std::uint64_t> overlap_census;

  /// Exact value when available, else (E X)^2 times the ratio bound.
  double second_moment() const;
  double variance() const { return second_moment() - mean * mean; }
  bool capped() const { return !second_moment_exact.has_value(); }
};

MomentEstimate analytic_moments(const PathFamilySpec& spec, double p);

struct MonteCarloCount {
  std::uint64_t trials = 0;
  double mean = 0.0;
  double sample_variance = 0.0;
};

/// Open-path counts of the family over independent bond samples; trial t uses
/// seed mix64(base_seed, t).
MonteCarloCount monte_carlo_open_paths(const PathFamilySpec& spec, double p, std::uint64_t trials,
                                       std::uint64_t base_seed);

/// Cube edges with both endpoints in the giant component.
std::uint64_t count_giant_adjacent_pairs(const CubeShape& shape, const ComponentLabeling& labeling);

/// `count` uniform draws (with replacement) of cube edges inside the giant, or every such
/// edge in ascending order when fewer than `count` exist.
std::vector<std::pair<Vertex, Vertex>> giant_adjacent_pairs(const CubeShape& shape, const ComponentLabeling& labeling,
                                                            std::uint64_t count, std::uint64_t seed);

struct NeighborDistanceStats {
  std::vector<std::uint64_t> histogram;  // index d for d = 0..cutoff
  std::uint64_t overflow = 0;
  std::uint64_t pairs = 0;
  std::uint64_t eligible = 0;  // adjacent cube pairs with both ends in the giant
  bool exhaustive = false;     // fewer eligible pairs than requested
  int cutoff = 0;

  /// Lower median, with overflow counted as cutoff + 1.
  int median() const;
  double frac_within_cutoff() const;
  double overflow_frac() const;
};

NeighborDistanceStats neighbor_distance_stats(const PercolationSample& sample, const ComponentLabeling& labeling,
                                              std::uint64_t num_pairs, int cutoff, std::uint64_t seed);

}  // namespace cubeperc
