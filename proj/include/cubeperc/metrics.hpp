#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/percolation.hpp"

namespace cubeperc {

inline constexpr int kUnreachable = -1;
inline constexpr int kNoCutoff = std::numeric_limits<int>::max();

/// Shortest open-path distances from `source`, exact up to `cutoff`.
struct DistanceField {
  Vertex source = 0;
  int cutoff = kNoCutoff;
  std::vector<int> dist;  // kUnreachable beyond the cutoff or disconnected

  int at(Vertex v) const { return dist[v]; }
};

DistanceField bfs(const PercolationSample& sample, Vertex source, int cutoff = kNoCutoff);

inline constexpr std::uint32_t kNoLabel = std::numeric_limits<std::uint32_t>::max();

/// Connected components of the open subgraph. Labels are numbered by smallest member.
struct ComponentLabeling {
  std::vector<std::uint32_t> label;  // kNoLabel for absent vertices
  std::vector<std::uint64_t> sizes;
  std::uint32_t giant = kNoLabel;  // largest; ties go to the smallest label

  std::uint64_t giant_size() const { return giant == kNoLabel ? 0 : sizes[giant]; }
  bool in_giant(Vertex v) const { return giant != kNoLabel && label[v] == giant; }
  std::vector<Vertex> members(std::uint32_t which) const;
};

ComponentLabeling components(const PercolationSample& sample);

/// Reusable scratch space for point-to-point searches on one shape.
class BfsWorkspace {
 public:
  explicit BfsWorkspace(const CubeShape& shape);

  /// Bidirectional search; returns the distance if it is <= cutoff, else kUnreachable.
  int distance(const PercolationSample& sample, Vertex from, Vertex to, int cutoff = kNoCutoff);

  /// Lexicographically least shortest open path, or nullopt if disconnected.
  std::optional<Path> shortest_path(const PercolationSample& sample, Vertex from, Vertex to);

 private:
  std::uint32_t next_epoch();

  CubeShape shape_;
  std::uint32_t epoch_ = 0;
  std::vector<std::uint32_t> seen_[2];
  std::vector<int> dist_[2];
  std::vector<Vertex> frontier_[2];
  std::vector<Vertex> next_;
};

/// A total map from V(H_n) into the percolated cube; not necessarily injective.
struct VertexMap {
  std::vector<Vertex> image;

  Vertex operator()(Vertex v) const { return image[v]; }
  static VertexMap identity(const CubeShape& shape);
  bool operator==(const VertexMap&) const = default;
};

enum class Exactness { Exact, SampledLowerBound };

struct DistortionMode {
  Exactness kind = Exactness::Exact;
  std::uint64_t pairs = 0;
  std::uint64_t seed = 0;

  static DistortionMode exact() { return {}; }
  static DistortionMode sampled(std::uint64_t pairs, std::uint64_t seed) {
    return {Exactness::SampledLowerBound, pairs, seed};
  }
};

inline constexpr int kDefaultExactCap = 12;

/// D_+, D_- and D = D_+ / D_-. D_+ is an integer (the sup is attained on cube edges);
/// D_- is kept as the fraction minus_num / minus_den for exact comparisons.
struct DistortionReport {
  bool infinite = false;
  Exactness exactness = Exactness::Exact;
  std::uint64_t pairs_evaluated = 0;
  int plus = 1;
  int minus_num = 1;
  int minus_den = 1;
  double d_plus = 1.0;
  double d_minus = 1.0;
  double distortion = 1.0;
  std::pair<Vertex, Vertex> witness_plus{0, 0};
  std::pair<Vertex, Vertex> witness_minus{0, 0};
};

/// D as a double from its rational parts; shared by every producer of a report.
double distortion_value(int plus, int minus_num, int minus_den) noexcept;

DistortionReport evaluate_distortion(const PercolationSample& sample, const VertexMap& map,
                                     DistortionMode mode = DistortionMode::exact(),
                                     int exact_cap = kDefaultExactCap);

struct OptimalMap {
  VertexMap map;
  DistortionReport report;
};

/// Global minimum of D over all maps into the giant component (n <= 3); the
/// lexicographically first optimal map wins ties.
OptimalMap brute_force_min_distortion(const PercolationSample& sample);

/// Double-sweep BFS lower bound on the diameter of component `which`.
int diameter_lower_bound(const PercolationSample& sample, const ComponentLabeling& labeling,
                         std::uint32_t which);

}  // namespace cubeperc
