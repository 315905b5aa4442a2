#pragma once

#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace cubeperc {

/// A vertex of H_n: bit i is coordinate i.
using Vertex = std::uint32_t;
using Path = std::vector<Vertex>;

inline constexpr int kMaxDimension = 30;
inline constexpr int kDefaultDimensionCap = 26;

/// Dimension of the hypercube H_n and the counts derived from it.
class CubeShape {
 public:
  explicit CubeShape(int n);

  int n() const noexcept { return n_; }
  std::uint64_t vertex_count() const noexcept { return std::uint64_t{1} << n_; }
  std::uint64_t edge_count() const noexcept {
    return static_cast<std::uint64_t>(n_) << (n_ - 1);
  }
  bool contains(Vertex v) const noexcept { return std::uint64_t{v} < vertex_count(); }
  bool operator==(const CubeShape&) const = default;

 private:
  int n_;
};

/// Canonical edge: `base` has bit `coord` clear; the other end is base ^ (1 << coord).
struct EdgeId {
  int coord = 0;
  Vertex base = 0;

  Vertex other() const noexcept { return base ^ (Vertex{1} << coord); }
  bool operator==(const EdgeId&) const = default;
};

inline int hamming(Vertex a, Vertex b) noexcept { return __builtin_popcount(a ^ b); }

/// Deletes bit `coord` from `v`, shifting higher bits down.
inline std::uint64_t compress_bit(Vertex v, int coord) noexcept {
  const std::uint64_t low = v & ((std::uint64_t{1} << coord) - 1);
  return low | ((std::uint64_t{v} >> (coord + 1)) << coord);
}

/// Bijection EdgeId -> [0, n 2^(n-1)).
inline std::uint64_t edge_index(const CubeShape& shape, EdgeId e) noexcept {
  return (static_cast<std::uint64_t>(e.coord) << (shape.n() - 1)) + compress_bit(e.base, e.coord);
}

/// Index of the edge leaving `v` along `coord`, without normalizing first.
inline std::uint64_t edge_index(const CubeShape& shape, Vertex v, int coord) noexcept {
  return (static_cast<std::uint64_t>(coord) << (shape.n() - 1)) + compress_bit(v, coord);
}

EdgeId edge_from_index(const CubeShape& shape, std::uint64_t index);

/// The edge between u and v; throws NotAdjacent unless they differ in exactly one bit.
EdgeId edge_between(const CubeShape& shape, Vertex u, Vertex v);

std::vector<Vertex> neighbors(const CubeShape& shape, Vertex v);

/// Coordinate sets A, B, C_1..C_l of equal size m plus the unused coordinates.
struct CoordinatePartition {
  int l = 0;
  int m = 0;
  std::vector<int> a;
  std::vector<int> b;
  std::vector<std::vector<int>> c;
  std::vector<int> spare;

  std::uint32_t a_mask() const noexcept;
  std::uint32_t b_mask() const noexcept;
  bool operator==(const CoordinatePartition&) const = default;
};

/// Smallest l with (1 - 2 alpha) l > 9 alpha.
int partition_depth(double alpha);

/// Partition for p = n^-alpha: ascending layout A = [0,m), B = [m,2m), C_k = [(k+1)m, (k+2)m).
CoordinatePartition make_partition(const CubeShape& shape, double alpha);

/// Same layout with l and m given directly.
CoordinatePartition make_partition(const CubeShape& shape, int l, int m);

std::uint32_t coordinate_mask(std::span<const int> coords) noexcept;

/// Closed walk v, v^c0, ... applying `coords` twice; returns 2l + 1 vertices.
Path geodesic_cycle(const CubeShape& shape, Vertex v, std::span<const int> coords);

/// n (n-1) ... (n-l+1) / 2 doubled-sequence geodesic cycles of length 2l through a vertex.
std::uint64_t count_doubled_geodesic_cycles(const CubeShape& shape, int half_length);

/// Walk a coordinate sequence from `start`.
Path walk_steps(Vertex start, std::span<const int> steps);

bool is_simple_path(std::span<const Vertex> path);

struct NeighborRetrace {
  int l = 1;
};

/// P_i(c): l steps from C_1..C_l, one along b_i, the coordinates where x and y differ
/// (ascending), then b_i and the C steps again in reverse. `e` is the differing
/// coordinate that the lowest spare replaces when it falls in B or some C_k.
struct GoodPair {
  int index = 0;
  CoordinatePartition partition;
  int e = 0;
};

struct PathFamilySpec {
  CubeShape shape{1};
  std::variant<NeighborRetrace, GoodPair> kind;
  Vertex x = 0;
  Vertex y = 0;
};

/// A validated family of paths between x and y, in deterministic order.
class PathFamily {
 public:
  explicit PathFamily(PathFamilySpec spec);

  const PathFamilySpec& spec() const noexcept { return spec_; }
  std::uint64_t size() const noexcept { return size_; }
  int path_length() const noexcept { return length_; }

  /// Coordinate steps of the k-th path.
  std::vector<int> steps(std::uint64_t k) const;
  Path path(std::uint64_t k) const { return walk_steps(spec_.x, steps(k)); }

  template <class F>
  void for_each_steps(F&& visit) const {
    for (std::uint64_t k = 0; k < size_; ++k) visit(steps(k));
  }

 private:
  PathFamilySpec spec_;
  // Per-position choices for the free prefix; for NeighborRetrace these are the
  // coordinates available to every position (distinctness handled in steps()).
  std::vector<std::vector<int>> choices_;
  std::vector<int> middle_;
  std::uint64_t size_ = 0;
  int length_ = 0;
};

std::vector<Path> enumerate_paths(const PathFamilySpec& spec);

}  // namespace cubeperc
