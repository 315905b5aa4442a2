#include "cubeperc/hypercube.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "cubeperc/error.hpp"

namespace cubeperc {

CubeShape::CubeShape(int n) : n_(n) {
  if (n < 1 || n > kMaxDimension) {
    throw Error(Errc::InvalidArgument, "dimension " + std::to_string(n) + " outside [1, 30]");
  }
}

EdgeId edge_from_index(const CubeShape& shape, std::uint64_t index) {
  if (index >= shape.edge_count()) throw Error(Errc::InvalidArgument, "edge index out of range");
  const int coord = static_cast<int>(index >> (shape.n() - 1));
  const std::uint64_t packed = index & ((std::uint64_t{1} << (shape.n() - 1)) - 1);
  const std::uint64_t low = packed & ((std::uint64_t{1} << coord) - 1);
  const std::uint64_t high = (packed >> coord) << (coord + 1);
  return EdgeId{coord, static_cast<Vertex>(low | high)};
}

EdgeId edge_between(const CubeShape& shape, Vertex u, Vertex v) {
  if (!shape.contains(u) || !shape.contains(v) || hamming(u, v) != 1) {
    throw Error(Errc::NotAdjacent, std::to_string(u) + " and " + std::to_string(v));
  }
  const int coord = std::countr_zero(u ^ v);
  return EdgeId{coord, u & ~(Vertex{1} << coord)};
}

std::vector<Vertex> neighbors(const CubeShape& shape, Vertex v) {
  if (!shape.contains(v)) throw Error(Errc::InvalidArgument, "vertex out of range");
  std::vector<Vertex> out;
  out.reserve(static_cast<std::size_t>(shape.n()));
  for (int i = 0; i < shape.n(); ++i) out.push_back(v ^ (Vertex{1} << i));
  return out;
}

std::uint32_t coordinate_mask(std::span<const int> coords) noexcept {
  std::uint32_t mask = 0;
  for (int c : coords) mask |= std::uint32_t{1} << c;
  return mask;
}

std::uint32_t CoordinatePartition::a_mask() const noexcept { return coordinate_mask(a); }
std::uint32_t CoordinatePartition::b_mask() const noexcept { return coordinate_mask(b); }

int partition_depth(double alpha) {
  if (!(alpha > 0.0 && alpha < 0.5)) {
    throw Error(Errc::AlphaOutOfRange, "alpha must lie in (0, 1/2)");
  }
  int l = 1;
  while (!((1.0 - 2.0 * alpha) * l > 9.0 * alpha)) ++l;
  return l;
}

CoordinatePartition make_partition(const CubeShape& shape, int l, int m) {
  if (l < 1) throw Error(Errc::InvalidArgument, "partition depth must be positive");
  if (m < 1 || static_cast<long long>(l + 2) * m >= shape.n()) {
    throw Error(Errc::DimensionTooSmall, "n=" + std::to_string(shape.n()) + " cannot hold l=" +
                                             std::to_string(l) + ", m=" + std::to_string(m));
  }
  CoordinatePartition p;
  p.l = l;
  p.m = m;
  auto block = [m](int start) {
    std::vector<int> out(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = start + i;
    return out;
  };
  p.a = block(0);
  p.b = block(m);
  for (int k = 0; k < l; ++k) p.c.push_back(block((k + 2) * m));
  for (int i = (l + 2) * m; i < shape.n(); ++i) p.spare.push_back(i);
  return p;
}

CoordinatePartition make_partition(const CubeShape& shape, double alpha) {
  const int l = partition_depth(alpha);
  const int m = (shape.n() - 1) / (l + 2);
  if (m < 1) {
    throw Error(Errc::DimensionTooSmall,
                "n=" + std::to_string(shape.n()) + " gives m=0 for l=" + std::to_string(l));
  }
  return make_partition(shape, l, m);
}

Path walk_steps(Vertex start, std::span<const int> steps) {
  Path out;
  out.reserve(steps.size() + 1);
  out.push_back(start);
  for (int c : steps) out.push_back(out.back() ^ (Vertex{1} << c));
  return out;
}

bool is_simple_path(std::span<const Vertex> path) {
  std::unordered_set<Vertex> seen;
  for (Vertex v : path) {
    if (!seen.insert(v).second) return false;
  }
  return true;
}

Path geodesic_cycle(const CubeShape& shape, Vertex v, std::span<const int> coords) {
  if (!shape.contains(v)) throw Error(Errc::InvalidArgument, "vertex out of range");
  const int l = static_cast<int>(coords.size());
  std::uint32_t seen = 0;
  for (int c : coords) {
    if (c < 0 || c >= shape.n()) throw Error(Errc::InvalidArgument, "coordinate out of range");
    if (seen & (std::uint32_t{1} << c)) {
      throw Error(Errc::DuplicateCoordinate, "coordinate " + std::to_string(c) + " repeated");
    }
    seen |= std::uint32_t{1} << c;
  }
  if (l < 2 || l > shape.n()) throw Error(Errc::InvalidArgument, "cycle half-length outside [2, n]");
  std::vector<int> doubled(coords.begin(), coords.end());
  doubled.insert(doubled.end(), coords.begin(), coords.end());
  return walk_steps(v, doubled);
}

std::uint64_t count_doubled_geodesic_cycles(const CubeShape& shape, int half_length) {
  if (half_length < 2 || half_length > shape.n()) {
    throw Error(Errc::InvalidArgument, "cycle half-length outside [2, n]");
  }
  std::uint64_t count = 1;
  for (int i = 0; i < half_length; ++i) count *= static_cast<std::uint64_t>(shape.n() - i);
  return count / 2;
}

namespace {

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
  if (b != 0 && a > std::numeric_limits<std::uint64_t>::max() / b) {
    throw Error(Errc::InvalidSpec, "path family too large");
  }
  return a * b;
}

}  // namespace

PathFamily::PathFamily(PathFamilySpec spec) : spec_(std::move(spec)) {
  const CubeShape& shape = spec_.shape;
  const int n = shape.n();
  if (!shape.contains(spec_.x) || !shape.contains(spec_.y)) {
    throw Error(Errc::InvalidSpec, "endpoint out of range");
  }
  const std::uint32_t differ = spec_.x ^ spec_.y;

  if (const auto* retrace = std::get_if<NeighborRetrace>(&spec_.kind)) {
    if (std::popcount(differ) != 1) throw Error(Errc::InvalidSpec, "endpoints must be adjacent");
    if (retrace->l < 1 || retrace->l > n - 1) {
      throw Error(Errc::InvalidSpec, "retrace depth outside [1, n-1]");
    }
    const int e = std::countr_zero(differ);
    std::vector<int> avail;
    for (int i = 0; i < n; ++i) {
      if (i != e) avail.push_back(i);
    }
    choices_.assign(static_cast<std::size_t>(retrace->l), avail);
    middle_ = {e};
    size_ = 1;
    for (int j = 0; j < retrace->l; ++j) size_ = checked_mul(size_, static_cast<std::uint64_t>(n - 1 - j));
    length_ = 2 * retrace->l + 1;
    return;
  }

  const auto& good = std::get<GoodPair>(spec_.kind);
  const CoordinatePartition& part = good.partition;
  const int d = std::popcount(differ);
  if (d < 1 || d > 7) throw Error(Errc::InvalidSpec, "GoodPair endpoints must differ in 1..7 coordinates");
  if (part.l < 1 || part.m < 1 || static_cast<int>(part.c.size()) != part.l ||
      static_cast<int>(part.b.size()) != part.m) {
    throw Error(Errc::InvalidSpec, "malformed partition");
  }
  if (good.index < 0 || good.index >= part.m) throw Error(Errc::InvalidSpec, "pair index outside [0, m)");
  auto in_differ = [differ](int c) { return (differ >> c) & 1U; };
  auto check_coord = [n](int c) {
    if (c < 0 || c >= n) throw Error(Errc::InvalidSpec, "partition coordinate out of range");
  };

  int substitute = -1;
  for (int s : part.spare) {
    check_coord(s);
    if (!in_differ(s)) {
      substitute = s;
      break;
    }
  }
  bool used_substitute = false;
  auto resolve = [&](int c) {
    check_coord(c);
    if (!in_differ(c)) return c;
    if (c != good.e || substitute < 0 || used_substitute) {
      throw Error(Errc::InvalidSpec, "coordinate " + std::to_string(c) +
                                         " collides with the endpoints and cannot be substituted");
    }
    used_substitute = true;
    return substitute;
  };

  const int pivot = resolve(part.b[static_cast<std::size_t>(good.index)]);
  for (const auto& block : part.c) {
    if (static_cast<int>(block.size()) != part.m) throw Error(Errc::InvalidSpec, "malformed partition");
    std::vector<int> resolved;
    for (int c : block) resolved.push_back(resolve(c));
    std::sort(resolved.begin(), resolved.end());
    choices_.push_back(std::move(resolved));
  }
  middle_.push_back(pivot);
  for (int i = 0; i < n; ++i) {
    if (in_differ(i)) middle_.push_back(i);
  }
  middle_.push_back(pivot);
  size_ = 1;
  for (int j = 0; j < part.l; ++j) size_ = checked_mul(size_, static_cast<std::uint64_t>(part.m));
  length_ = 2 * part.l + 2 + d;
}

std::vector<int> PathFamily::steps(std::uint64_t k) const {
  const std::size_t depth = choices_.size();
  std::vector<int> prefix(depth);
  if (std::holds_alternative<NeighborRetrace>(spec_.kind)) {
    // Unrank k as an ordered tuple of distinct coordinates, first position most significant.
    std::vector<int> pool = choices_.front();
    std::uint64_t weight = size_;
    for (std::size_t j = 0; j < depth; ++j) {
      weight /= pool.size();
      const auto digit = static_cast<std::size_t>(k / weight);
      k %= weight;
      prefix[j] = pool[digit];
      pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
    }
  } else {
    for (std::size_t j = depth; j-- > 0;) {
      const auto radix = choices_[j].size();
      prefix[j] = choices_[j][static_cast<std::size_t>(k % radix)];
      k /= radix;
    }
  }
  std::vector<int> out(prefix);
  out.insert(out.end(), middle_.begin(), middle_.end());
  out.insert(out.end(), prefix.rbegin(), prefix.rend());
  return out;
}

std::vector<Path> enumerate_paths(const PathFamilySpec& spec) {
  const PathFamily family(spec);
  std::vector<Path> out;
  out.reserve(static_cast<std::size_t>(family.size()));
  family.for_each_steps([&](const std::vector<int>& steps) { out.push_back(walk_steps(spec.x, steps)); });
  return out;
}

}  // namespace cubeperc
