#include "cubeperc/metrics.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <string>

#include "cubeperc/error.hpp"
#include "cubeperc/mix.hpp"

namespace cubeperc {

namespace {

void require_vertex(const PercolationSample& sample, Vertex v) {
  if (!sample.shape().contains(v)) throw Error(Errc::InvalidArgument, "vertex out of range");
}

}  // namespace

DistanceField bfs(const PercolationSample& sample, Vertex source, int cutoff) {
  require_vertex(sample, source);
  if (!sample.vertex_present(source)) {
    throw Error(Errc::SourceAbsent, "source vertex " + std::to_string(source) + " removed");
  }
  const int n = sample.shape().n();
  DistanceField field{source, cutoff, std::vector<int>(sample.shape().vertex_count(), kUnreachable)};
  field.dist[source] = 0;
  std::vector<Vertex> frontier{source};
  std::vector<Vertex> next;
  for (int depth = 0; !frontier.empty() && depth < cutoff; ++depth) {
    next.clear();
    for (Vertex u : frontier) {
      for (int i = 0; i < n; ++i) {
        const Vertex w = u ^ (Vertex{1} << i);
        if (field.dist[w] == kUnreachable && sample.edge_open(u, i)) {
          field.dist[w] = depth + 1;
          next.push_back(w);
        }
      }
    }
    frontier.swap(next);
  }
  return field;
}

std::vector<Vertex> ComponentLabeling::members(std::uint32_t which) const {
  std::vector<Vertex> out;
  for (std::size_t v = 0; v < label.size(); ++v) {
    if (label[v] == which) out.push_back(static_cast<Vertex>(v));
  }
  return out;
}

ComponentLabeling components(const PercolationSample& sample) {
  const CubeShape& shape = sample.shape();
  const auto count = static_cast<std::size_t>(shape.vertex_count());
  std::vector<Vertex> parent(count);
  std::iota(parent.begin(), parent.end(), Vertex{0});

  auto find = [&parent](Vertex x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  // Roots are always the smallest member, so labels can be assigned in one ascending pass.
  auto unite = [&](Vertex a, Vertex b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) {
      parent[b] = a;
    } else {
      parent[a] = b;
    }
  };

  const int n = shape.n();
  if (sample.mode() == SampleMode::Materialized) {
    const auto& bits = sample.edge_bits();
    const std::uint64_t half = std::uint64_t{1} << (n - 1);
    for (std::size_t w = 0; w < bits.size(); ++w) {
      std::uint64_t word = bits[w];
      while (word != 0) {
        const std::uint64_t index = std::uint64_t{w} * 64 + static_cast<std::uint64_t>(std::countr_zero(word));
        word &= word - 1;
        const int coord = static_cast<int>(index / half);
        const std::uint64_t packed = index % half;
        const std::uint64_t low = packed & ((std::uint64_t{1} << coord) - 1);
        const auto base = static_cast<Vertex>(low | ((packed >> coord) << (coord + 1)));
        unite(base, base | (Vertex{1} << coord));
      }
    }
  } else {
    for (std::size_t v = 0; v < count; ++v) {
      for (int i = 0; i < n; ++i) {
        const Vertex u = static_cast<Vertex>(v);
        if (!((u >> i) & 1U) && sample.edge_open(u, i)) unite(u, u | (Vertex{1} << i));
      }
    }
  }

  ComponentLabeling out;
  out.label.assign(count, kNoLabel);
  for (std::size_t v = 0; v < count; ++v) {
    const auto u = static_cast<Vertex>(v);
    if (!sample.vertex_present(u)) continue;
    const Vertex root = find(u);
    if (root == u) {
      out.label[v] = static_cast<std::uint32_t>(out.sizes.size());
      out.sizes.push_back(0);
    } else {
      out.label[v] = out.label[root];
    }
    ++out.sizes[out.label[v]];
  }
  for (std::uint32_t k = 0; k < out.sizes.size(); ++k) {
    if (out.giant == kNoLabel || out.sizes[k] > out.sizes[out.giant]) out.giant = k;
  }
  return out;
}

BfsWorkspace::BfsWorkspace(const CubeShape& shape) : shape_(shape) {
  for (int s = 0; s < 2; ++s) {
    seen_[s].assign(static_cast<std::size_t>(shape.vertex_count()), 0);
    dist_[s].assign(static_cast<std::size_t>(shape.vertex_count()), 0);
  }
}

std::uint32_t BfsWorkspace::next_epoch() {
  if (++epoch_ == 0) {
    for (auto& s : seen_) std::fill(s.begin(), s.end(), 0);
    epoch_ = 1;
  }
  return epoch_;
}

int BfsWorkspace::distance(const PercolationSample& sample, Vertex from, Vertex to, int cutoff) {
  if (!(sample.shape() == shape_)) throw Error(Errc::InvalidArgument, "workspace shape mismatch");
  require_vertex(sample, from);
  require_vertex(sample, to);
  if (!sample.vertex_present(from) || !sample.vertex_present(to)) return kUnreachable;
  if (from == to) return 0;
  if (cutoff <= 0) return kUnreachable;

  const std::uint32_t epoch = next_epoch();
  const Vertex ends[2] = {from, to};
  int depth[2] = {0, 0};
  for (int s = 0; s < 2; ++s) {
    seen_[s][ends[s]] = epoch;
    dist_[s][ends[s]] = 0;
    frontier_[s].assign(1, ends[s]);
  }
  const int n = shape_.n();
  while (!frontier_[0].empty() && !frontier_[1].empty()) {
    const int side = frontier_[1].size() < frontier_[0].size() ? 1 : 0;
    const int other = 1 - side;
    int best = kNoCutoff;
    next_.clear();
    for (Vertex u : frontier_[side]) {
      for (int i = 0; i < n; ++i) {
        const Vertex w = u ^ (Vertex{1} << i);
        if (seen_[side][w] == epoch || !sample.edge_open(u, i)) continue;
        if (seen_[other][w] == epoch) {
          best = std::min(best, depth[side] + 1 + dist_[other][w]);
          continue;
        }
        seen_[side][w] = epoch;
        dist_[side][w] = depth[side] + 1;
        next_.push_back(w);
      }
    }
    ++depth[side];
    frontier_[side].swap(next_);
    if (best != kNoCutoff) return best <= cutoff ? best : kUnreachable;
    if (depth[0] + depth[1] >= cutoff) return kUnreachable;
  }
  return kUnreachable;
}

std::optional<Path> BfsWorkspace::shortest_path(const PercolationSample& sample, Vertex from, Vertex to) {
  if (!(sample.shape() == shape_)) throw Error(Errc::InvalidArgument, "workspace shape mismatch");
  require_vertex(sample, from);
  require_vertex(sample, to);
  if (!sample.vertex_present(from) || !sample.vertex_present(to)) return std::nullopt;
  if (from == to) return Path{from};

  // Distances towards `to`; every vertex closer than `from` is settled once `from` is reached.
  const std::uint32_t epoch = next_epoch();
  auto& seen = seen_[0];
  auto& dist = dist_[0];
  seen[to] = epoch;
  dist[to] = 0;
  frontier_[0].assign(1, to);
  const int n = shape_.n();
  bool reached = false;
  for (int depth = 0; !frontier_[0].empty() && !reached; ++depth) {
    next_.clear();
    for (Vertex u : frontier_[0]) {
      for (int i = 0; i < n; ++i) {
        const Vertex w = u ^ (Vertex{1} << i);
        if (seen[w] == epoch || !sample.edge_open(u, i)) continue;
        seen[w] = epoch;
        dist[w] = depth + 1;
        next_.push_back(w);
        if (w == from) reached = true;
      }
    }
    frontier_[0].swap(next_);
  }
  if (!reached) return std::nullopt;

  Path path{from};
  Vertex cur = from;
  while (cur != to) {
    Vertex best = cur;
    bool found = false;
    for (int i = 0; i < n; ++i) {
      const Vertex w = cur ^ (Vertex{1} << i);
      if (seen[w] == epoch && dist[w] == dist[cur] - 1 && sample.edge_open(cur, i) && (!found || w < best)) {
        best = w;
        found = true;
      }
    }
    cur = best;
    path.push_back(cur);
  }
  return path;
}

VertexMap VertexMap::identity(const CubeShape& shape) {
  VertexMap map;
  map.image.resize(static_cast<std::size_t>(shape.vertex_count()));
  std::iota(map.image.begin(), map.image.end(), Vertex{0});
  return map;
}

double distortion_value(int plus, int minus_num, int minus_den) noexcept {
  return static_cast<double>(static_cast<long long>(plus) * minus_den) / static_cast<double>(minus_num);
}

namespace {

void validate_map(const PercolationSample& sample, const VertexMap& map) {
  if (map.image.size() != sample.shape().vertex_count()) {
    throw Error(Errc::InvalidArgument, "map must have one image per cube vertex");
  }
  for (Vertex t : map.image) {
    if (!sample.shape().contains(t) || !sample.vertex_present(t)) {
      throw Error(Errc::InvalidArgument, "image " + std::to_string(t) + " not present in the sample");
    }
  }
}

// Running max of d_Y over edges and min of max(1, d_Y) / d_X over pairs, with
// lexicographic tie-breaks on the source pair.
struct Extremes {
  int plus_dy = -1;
  std::pair<Vertex, Vertex> plus_pair{0, 0};
  long long minus_num = 0;
  long long minus_den = 0;
  std::pair<Vertex, Vertex> minus_pair{0, 0};

  void edge(Vertex a, Vertex b, int dy) {
    const std::pair<Vertex, Vertex> key{a, b};
    if (dy > plus_dy || (dy == plus_dy && key < plus_pair)) {
      plus_dy = dy;
      plus_pair = key;
    }
  }

  void pair(Vertex a, Vertex b, int dy) {
    const long long num = std::max(1, dy);
    const long long den = hamming(a, b);
    const std::pair<Vertex, Vertex> key{a, b};
    if (minus_den == 0) {
      minus_num = num;
      minus_den = den;
      minus_pair = key;
      return;
    }
    const long long lhs = num * minus_den;
    const long long rhs = minus_num * den;
    if (lhs < rhs || (lhs == rhs && key < minus_pair)) {
      minus_num = num;
      minus_den = den;
      minus_pair = key;
    }
  }

  DistortionReport finish(Exactness exactness, std::uint64_t pairs) const {
    DistortionReport r;
    r.exactness = exactness;
    r.pairs_evaluated = pairs;
    r.plus = std::max(1, plus_dy);
    const long long g = std::gcd(minus_num, minus_den);
    r.minus_num = static_cast<int>(minus_num / g);
    r.minus_den = static_cast<int>(minus_den / g);
    r.d_plus = r.plus;
    r.d_minus = static_cast<double>(r.minus_num) / r.minus_den;
    r.distortion = distortion_value(r.plus, r.minus_num, r.minus_den);
    r.witness_plus = plus_pair;
    r.witness_minus = minus_pair;
    return r;
  }
};

DistortionReport infinite_report(Exactness exactness) {
  DistortionReport r;
  r.infinite = true;
  r.exactness = exactness;
  r.d_plus = std::numeric_limits<double>::infinity();
  r.distortion = std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

DistortionReport evaluate_distortion(const PercolationSample& sample, const VertexMap& map, DistortionMode mode,
                                     int exact_cap) {
  validate_map(sample, map);
  const CubeShape& shape = sample.shape();
  const int n = shape.n();

  if (mode.kind == Exactness::Exact) {
    if (n > exact_cap) {
      throw Error(Errc::CapExceeded, "exact distortion limited to n <= " + std::to_string(exact_cap));
    }
    const DistanceField reach = bfs(sample, map.image[0]);
    for (Vertex t : map.image) {
      if (reach.at(t) == kUnreachable) return infinite_report(Exactness::Exact);
    }
    std::vector<std::vector<Vertex>> by_image(static_cast<std::size_t>(shape.vertex_count()));
    for (std::size_t a = 0; a < map.image.size(); ++a) by_image[map.image[a]].push_back(static_cast<Vertex>(a));

    Extremes ext;
    std::uint64_t pairs = 0;
    for (std::size_t t = 0; t < by_image.size(); ++t) {
      if (by_image[t].empty()) continue;
      const DistanceField field = bfs(sample, static_cast<Vertex>(t));
      for (Vertex a : by_image[t]) {
        for (int i = 0; i < n; ++i) {
          const Vertex b = a ^ (Vertex{1} << i);
          if (b > a) ext.edge(a, b, field.at(map.image[b]));
        }
        for (Vertex b = a + 1; b < map.image.size(); ++b) {
          ext.pair(a, b, field.at(map.image[b]));
          ++pairs;
        }
      }
    }
    return ext.finish(Exactness::Exact, pairs);
  }

  if (mode.pairs == 0) throw Error(Errc::InvalidArgument, "sampled mode needs at least one pair");
  const ComponentLabeling labels = components(sample);
  for (Vertex t : map.image) {
    if (labels.label[t] != labels.label[map.image[0]]) return infinite_report(Exactness::SampledLowerBound);
  }
  BfsWorkspace ws(shape);
  CounterRng rng(mode.seed);
  Extremes ext;
  for (std::uint64_t k = 0; k < mode.pairs; ++k) {
    const EdgeId e = edge_from_index(shape, rng.below(shape.edge_count()));
    ext.edge(e.base, e.other(), ws.distance(sample, map.image[e.base], map.image[e.other()]));
  }
  for (std::uint64_t k = 0; k < mode.pairs; ++k) {
    auto a = static_cast<Vertex>(rng.below(shape.vertex_count()));
    auto b = static_cast<Vertex>(rng.below(shape.vertex_count() - 1));
    if (b >= a) ++b;
    if (b < a) std::swap(a, b);
    ext.pair(a, b, ws.distance(sample, map.image[a], map.image[b]));
  }
  return ext.finish(Exactness::SampledLowerBound, 2 * mode.pairs);
}

OptimalMap brute_force_min_distortion(const PercolationSample& sample) {
  const CubeShape& shape = sample.shape();
  if (shape.n() > 3) throw Error(Errc::TooLarge, "exhaustive map search limited to n <= 3");
  const ComponentLabeling labels = components(sample);
  const std::vector<Vertex> target = labels.members(labels.giant);
  const std::size_t t_count = target.size();
  const auto sources = static_cast<std::size_t>(shape.vertex_count());

  std::vector<std::vector<int>> dist(t_count, std::vector<int>(t_count));
  for (std::size_t i = 0; i < t_count; ++i) {
    const DistanceField field = bfs(sample, target[i]);
    for (std::size_t j = 0; j < t_count; ++j) dist[i][j] = field.at(target[j]);
  }

  // Depth-first over maps in lexicographic order. Partial D only grows as sources are
  // assigned, so a branch whose partial D already reaches the best cannot win.
  struct Frame {
    long long plus;
    long long num;
    long long den;  // 0 until the first pair
  };
  std::vector<std::size_t> choice(sources, 0);
  std::vector<Frame> frames(sources + 1, Frame{1, 0, 0});
  std::vector<std::size_t> best_choice;
  Frame best{0, 1, 0};
  bool have_best = false;

  auto at_least_best = [&](const Frame& f) {
    if (!have_best || f.den == 0) return false;
    // f.plus / (f.num / f.den) >= best.plus / (best.num / best.den)
    return f.plus * f.den * best.num >= best.plus * best.den * f.num;
  };

  std::size_t depth = 0;
  choice[0] = 0;
  while (true) {
    if (choice[depth] == t_count) {
      if (depth == 0) break;
      --depth;
      ++choice[depth];
      continue;
    }
    Frame f = frames[depth];
    const auto a = static_cast<Vertex>(depth);
    for (Vertex b = 0; b < a; ++b) {
      const int dy = dist[choice[b]][choice[depth]];
      if (hamming(a, b) == 1) f.plus = std::max<long long>(f.plus, dy);
      const long long num = std::max(1, dy);
      const long long den = hamming(a, b);
      if (f.den == 0 || num * f.den < f.num * den) {
        f.num = num;
        f.den = den;
      }
    }
    if (at_least_best(f)) {
      ++choice[depth];
      continue;
    }
    if (depth + 1 == sources) {
      best = f;
      best_choice.assign(choice.begin(), choice.end());
      have_best = true;
      ++choice[depth];
      continue;
    }
    frames[depth + 1] = f;
    ++depth;
    choice[depth] = 0;
  }

  OptimalMap out;
  out.map.image.resize(sources);
  for (std::size_t a = 0; a < sources; ++a) out.map.image[a] = target[best_choice[a]];
  Extremes ext;
  std::uint64_t pairs = 0;
  for (Vertex a = 0; a < sources; ++a) {
    for (Vertex b = a + 1; b < sources; ++b) {
      const int dy = dist[best_choice[a]][best_choice[b]];
      if (hamming(a, b) == 1) ext.edge(a, b, dy);
      ext.pair(a, b, dy);
      ++pairs;
    }
  }
  out.report = ext.finish(Exactness::Exact, pairs);
  return out;
}

int diameter_lower_bound(const PercolationSample& sample, const ComponentLabeling& labeling, std::uint32_t which) {
  Vertex start = 0;
  bool found = false;
  for (std::size_t v = 0; v < labeling.label.size() && !found; ++v) {
    if (labeling.label[v] == which) {
      start = static_cast<Vertex>(v);
      found = true;
    }
  }
  if (!found) throw Error(Errc::InvalidArgument, "empty component");
  auto farthest = [&](Vertex from) {
    const DistanceField field = bfs(sample, from);
    Vertex far = from;
    for (std::size_t v = 0; v < field.dist.size(); ++v) {
      if (field.dist[v] > field.dist[far]) far = static_cast<Vertex>(v);
    }
    return std::pair{far, field.dist[far]};
  };
  return farthest(farthest(start).first).second;
}

}  // namespace cubeperc
