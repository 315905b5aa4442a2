#include "cubeperc/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cubeperc/error.hpp"
#include "cubeperc/mix.hpp"
#include "cubeperc/parallel.hpp"

namespace cubeperc {

std::vector<Vertex> a_distance_two(const PercolationSample& sample, Vertex v, const CoordinatePartition& partition) {
  std::vector<Vertex> out;
  if (!sample.vertex_present(v)) return out;
  const auto& a = partition.a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const Vertex via_i = v ^ (Vertex{1} << a[i]);
      const Vertex via_j = v ^ (Vertex{1} << a[j]);
      if ((sample.edge_open(v, a[i]) && sample.edge_open(via_i, a[j])) ||
          (sample.edge_open(v, a[j]) && sample.edge_open(via_j, a[i]))) {
        out.push_back(via_i ^ (Vertex{1} << a[j]));
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::optional<GoodnessCertificate> is_good(const PercolationSample& sample, Vertex v,
                                           const CoordinatePartition& partition) {
  if (!sample.shape().contains(v)) throw Error(Errc::InvalidArgument, "vertex out of range");
  auto witnesses = a_distance_two(sample, v, partition);
  if (static_cast<int>(witnesses.size()) < 2 * partition.m) return std::nullopt;
  return GoodnessCertificate{v, std::move(witnesses)};
}

GoodMapResult build_good_map(const PercolationSample& sample, const CoordinatePartition& partition,
                             unsigned threads) {
  const CubeShape& shape = sample.shape();
  const auto count = static_cast<std::size_t>(shape.vertex_count());
  std::vector<std::uint8_t> good(count, 0);
  parallel_chunks(count, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t v = begin; v < end; ++v) {
      good[v] = static_cast<int>(a_distance_two(sample, static_cast<Vertex>(v), partition).size()) >= 2 * partition.m;
    }
  });

  VertexMap map;
  map.image.resize(count);
  MapFailure failure;
  std::vector<int> b_sorted = partition.b;
  std::sort(b_sorted.begin(), b_sorted.end());
  for (std::size_t x = 0; x < count; ++x) {
    bool placed = false;
    for (int b : b_sorted) {
      const Vertex u = static_cast<Vertex>(x) ^ (Vertex{1} << b);
      if (good[u]) {
        map.image[x] = u;
        placed = true;
        break;
      }
    }
    if (!placed) failure.bad_vertices.push_back(static_cast<Vertex>(x));
  }
  if (!failure.bad_vertices.empty()) return failure;
  return map;
}

std::optional<Path> find_open_path(const PercolationSample& sample, const PathFamilySpec& spec) {
  if (!(sample.shape() == spec.shape)) throw Error(Errc::InvalidSpec, "family and sample shapes differ");
  const PathFamily family(spec);
  for (std::uint64_t k = 0; k < family.size(); ++k) {
    const std::vector<int> steps = family.steps(k);
    Vertex cur = spec.x;
    bool open = sample.vertex_present(cur);
    for (int c : steps) {
      if (!open) break;
      open = sample.edge_open(cur, c);
      cur ^= Vertex{1} << c;
    }
    if (open) return walk_steps(spec.x, steps);
  }
  return std::nullopt;
}

double MomentEstimate::second_moment() const {
  if (second_moment_exact) return *second_moment_exact;
  if (mean == 0.0) return 0.0;
  return mean * mean * ratio_bound;
}

namespace {

std::vector<std::uint64_t> path_edges(const CubeShape& shape, Vertex start, const std::vector<int>& steps) {
  std::vector<std::uint64_t> edges;
  edges.reserve(steps.size());
  Vertex cur = start;
  for (int c : steps) {
    edges.push_back(edge_index(shape, cur, c));
    cur ^= Vertex{1} << c;
  }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace

MomentEstimate analytic_moments(const PathFamilySpec& spec, double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArgument, "probability outside [0, 1]");
  const PathFamily family(spec);
  const int n = spec.shape.n();
  MomentEstimate est;
  est.family_size = family.size();
  est.path_length = family.path_length();
  est.mean = static_cast<double>(family.size()) * std::pow(p, family.path_length());
  if (p <= 0.0) {
    est.ratio_bound = std::numeric_limits<double>::infinity();
  } else if (n >= 2) {
    const double alpha = -std::log(p) / std::log(static_cast<double>(n));
    est.ratio_bound = 1.0 + std::pow(static_cast<double>(n), 2.0 * alpha - 1.0);
  }
  if (family.size() > kSecondMomentFamilyCap) return est;

  // Ordered-pair census of shared edges via an edge -> paths incidence list.
  const auto size = static_cast<std::size_t>(family.size());
  std::vector<std::vector<std::uint64_t>> edges(size);
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> incidence;
  for (std::size_t k = 0; k < size; ++k) {
    edges[k] = path_edges(spec.shape, spec.x, family.steps(k));
    for (std::uint64_t e : edges[k]) incidence[e].push_back(static_cast<std::uint32_t>(k));
  }
  std::vector<int> shared(size, 0);
  std::vector<std::uint32_t> touched;
  std::uint64_t disjoint_total = 0;
  for (std::size_t k = 0; k < size; ++k) {
    touched.clear();
    for (std::uint64_t e : edges[k]) {
      for (std::uint32_t j : incidence[e]) {
        if (shared[j]++ == 0) touched.push_back(j);
      }
    }
    for (std::uint32_t j : touched) {
      ++est.overlap_census[shared[j]];
      shared[j] = 0;
    }
    disjoint_total += size - touched.size();
  }
  if (disjoint_total > 0) est.overlap_census[0] += disjoint_total;

  double second = 0.0;
  for (const auto& [overlap, pairs] : est.overlap_census) {
    second += static_cast<double>(pairs) * std::pow(p, 2 * family.path_length() - overlap);
  }
  est.second_moment_exact = second;
  return est;
}

MonteCarloCount monte_carlo_open_paths(const PathFamilySpec& spec, double p, std::uint64_t trials,
                                       std::uint64_t base_seed) {
  if (trials == 0) throw Error(Errc::InvalidArgument, "need at least one trial");
  const PathFamily family(spec);
  std::vector<std::vector<int>> all_steps;
  all_steps.reserve(static_cast<std::size_t>(family.size()));
  family.for_each_steps([&](const std::vector<int>& s) { all_steps.push_back(s); });

  const PercModel model = PercModel::bond_model(p);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto sample = PercolationSample::sample(spec.shape, model, mix64(base_seed, t), SampleMode::Lazy);
    std::uint64_t open_paths = 0;
    for (const auto& steps : all_steps) {
      Vertex cur = spec.x;
      bool open = true;
      for (int c : steps) {
        if (!sample.edge_open(cur, c)) {
          open = false;
          break;
        }
        cur ^= Vertex{1} << c;
      }
      open_paths += open ? 1 : 0;
    }
    const auto x = static_cast<double>(open_paths);
    sum += x;
    sum_sq += x * x;
  }
  MonteCarloCount out;
  out.trials = trials;
  out.mean = sum / static_cast<double>(trials);
  if (trials > 1) {
    out.sample_variance = (sum_sq - sum * out.mean) / static_cast<double>(trials - 1);
  }
  return out;
}

int NeighborDistanceStats::median() const {
  if (pairs == 0) return 0;
  const std::uint64_t rank = (pairs - 1) / 2;
  std::uint64_t seen = 0;
  for (std::size_t d = 0; d < histogram.size(); ++d) {
    seen += histogram[d];
    if (seen > rank) return static_cast<int>(d);
  }
  return cutoff + 1;
}

double NeighborDistanceStats::frac_within_cutoff() const {
  return pairs == 0 ? 0.0 : static_cast<double>(pairs - overflow) / static_cast<double>(pairs);
}

double NeighborDistanceStats::overflow_frac() const {
  return pairs == 0 ? 0.0 : static_cast<double>(overflow) / static_cast<double>(pairs);
}

std::uint64_t count_giant_adjacent_pairs(const CubeShape& shape, const ComponentLabeling& labeling) {
  std::uint64_t eligible = 0;
  for (std::uint64_t v = 0; v < shape.vertex_count(); ++v) {
    const auto u = static_cast<Vertex>(v);
    if (!labeling.in_giant(u)) continue;
    for (int i = 0; i < shape.n(); ++i) {
      if (!((u >> i) & 1U) && labeling.in_giant(u | (Vertex{1} << i))) ++eligible;
    }
  }
  return eligible;
}

std::vector<std::pair<Vertex, Vertex>> giant_adjacent_pairs(const CubeShape& shape, const ComponentLabeling& labeling,
                                                            std::uint64_t count, std::uint64_t seed) {
  std::vector<std::pair<Vertex, Vertex>> out;
  const std::uint64_t eligible = count_giant_adjacent_pairs(shape, labeling);
  if (eligible < count) {
    for (std::uint64_t v = 0; v < shape.vertex_count(); ++v) {
      const auto u = static_cast<Vertex>(v);
      if (!labeling.in_giant(u)) continue;
      for (int i = 0; i < shape.n(); ++i) {
        const Vertex w = u | (Vertex{1} << i);
        if (!((u >> i) & 1U) && labeling.in_giant(w)) out.emplace_back(u, w);
      }
    }
    return out;
  }
  out.reserve(static_cast<std::size_t>(count));
  CounterRng rng(seed);
  while (out.size() < count) {
    const EdgeId e = edge_from_index(shape, rng.below(shape.edge_count()));
    if (labeling.in_giant(e.base) && labeling.in_giant(e.other())) out.emplace_back(e.base, e.other());
  }
  return out;
}

NeighborDistanceStats neighbor_distance_stats(const PercolationSample& sample, const ComponentLabeling& labeling,
                                              std::uint64_t num_pairs, int cutoff, std::uint64_t seed) {
  if (cutoff < 0) throw Error(Errc::InvalidArgument, "cutoff must be non-negative");
  const CubeShape& shape = sample.shape();
  NeighborDistanceStats stats;
  stats.cutoff = cutoff;
  stats.histogram.assign(static_cast<std::size_t>(cutoff) + 1, 0);
  stats.eligible = count_giant_adjacent_pairs(shape, labeling);
  stats.exhaustive = stats.eligible < num_pairs;

  BfsWorkspace ws(shape);
  for (const auto& [a, b] : giant_adjacent_pairs(shape, labeling, num_pairs, seed)) {
    const int d = ws.distance(sample, a, b, cutoff);
    if (d == kUnreachable) {
      ++stats.overflow;
    } else {
      ++stats.histogram[static_cast<std::size_t>(d)];
    }
    ++stats.pairs;
  }
  return stats;
}

}  // namespace cubeperc
