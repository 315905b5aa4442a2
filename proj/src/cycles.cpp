#include "cubeperc/cycles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "cubeperc/error.hpp"

namespace cubeperc {

namespace {

struct Entry {
  Vertex vertex;
  std::size_t position;  // index in the original walk
};

struct Candidate {
  std::size_t start = 0;   // index into the current sequence
  std::size_t length = 0;  // steps in the loop
};

}  // namespace

Extraction extract_simple_cycle(const ClosedWalk& walk, double distortion) {
  if (walk.vertices.empty() || walk.vertices.front() != walk.vertices.back()) {
    throw Error(Errc::InvalidArgument, "walk is not closed");
  }
  for (std::size_t i = 0; i + 1 < walk.vertices.size(); ++i) {
    if (hamming(walk.vertices[i], walk.vertices[i + 1]) != 1) {
      throw Error(Errc::InvalidArgument, "walk step " + std::to_string(i) + " is not a cube edge");
    }
  }
  const std::size_t total = walk.length();
  std::vector<std::size_t> anchors_at(total + 1, 0);
  for (std::size_t a : walk.anchors) {
    if (a > total) throw Error(Errc::InvalidArgument, "anchor outside the walk");
    ++anchors_at[a % std::max<std::size_t>(total, 1)];
  }

  std::vector<Entry> seq;
  seq.reserve(total);
  for (std::size_t i = 0; i < total; ++i) seq.push_back({walk.vertices[i], i});

  Extraction out;
  while (true) {
    const std::size_t len = seq.size();
    std::unordered_map<Vertex, std::vector<std::size_t>> where;
    for (std::size_t i = 0; i < len; ++i) where[seq[i].vertex].push_back(i);

    std::optional<Candidate> pick;
    for (const auto& [vertex, occ] : where) {
      if (occ.size() < 2) continue;
      // Minimal covering segment = complement of the largest gap between occurrences.
      std::optional<Candidate> own;
      for (std::size_t j = 0; j < occ.size(); ++j) {
        const bool wrap = j + 1 == occ.size();
        const std::size_t gap = wrap ? occ.front() + len - occ.back() : occ[j + 1] - occ[j];
        const Candidate c{wrap ? occ.front() : occ[j + 1], len - gap};
        if (!own || c.length < own->length || (c.length == own->length && c.start < own->start)) own = c;
      }
      if (!pick || own->length > pick->length || (own->length == pick->length && own->start < pick->start)) {
        pick = own;
      }
    }
    if (!pick) break;

    RemovalStep step;
    step.vertex = seq[pick->start].vertex;
    step.start = seq[pick->start].position;
    step.length = pick->length;
    std::vector<bool> removed(len, false);
    for (std::size_t k = 1; k <= pick->length; ++k) {
      const std::size_t idx = (pick->start + k) % len;
      removed[idx] = true;
      step.anchors_removed += anchors_at[seq[idx].position];
    }
    step.within_anchor_bound = static_cast<double>(step.anchors_removed) <= 2.0 * distortion;
    out.steps.push_back(step);

    std::vector<Entry> kept;
    kept.reserve(len - pick->length);
    for (std::size_t i = 0; i < len; ++i) {
      if (!removed[i]) kept.push_back(seq[i]);
    }
    seq.swap(kept);
  }

  std::unordered_set<Vertex> survivors;
  for (const Entry& e : seq) survivors.insert(e.vertex);

  // Distance from v_0 to the survivors inside the graph traced by the original walk.
  std::unordered_map<Vertex, std::vector<Vertex>> adjacency;
  for (std::size_t i = 0; i < total; ++i) {
    adjacency[walk.vertices[i]].push_back(walk.vertices[i + 1]);
    adjacency[walk.vertices[i + 1]].push_back(walk.vertices[i]);
  }
  std::unordered_map<Vertex, std::size_t> dist{{walk.vertices.front(), 0}};
  std::queue<Vertex> queue;
  queue.push(walk.vertices.front());
  while (!queue.empty()) {
    const Vertex u = queue.front();
    queue.pop();
    if (survivors.count(u)) {
      out.anchor_distance = dist[u];
      break;
    }
    for (Vertex w : adjacency[u]) {
      if (dist.emplace(w, dist[u] + 1).second) queue.push(w);
    }
  }

  if (seq.size() >= 3) {
    SimpleCycle cycle;
    for (const Entry& e : seq) cycle.vertices.push_back(e.vertex);
    cycle.vertices.push_back(seq.front().vertex);
    out.cycle = std::move(cycle);
  }
  return out;
}

ClosedWalk image_walk(const VertexMap& map, const std::vector<Vertex>& cycle, const PercolationSample& sample) {
  if (cycle.empty() || cycle.front() != cycle.back()) throw Error(Errc::InvalidArgument, "cycle is not closed");
  if (map.image.size() != sample.shape().vertex_count()) {
    throw Error(Errc::InvalidArgument, "map must have one image per cube vertex");
  }
  BfsWorkspace ws(sample.shape());
  ClosedWalk walk;
  walk.vertices.push_back(map(cycle.front()));
  for (std::size_t i = 0; i + 1 < cycle.size(); ++i) {
    walk.anchors.push_back(walk.vertices.size() - 1);
    const auto arc = ws.shortest_path(sample, map(cycle[i]), map(cycle[i + 1]));
    if (!arc) {
      throw Error(Errc::ImagesDisconnected,
                  "no open path between images of " + std::to_string(cycle[i]) + " and " + std::to_string(cycle[i + 1]));
    }
    walk.vertices.insert(walk.vertices.end(), arc->begin() + 1, arc->end());
  }
  return walk;
}

std::vector<Vertex> canonical_cycle(std::vector<Vertex> open_cycle) {
  if (open_cycle.empty()) return open_cycle;
  auto least_rotation = [](const std::vector<Vertex>& c) {
    std::vector<Vertex> best = c;
    std::vector<Vertex> rot(c.size());
    for (std::size_t s = 1; s < c.size(); ++s) {
      for (std::size_t i = 0; i < c.size(); ++i) rot[i] = c[(s + i) % c.size()];
      if (rot < best) best = rot;
    }
    return best;
  };
  std::vector<Vertex> forward = least_rotation(open_cycle);
  std::reverse(open_cycle.begin(), open_cycle.end());
  std::vector<Vertex> backward = least_rotation(open_cycle);
  return std::min(forward, backward);
}

std::uint64_t CycleCensus::count_of_length(std::size_t length) const {
  return static_cast<std::uint64_t>(
      std::count_if(cycles.begin(), cycles.end(), [length](const auto& c) { return c.size() == length; }));
}

CycleCensus find_cycles_near(const PercolationSample& sample, Vertex v, const CycleSearch& search) {
  const CubeShape& shape = sample.shape();
  if (!shape.contains(v)) throw Error(Errc::InvalidArgument, "vertex out of range");
  if (search.max_length < 3 || search.radius < 0) throw Error(Errc::InvalidArgument, "bad cycle search bounds");
  CycleCensus census;
  if (!sample.vertex_present(v)) return census;

  const DistanceField ball = bfs(sample, v, search.radius);
  std::set<std::vector<Vertex>> found;
  const int n = shape.n();
  const auto max_len = static_cast<std::size_t>(search.max_length);

  std::vector<Vertex> path;
  std::unordered_set<Vertex> on_path;
  for (std::size_t s = 0; s < ball.dist.size() && !census.budget_exceeded; ++s) {
    if (ball.dist[s] == kUnreachable) continue;
    const auto start = static_cast<Vertex>(s);
    path.assign(1, start);
    on_path = {start};
    // Explicit DFS stack of next coordinate to try per depth.
    std::vector<int> next_coord{0};
    while (!next_coord.empty()) {
      const Vertex cur = path.back();
      int& coord = next_coord.back();
      if (coord >= n) {
        on_path.erase(cur);
        path.pop_back();
        next_coord.pop_back();
        continue;
      }
      const int i = coord++;
      if (!sample.edge_open(cur, i)) continue;
      const Vertex w = cur ^ (Vertex{1} << i);
      if (w == start) {
        // Each cycle is met in both directions; keep the one whose second vertex is smaller.
        if (path.size() >= 3 && path[1] < path.back()) found.insert(canonical_cycle(path));
        continue;
      }
      if (on_path.count(w) || path.size() + 1 > max_len) continue;
      // Need room to return: remaining steps after w must cover its distance to start.
      if (static_cast<std::size_t>(hamming(w, start)) > max_len - path.size()) continue;
      if (++census.expansions > search.budget) {
        census.budget_exceeded = true;
        break;
      }
      path.push_back(w);
      on_path.insert(w);
      next_coord.push_back(0);
    }
  }
  census.cycles.assign(found.begin(), found.end());
  return census;
}

double LogBound::value() const { return std::pow(n, log_n); }

double log_double_factorial_odd(int l) {
  if (l < 0) throw Error(Errc::InvalidArgument, "negative double factorial index");
  // (2l - 1)!! = (2l)! / (2^l l!)
  return std::lgamma(2.0 * l + 1.0) - l * std::log(2.0) - std::lgamma(l + 1.0);
}

LogBound cycle_count_bound(int n, int l) {
  if (n < 2 || l < 1) throw Error(Errc::InvalidArgument, "cycle count bound needs n >= 2, l >= 1");
  const double ln_n = std::log(static_cast<double>(n));
  return {static_cast<double>(n), log_double_factorial_odd(l) / ln_n + l, true};
}

LogBound cycle_length_probability_bound(int n, double alpha, int l) {
  if (n < 2 || l < 1) throw Error(Errc::InvalidArgument, "probability bound needs n >= 2, l >= 1");
  const double nd = static_cast<double>(n);
  const double ln_n = std::log(nd);
  LogBound b{nd, log_double_factorial_odd(l) / ln_n + l * (1.0 - 2.0 * alpha), true};
  b.in_regime = 2.0 * l < std::pow(nd, 2.0 * alpha - 1.0);
  return b;
}

namespace {

void validate_params(int n, const CycleBoundParams& p) {
  if (n < 2) throw Error(Errc::InvalidArgument, "n must be at least 2");
  if (!(p.alpha > 0.5)) throw Error(Errc::OutOfRegime, "alpha must exceed 1/2");
  if (!(p.beta > 0.0 && p.gamma > p.beta)) throw Error(Errc::OutOfRegime, "need 0 < beta < gamma");
  if (!(p.beta + p.gamma < 2.0 * p.alpha - 1.0)) throw Error(Errc::OutOfRegime, "need beta + gamma < 2 alpha - 1");
  if (p.delta < 0) throw Error(Errc::InvalidArgument, "delta must be non-negative");
  const double nd = static_cast<double>(n);
  if (!(2.0 * std::pow(nd, p.gamma) < std::pow(nd, 2.0 * p.alpha - 1.0))) {
    throw Error(Errc::OutOfRegime, "per-length bound not monotone on [n^beta, n^gamma]");
  }
}

}  // namespace

SummedCycleBound summed_cycle_probability(int n, const CycleBoundParams& params) {
  validate_params(n, params);
  const double nd = static_cast<double>(n);
  const double ln_n = std::log(nd);
  const int lo = static_cast<int>(std::ceil(std::pow(nd, params.beta)));
  const int hi = static_cast<int>(std::floor(std::pow(nd, params.gamma)));

  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> terms;
  for (int l = std::max(lo, 1); l <= hi; ++l) {
    terms.push_back(cycle_length_probability_bound(n, params.alpha, l).log_n * ln_n);
    max_log = std::max(max_log, terms.back());
  }
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_log);
  SummedCycleBound out;
  out.sum = {nd, terms.empty() ? -std::numeric_limits<double>::infinity() : (max_log + std::log(acc)) / ln_n, true};

  const double first = std::pow(nd, params.beta);
  // (2x - 1)!! extended to real x through the gamma function.
  const double log_df = std::lgamma(2.0 * first + 1.0) - first * std::log(2.0) - std::lgamma(first + 1.0);
  out.leading = {nd, 1.0 + log_df / ln_n + first * (1.0 - 2.0 * params.alpha), true};
  return out;
}

LogBound cycle_probability_bound(int n, const CycleBoundParams& params) {
  validate_params(n, params);
  const double nd = static_cast<double>(n);
  return {nd, params.delta + 1.0 + std::pow(nd, params.beta) * (params.beta + 1.0 - 2.0 * params.alpha), true};
}

bool lower_bound_constraints_hold(const CycleBoundParams& params) noexcept { return params.gamma > 3.0 * params.beta; }

}  // namespace cubeperc
