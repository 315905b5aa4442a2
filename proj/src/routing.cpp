#include "cubeperc/routing.hpp"

#include <algorithm>
#include <unordered_map>
#include <unordered_set>

#include "cubeperc/error.hpp"

namespace cubeperc {

namespace {

struct Ball {
  std::unordered_map<Vertex, Vertex> parent;  // reached vertex -> predecessor
  std::unordered_map<Vertex, int> depth;
  std::vector<Vertex> frontier;
  int radius = 0;

  explicit Ball(Vertex root) : frontier{root} {
    parent[root] = root;
    depth[root] = 0;
  }

  bool reached(Vertex v) const { return depth.count(v) != 0; }

  // root .. v
  Path trail(Vertex v) const {
    Path out{v};
    while (parent.at(out.back()) != out.back()) out.push_back(parent.at(out.back()));
    std::reverse(out.begin(), out.end());
    return out;
  }
};

}  // namespace

RouteTrace local_route(const PercolationSample& sample, Vertex x, Vertex y, const RouteBudget& budget) {
  const CubeShape& shape = sample.shape();
  if (!shape.contains(x) || !shape.contains(y)) throw Error(Errc::InvalidArgument, "endpoint out of range");
  RouteTrace trace;
  if (!sample.vertex_present(x) || !sample.vertex_present(y)) return trace;
  if (x == y) {
    trace.outcome = RouteOutcome::Found;
    trace.path = {x};
    return trace;
  }

  Ball balls[2] = {Ball(x), Ball(y)};
  std::unordered_map<std::uint64_t, bool> answers;
  const int n = shape.n();

  while (true) {
    if (balls[0].frontier.empty() || (!budget.one_sided && balls[1].frontier.empty())) {
      trace.outcome = RouteOutcome::NotFound;
      return trace;
    }
    if (balls[0].radius + balls[1].radius >= budget.radius) {
      trace.outcome = RouteOutcome::BudgetExhausted;
      return trace;
    }
    const int side = (!budget.one_sided && balls[1].frontier.size() < balls[0].frontier.size()) ? 1 : 0;
    Ball& ball = balls[side];
    const Ball& other = balls[1 - side];

    int best = -1;
    Vertex meet_from = 0;
    Vertex meet_to = 0;
    std::vector<Vertex> next;
    for (Vertex u : ball.frontier) {
      ++trace.explored;
      for (int i = 0; i < n; ++i) {
        const Vertex w = u ^ (Vertex{1} << i);
        if (ball.reached(w)) continue;
        const std::uint64_t key = edge_index(shape, u, i);
        bool open = false;
        if (const auto hit = answers.find(key); hit != answers.end()) {
          open = hit->second;
          trace.log.push_back({u, i, side, open, true});
        } else {
          if (trace.queries >= budget.queries) {
            trace.outcome = RouteOutcome::BudgetExhausted;
            return trace;
          }
          open = sample.edge_open(u, i);
          answers.emplace(key, open);
          ++trace.queries;
          trace.log.push_back({u, i, side, open, false});
        }
        if (!open) continue;
        if (other.reached(w)) {
          const int total = ball.depth.at(u) + 1 + other.depth.at(w);
          if (best < 0 || total < best) {
            best = total;
            meet_from = u;
            meet_to = w;
          }
          continue;
        }
        ball.parent[w] = u;
        ball.depth[w] = ball.radius + 1;
        next.push_back(w);
      }
    }
    ++ball.radius;
    ball.frontier.swap(next);

    if (best >= 0) {
      Path near = ball.trail(meet_from);
      Path far = other.trail(meet_to);
      std::reverse(far.begin(), far.end());
      near.insert(near.end(), far.begin(), far.end());
      if (side == 1) std::reverse(near.begin(), near.end());
      trace.outcome = RouteOutcome::Found;
      trace.path = std::move(near);
      return trace;
    }
  }
}

bool audit_locality(const RouteTrace& trace, const PercolationSample& sample, Vertex x, Vertex y) {
  const CubeShape& shape = sample.shape();
  std::unordered_set<Vertex> reached[2] = {{x}, {y}};
  std::unordered_map<std::uint64_t, bool> asked;
  std::uint64_t oracle_calls = 0;
  for (const EdgeQuery& q : trace.log) {
    if (q.side < 0 || q.side > 1 || q.coord < 0 || q.coord >= shape.n()) return false;
    if (!reached[q.side].count(q.from)) return false;
    if (sample.edge_open(q.from, q.coord) != q.open) return false;
    const std::uint64_t key = edge_index(shape, q.from, q.coord);
    const bool seen = asked.count(key) != 0;
    if (q.cached != seen) return false;
    if (!q.cached) {
      asked.emplace(key, q.open);
      ++oracle_calls;
    }
    if (q.open) reached[q.side].insert(q.from ^ (Vertex{1} << q.coord));
  }
  if (oracle_calls != trace.queries) return false;
  if (trace.outcome == RouteOutcome::Found) {
    if (trace.path.empty() || trace.path.front() != x || trace.path.back() != y) return false;
    for (std::size_t i = 0; i + 1 < trace.path.size(); ++i) {
      const Vertex a = trace.path[i];
      const Vertex b = trace.path[i + 1];
      if (hamming(a, b) != 1 || !sample.is_open_edge(a, b)) return false;
      // Every path edge must have been learned through the oracle.
      if (!asked.count(edge_index(shape, edge_between(shape, a, b)))) return false;
    }
  }
  return true;
}

}  // namespace cubeperc
