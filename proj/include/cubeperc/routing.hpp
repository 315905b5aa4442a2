#pragma once

#include <cstdint>
#include <vector>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/percolation.hpp"

namespace cubeperc {

enum class RouteOutcome { Found, NotFound, BudgetExhausted };

/// One edge lookup from `from` along `coord` on behalf of `side` (0 = ball around x,
/// 1 = ball around y). Cached lookups reuse an earlier answer and are not oracle calls.
struct EdgeQuery {
  Vertex from = 0;
  int coord = 0;
  int side = 0;
  bool open = false;
  bool cached = false;
};

struct RouteTrace {
  RouteOutcome outcome = RouteOutcome::NotFound;
  Path path;                   // x .. y when Found
  std::uint64_t queries = 0;   // distinct edges asked
  std::uint64_t explored = 0;  // vertices whose incident edges were asked
  std::vector<EdgeQuery> log;  // every lookup in issue order
};

struct RouteBudget {
  int radius = 64;                     // longest path length searched for
  std::uint64_t queries = 1ULL << 40;  // distinct oracle calls
  bool one_sided = false;              // grow only the ball around x
};

/// Local-model routing: grows balls around x (and y, unless one_sided) layer by layer,
/// only asking about edges at vertices already reached. Returns a shortest path within
/// the explored balls.
RouteTrace local_route(const PercolationSample& sample, Vertex x, Vertex y, const RouteBudget& budget = {});

/// Replays a trace: every query must start at a vertex already reached from its side,
/// every open answer must match the sample, and a Found path must be open end to end.
bool audit_locality(const RouteTrace& trace, const PercolationSample& sample, Vertex x, Vertex y);

}  // namespace cubeperc
