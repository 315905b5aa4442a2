#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cubeperc/hypercube.hpp"
#include "cubeperc/metrics.hpp"
#include "cubeperc/percolation.hpp"

namespace cubeperc {

/// v_0 .. v_L with v_0 == v_L; `anchors[i]` is the walk position of the i-th image x_i.
struct ClosedWalk {
  std::vector<Vertex> vertices;
  std::vector<std::size_t> anchors;

  std::size_t length() const noexcept { return vertices.empty() ? 0 : vertices.size() - 1; }
};

/// Closed simple cycle, stored with the first vertex repeated at the end.
struct SimpleCycle {
  std::vector<Vertex> vertices;

  std::size_t length() const noexcept { return vertices.empty() ? 0 : vertices.size() - 1; }
};

struct RemovalStep {
  Vertex vertex = 0;            // the repeated vertex the loop starts and ends at
  std::size_t start = 0;        // walk position of the kept occurrence
  std::size_t length = 0;       // steps removed
  std::size_t anchors_removed = 0;
  bool within_anchor_bound = true;  // anchors_removed <= 2 D
};

struct Extraction {
  std::optional<SimpleCycle> cycle;  // empty when the walk collapses below 3 vertices
  std::size_t anchor_distance = 0;   // walk-graph distance from v_0 to the surviving vertices
  std::vector<RemovalStep> steps;

  bool degenerate() const noexcept { return !cycle.has_value(); }
};

/// Repeatedly removes the longest minimal loop around a repeated vertex (ties: earliest
/// start, then shortest) until the walk is simple. `distortion` only feeds the per-step
/// anchor check.
Extraction extract_simple_cycle(const ClosedWalk& walk, double distortion);

/// Joins lexicographically least shortest open paths between consecutive images of
/// `cycle` (closed vertex list). Throws ImagesDisconnected.
ClosedWalk image_walk(const VertexMap& map, const std::vector<Vertex>& cycle, const PercolationSample& sample);

/// Rotation/reflection-invariant form: least rotation over both directions, open list.
std::vector<Vertex> canonical_cycle(std::vector<Vertex> open_cycle);

struct CycleSearch {
  int max_length = 4;
  int radius = 0;
  std::uint64_t budget = 50'000'000;  // DFS node expansions
};

struct CycleCensus {
  std::vector<std::vector<Vertex>> cycles;  // canonical forms, ascending
  std::uint64_t expansions = 0;
  bool budget_exceeded = false;

  std::uint64_t count_of_length(std::size_t length) const;
};

/// Simple open cycles of length <= max_length through any vertex within open distance
/// `radius` of v, deduplicated.
CycleCensus find_cycles_near(const PercolationSample& sample, Vertex v, const CycleSearch& search);

/// A quantity tracked as its logarithm base n.
struct LogBound {
  double n = 2.0;
  double log_n = 0.0;
  bool in_regime = true;

  double value() const;
};

/// log of (2l - 1)!!
double log_double_factorial_odd(int l);

/// (2l - 1)!! n^l, the count bound for simple cycles of length 2l through a vertex.
LogBound cycle_count_bound(int n, int l);

/// (2l - 1)!! (n^(1 - 2 alpha))^l; flagged out of regime unless 2l < n^(2 alpha - 1).
LogBound cycle_length_probability_bound(int n, double alpha, int l);

struct CycleBoundParams {
  double alpha = 0.75;
  double beta = 0.2;
  double gamma = 0.25;
  int delta = 0;
};

/// Exact sum over l in [n^beta, n^gamma] of the per-length bound, and the intermediate
/// n (2 n^beta - 1)!! (n^(1 - 2 alpha))^(n^beta) form.
struct SummedCycleBound {
  LogBound sum;
  LogBound leading;
};

SummedCycleBound summed_cycle_probability(int n, const CycleBoundParams& params);

/// n^(delta + 1 + n^beta (beta + 1 - 2 alpha)). Throws OutOfRegime unless alpha > 1/2,
/// 0 < beta < gamma, beta + gamma < 2 alpha - 1 and 2 n^gamma < n^(2 alpha - 1).
LogBound cycle_probability_bound(int n, const CycleBoundParams& params);

/// gamma > 3 beta, the extra constraint of the distortion lower-bound argument.
bool lower_bound_constraints_hold(const CycleBoundParams& params) noexcept;

}  // namespace cubeperc
