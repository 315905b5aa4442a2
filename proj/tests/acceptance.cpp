// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>

#include "cubeperc/cycles.hpp"
#include "cubeperc/embedding.hpp"
#include "cubeperc/error.hpp"
#include "cubeperc/harness.hpp"
#include "cubeperc/metrics.hpp"
#include "cubeperc/mix.hpp"
#include "cubeperc/routing.hpp"
#include "oracles.hpp"

using namespace cubeperc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

int failures = 0;

void run(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs >= limit_s) {
    o.pass = false;
    o.detail += " [over time limit]";
  }
  if (!o.pass) ++failures;
  std::printf("%s %d %s: %s (%.1f s, limit %.0f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), secs,
              limit_s);
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

PercolationSample bond(int n, double p, std::uint64_t seed, SampleMode mode = SampleMode::Materialized) {
  return PercolationSample::sample(CubeShape(n), PercModel::bond_model(p), seed, mode);
}

oracle::Ratio as_ratio(const DistortionReport& r) {
  if (r.infinite) return oracle::Ratio{true};
  return {false, r.plus, r.minus_num, r.minus_den};
}

bool same_report(const DistortionReport& a, const DistortionReport& b) {
  return a.infinite == b.infinite && a.plus == b.plus &&
         static_cast<long long>(a.minus_num) * b.minus_den == static_cast<long long>(b.minus_num) * a.minus_den;
}

template <class T>
T median_of(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  return v[(v.size() - 1) / 2];
}

Outcome oracle_equivalence() {
  int samples = 0;
  int mismatches = 0;
  int oracle_checked = 0;
  for (int n : {2, 3}) {
    for (double p : {0.3, 0.6}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto s = bond(n, p, trial_seed(101, seed));
        const auto best = brute_force_min_distortion(s);
        ++samples;
        if (!same_report(best.report, evaluate_distortion(s, best.map))) ++mismatches;
        const auto labels = components(s);
        const auto giant = labels.members(labels.giant);
        // the unpruned reference enumerates |giant|^(2^n) maps
        if (giant.size() <= 6) {
          ++oracle_checked;
          if (!as_ratio(best.report).same(oracle::min_distortion(oracle::floyd_warshall(s), n, giant))) ++mismatches;
        }
      }
    }
  }
  return {mismatches == 0,
          fmt("%d samples, %d also against the reference enumerator, %d mismatches", samples, oracle_checked, mismatches)};
}

Outcome moment_cross_check() {
  const int n = 16;
  const double alpha = 0.25;
  const double p = std::pow(16.0, -alpha);
  const std::uint64_t trials = 10'000;
  bool ok = true;
  std::string detail;
  for (int l : {1, 2}) {
    const PathFamilySpec spec{CubeShape(n), NeighborRetrace{l}, 0, 1};
    const auto m = analytic_moments(spec, p);
    const auto mc = monte_carlo_open_paths(spec, p, trials, trial_seed(202, static_cast<std::uint64_t>(l)));
    const double ex2 = m.second_moment();
    const double sigma = std::sqrt(m.variance() / static_cast<double>(trials));
    const double z = (mc.mean - m.mean) / sigma;
    const double scaled = (ex2 / (m.mean * m.mean) - 1.0) * std::pow(n, 1.0 - 2.0 * alpha);
    const bool here = !m.capped() && std::abs(z) <= 4.0 && ex2 >= m.mean * m.mean && (l != 1 || (scaled >= 0.2 && scaled <= 5.0));
    ok = ok && here;
    detail += fmt("l=%d mean %.4f mc %.4f z %.2f correction %.3f; ", l, m.mean, mc.mean, z, scaled);
  }
  return {ok, detail};
}

Outcome phase_separation() {
  const int n = 20;
  int median_wins = 0;
  int overflow_wins = 0;
  std::string meds;
  for (std::uint64_t i = 0; i < 10; ++i) {
    const std::uint64_t seed = trial_seed(303, i);
    NeighborDistanceStats st[2];
    for (int k = 0; k < 2; ++k) {
      const double alpha = k == 0 ? 0.25 : 0.75;
      const auto s = bond(n, std::pow(n, -alpha), seed);
      st[k] = neighbor_distance_stats(s, components(s), 1000, 9, mix64(seed, 1));
    }
    median_wins += st[0].median() < st[1].median();
    overflow_wins += st[1].overflow_frac() > st[0].overflow_frac();
    meds += fmt("%d/%d ", st[0].median(), st[1].median());
  }
  return {median_wins >= 9 && overflow_wins >= 9,
          fmt("median smaller in %d/10, overflow larger in %d/10; medians %s", median_wins, overflow_wins, meds.c_str())};
}

Outcome cycle_census() {
  bool ok = true;
  std::string detail;
  for (int n = 3; n <= 6; ++n) {
    const auto c = find_cycles_near(bond(n, 1.0, 0), 0, {4, 0});
    const auto want = static_cast<std::uint64_t>(n * (n - 1) / 2);
    ok = ok && c.count_of_length(4) == want && c.cycles.size() == want;
    detail += fmt("H_%d %llu four-cycles; ", n, static_cast<unsigned long long>(c.count_of_length(4)));
  }
  int compared = 0;
  int bad = 0;
  for (int n = 2; n <= 4; ++n) {
    for (double p : {1.0, 0.8, 0.6}) {
      for (std::uint64_t seed = 0; seed < 4; ++seed) {
        const auto s = bond(n, p, trial_seed(404, seed));
        for (Vertex v = 0; v < s.shape().vertex_count(); v += 3) {
          const auto got = find_cycles_near(s, v, {8, 0});
          const auto ref = oracle::cycles_through(s, v, 8);
          ++compared;
          for (int len = 3; len <= 8; ++len) {
            if (got.count_of_length(static_cast<std::size_t>(len)) != ref[static_cast<std::size_t>(len)]) ++bad;
            if (len % 2 == 0) {
              const int half = len / 2;
              const double bound = static_cast<double>(oracle::double_factorial_odd(half)) * std::pow(n, half);
              if (static_cast<double>(got.count_of_length(static_cast<std::size_t>(len))) > bound) ++bad;
            }
          }
        }
      }
    }
  }
  detail += fmt("%d censuses against brute force, %d disagreements", compared, bad);
  return {ok && bad == 0, detail};
}

VertexMap perturbed_automorphism(int n, CounterRng& rng, const Path& cycle, int perturbations) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  const auto flip = static_cast<Vertex>(rng.below(Vertex{1} << n));
  const Vertex size = Vertex{1} << n;
  VertexMap f{std::vector<Vertex>(size)};
  for (Vertex v = 0; v < size; ++v) {
    Vertex w = 0;
    for (int i = 0; i < n; ++i) {
      if (v >> i & 1U) w |= Vertex{1} << perm[static_cast<std::size_t>(i)];
    }
    f.image[v] = w ^ flip;
  }
  for (int k = 0; k < perturbations; ++k) {
    const Vertex u = rng.below(2) == 0 ? cycle[rng.below(cycle.size() - 1)] : static_cast<Vertex>(rng.below(size));
    switch (rng.below(3)) {
      case 0:  // nudge
        f.image[u] ^= Vertex{1} << rng.below(static_cast<std::uint64_t>(n));
        break;
      case 1:  // merge with a neighbour's image
        f.image[u] = f.image[u ^ (Vertex{1} << rng.below(static_cast<std::uint64_t>(n)))];
        break;
      default:  // two-bit jump
        f.image[u] ^= (Vertex{1} << rng.below(static_cast<std::uint64_t>(n))) |
                      (Vertex{1} << rng.below(static_cast<std::uint64_t>(n)));
    }
  }
  return f;
}

bool is_simple_closed(const SimpleCycle& c) {
  const auto& v = c.vertices;
  if (v.size() < 4 || v.front() != v.back()) return false;
  std::vector<Vertex> open(v.begin(), v.end() - 1);
  std::sort(open.begin(), open.end());
  if (std::adjacent_find(open.begin(), open.end()) != open.end()) return false;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (hamming(v[i], v[i + 1]) != 1) return false;
  }
  return true;
}

Outcome loop_removal() {
  CounterRng rng(505);
  std::vector<PercolationSample> cubes;
  for (int n = 0; n <= 8; ++n) cubes.push_back(bond(std::max(n, 1), 1.0, 0));
  int degenerate = 0;
  int length_bad = 0;
  int anchor_bad = 0;
  int step_bad = 0;
  int not_simple = 0;
  double worst_d = 1.0;
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 4 + static_cast<int>(rng.below(5));
    const int l = 4 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n - 3)));
    const auto& cube = cubes[static_cast<std::size_t>(n)];
    std::vector<int> coords(static_cast<std::size_t>(n));
    std::iota(coords.begin(), coords.end(), 0);
    for (int i = n - 1; i > 0; --i) std::swap(coords[i], coords[rng.below(static_cast<std::uint64_t>(i) + 1)]);
    coords.resize(static_cast<std::size_t>(l));
    const auto cycle = geodesic_cycle(cube.shape(), static_cast<Vertex>(rng.below(cube.shape().vertex_count())), coords);
    const auto f = perturbed_automorphism(n, rng, cycle, static_cast<int>(rng.below(5)));
    const auto rep = evaluate_distortion(cube, f);
    const double d = rep.distortion;
    worst_d = std::max(worst_d, d);
    const auto ex = extract_simple_cycle(image_walk(f, cycle, cube), d);
    if (ex.degenerate()) {
      ++degenerate;
      continue;
    }
    const double len = static_cast<double>(ex.cycle->length());
    const double big_l = 2.0 * l;
    if (len < big_l / (2.0 * d) || len > rep.plus * big_l) ++length_bad;
    if (static_cast<double>(ex.anchor_distance) > 2.0 * d * rep.plus) ++anchor_bad;
    for (const auto& st : ex.steps) step_bad += static_cast<double>(st.anchors_removed) > 2.0 * d;
    not_simple += !is_simple_closed(*ex.cycle);
  }
  const int total = degenerate + length_bad + anchor_bad + step_bad + not_simple;
  return {total == 0, fmt("500 maps (max D %.2f): degenerate %d, length %d, anchor distance %d, step %d, non-simple %d",
                          worst_d, degenerate, length_bad, anchor_bad, step_bad, not_simple)};
}

// Bad vertices recomputed from the goodness test alone.
std::vector<Vertex> expected_bad(const PercolationSample& s, const CoordinatePartition& part) {
  std::vector<Vertex> bad;
  for (Vertex v = 0; v < s.shape().vertex_count(); ++v) {
    bool any = false;
    for (int b : part.b) {
      if (is_good(s, v ^ (Vertex{1} << b), part)) {
        any = true;
        break;
      }
    }
    if (!any) bad.push_back(v);
  }
  return bad;
}

Outcome good_map_contract() {
  int placed = 0;
  int unplaceable = 0;
  int built = 0;
  int verified_failures = 0;
  int violations = 0;
  for (int n = 2; n <= 10; ++n) {
    for (double alpha : {0.01, 0.05, 0.1, 0.2, 0.3, 0.45}) {
      CoordinatePartition part;
      try {
        part = make_partition(CubeShape(n), alpha);
      } catch (const Error& e) {
        if (e.code() != Errc::DimensionTooSmall) throw;
        ++unplaceable;
        continue;
      }
      for (std::uint64_t i = 0; i < 30; ++i) {
        const auto s = bond(n, std::pow(n, -alpha), trial_seed(606, i));
        ++placed;
        const auto result = build_good_map(s, part);
        if (const auto* fail = std::get_if<MapFailure>(&result)) {
          if (!fail->bad_vertices.empty() && fail->bad_vertices == expected_bad(s, part)) {
            ++verified_failures;
          } else {
            ++violations;
          }
          continue;
        }
        ++built;
        const auto& f = std::get<VertexMap>(result);
        const auto labels = components(s);
        bool connected = true;
        for (auto img : f.image) connected = connected && labels.label[img] == labels.label[f.image[0]];
        if (!connected) continue;
        const auto r = evaluate_distortion(s, f);
        if (r.infinite || 3 * r.minus_num <= r.minus_den || r.plus > 2 * part.l + 13) ++violations;
      }
    }
  }

  // Successful builds first appear once C(m,2) >= 2m, i.e. m >= 5; check the same
  // contract there with exact D_+ over cube edges and sampled D_-.
  const int n = 16;
  const double alpha = 0.01;
  const auto part = make_partition(CubeShape(n), alpha);
  const auto s = bond(n, std::pow(n, -alpha), trial_seed(606, 99));
  const auto result = build_good_map(s, part);
  std::string supplement = "n=16 build failed";
  if (const auto* f = std::get_if<VertexMap>(&result)) {
    BfsWorkspace ws(s.shape());
    int plus = 0;
    for (std::uint64_t e = 0; e < s.shape().edge_count(); ++e) {
      const auto id = edge_from_index(s.shape(), e);
      const int d = ws.distance(s, f->image[id.base], f->image[id.base ^ (Vertex{1} << id.coord)]);
      plus = d == kUnreachable ? std::numeric_limits<int>::max() : std::max(plus, d);
    }
    const auto sampled = evaluate_distortion(s, *f, DistortionMode::sampled(20'000, 7));
    const bool ok = plus <= 2 * part.l + 13 && 3 * sampled.minus_num > sampled.minus_den;
    violations += !ok;
    supplement = fmt("n=16 alpha=0.01 built, D+ %d <= %d, sampled D- %d/%d", plus, 2 * part.l + 13, sampled.minus_num,
                     sampled.minus_den);
  } else {
    ++violations;
  }
  return {violations == 0,
          fmt("n<=10: %d instances (%d unplaceable cells), %d built, %d failures reported and verified, "
              "%d violations; %s",
              placed, unplaceable, built, verified_failures, violations, supplement.c_str())};
}

Outcome routing_contract() {
  const int n = 12;
  const CubeShape shape(n);
  int routes = 0;
  int wrong_length = 0;
  int audit_failures = 0;
  int seed_wins = 0;
  std::vector<std::uint64_t> medians[2];
  for (std::uint64_t i = 0; i < 10; ++i) {
    const std::uint64_t seed = trial_seed(707, i);
    for (int k = 0; k < 2; ++k) {
      const auto lazy = bond(n, std::pow(n, k == 0 ? -0.25 : -0.75), seed, SampleMode::Lazy);
      const auto mat = lazy.materialized();
      const auto labels = components(mat);
      BfsWorkspace ws(shape);
      std::vector<std::uint64_t> queries;
      for (const auto& [a, b] : giant_adjacent_pairs(shape, labels, 50, mix64(seed, 4))) {
        const auto t = local_route(lazy, a, b);
        ++routes;
        queries.push_back(t.queries);
        audit_failures += !audit_locality(t, lazy, a, b);
        if (t.outcome == RouteOutcome::Found) {
          wrong_length += static_cast<int>(t.path.size()) - 1 != ws.distance(mat, a, b);
        } else {
          ++wrong_length;  // both ends are in the giant, so a miss is a bug
        }
      }
      medians[k].push_back(median_of(queries));
    }
    seed_wins += medians[0].back() < medians[1].back();
  }
  const auto low = median_of(medians[0]);
  const auto high = median_of(medians[1]);
  return {wrong_length == 0 && audit_failures == 0 && routes >= 1000 && low < high,
          fmt("%d routes, %d wrong lengths, %d audit failures; median queries %llu vs %llu (smaller in %d/10 seeds)",
              routes, wrong_length, audit_failures, static_cast<unsigned long long>(low),
              static_cast<unsigned long long>(high), seed_wins)};
}

Outcome scale_and_determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto s = bond(24, std::pow(24.0, -0.5), 808);
  const auto labels = components(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  const double peak_mb = static_cast<double>(usage.ru_maxrss) / 1024.0;

  int configs = 0;
  int differing = 0;
  for (const auto& entry : std::filesystem::directory_iterator(GOLDEN_DIR)) {
    if (entry.path().extension() != ".json") continue;
    std::ifstream in(entry.path());
    std::stringstream text;
    text << in.rdbuf();
    auto config = parse_config(text.str());
    config.threads = 1;
    const auto first = run_sweep(config).csv;
    config.threads = 3;
    const auto second = run_sweep(config).csv;
    ++configs;
    differing += first != second;
  }
  const bool ok = secs < 60.0 && peak_mb < 1024.0 && configs > 0 && differing == 0;
  return {ok, fmt("n=24 sample+components %.1f s, peak RSS %.0f MB, giant %llu; %d sweep configs rerun, %d differ",
                  secs, peak_mb, static_cast<unsigned long long>(labels.giant_size()), configs, differing)};
}

}  // namespace

int main() {
  run(1, "distortion oracle equivalence", 60, oracle_equivalence);
  run(2, "moment cross-check", 120, moment_cross_check);
  run(3, "phase-transition separation", 300, phase_separation);
  run(4, "cycle census exactness", 120, cycle_census);
  run(5, "loop-removal guarantee", 120, loop_removal);
  run(6, "good-map contract", 180, good_map_contract);
  run(7, "routing contract", 120, routing_contract);
  run(8, "scale and determinism", 600, scale_and_determinism);
  std::printf("%s: %d of 8 criteria failed\n", failures == 0 ? "ALL PASS" : "FAILURES", failures);
  return failures == 0 ? 0 : 1;
}
