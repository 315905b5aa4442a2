#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cubeperc/hypercube.hpp"

namespace cubeperc {

/// Probability quantized to floor(p 2^64); p >= 1 is "always".
class Threshold {
 public:
  Threshold() = default;
  explicit Threshold(double p);

  static Threshold from_fixed(std::uint64_t fixed) noexcept;

  /// floor(p 2^64), with UINT64_MAX standing for p = 1.
  std::uint64_t fixed() const noexcept { return always_ ? ~std::uint64_t{0} : cut_; }
  double probability() const noexcept;
  bool accepts(std::uint64_t draw) const noexcept { return always_ || draw < cut_; }
  bool operator==(const Threshold&) const = default;

 private:
  std::uint64_t cut_ = 0;
  bool always_ = false;
};

enum class ModelKind : std::uint8_t { Bond = 0, Site = 1, Mixed = 2, Explicit = 3 };

/// Bond(p), Site(p) = Mixed(1, p), Mixed(p_bond, p_site), or a hand-built open set.
struct PercModel {
  ModelKind kind = ModelKind::Bond;
  Threshold bond;
  Threshold site;

  static PercModel bond_model(double p);
  static PercModel site_model(double p);
  static PercModel mixed_model(double p_bond, double p_site);
  static PercModel explicit_model() noexcept;

  bool removes_vertices() const noexcept { return kind == ModelKind::Site || kind == ModelKind::Mixed; }
  bool operator==(const PercModel&) const = default;
};

enum class SampleMode { Materialized, Lazy };

/// The percolated cube H_{n,p}. Immutable; queries are safe from any thread.
class PercolationSample {
 public:
  /// Draws edge e open iff mix64(seed, index(e)) passes the bond threshold; vertex v
  /// uses index n 2^(n-1) + v. Materialized mode requires n <= cap.
  static PercolationSample sample(const CubeShape& shape, const PercModel& model, std::uint64_t seed,
                                  SampleMode mode = SampleMode::Materialized,
                                  int cap = kDefaultDimensionCap, unsigned threads = 0);

  /// Materialized sample with exactly these edges open and every vertex present.
  static PercolationSample from_open_edges(const CubeShape& shape, std::span<const EdgeId> open);

  /// Materialized sample from raw bitsets (edge bits are the effective open state).
  static PercolationSample from_bits(const CubeShape& shape, const PercModel& model, std::uint64_t seed,
                                     std::vector<std::uint64_t> edge_bits,
                                     std::vector<std::uint64_t> vertex_bits);

  const CubeShape& shape() const noexcept { return shape_; }
  const PercModel& model() const noexcept { return model_; }
  std::uint64_t seed() const noexcept { return seed_; }
  SampleMode mode() const noexcept { return mode_; }

  bool vertex_present(Vertex v) const noexcept;

  /// Unchecked: is the edge from v along coord open.
  bool edge_open(Vertex v, int coord) const noexcept;

  /// Throws NotAdjacent unless u, v differ in one coordinate.
  bool is_open_edge(Vertex u, Vertex v) const;

  /// Open incident edges at v, restricted to coordinates in `coord_mask`.
  int open_degree(Vertex v, std::uint32_t coord_mask = ~std::uint32_t{0}) const;

  std::uint64_t open_edge_count() const;
  std::uint64_t present_vertex_count() const;

  PercolationSample materialized(int cap = kDefaultDimensionCap, unsigned threads = 0) const;

  const std::vector<std::uint64_t>& edge_bits() const noexcept { return edge_bits_; }
  const std::vector<std::uint64_t>& vertex_bits() const noexcept { return vertex_bits_; }

  bool operator==(const PercolationSample& other) const;

 private:
  PercolationSample(const CubeShape& shape, const PercModel& model, std::uint64_t seed, SampleMode mode)
      : shape_(shape), model_(model), seed_(seed), mode_(mode) {}

  bool draw_vertex(Vertex v) const noexcept;
  bool draw_edge(Vertex v, int coord) const noexcept;

  CubeShape shape_;
  PercModel model_;
  std::uint64_t seed_ = 0;
  SampleMode mode_ = SampleMode::Lazy;
  std::vector<std::uint64_t> edge_bits_;
  std::vector<std::uint64_t> vertex_bits_;
};

inline constexpr std::uint16_t kSampleFormatVersion = 1;

/// Binary layout: "CPRC", u16 version, u8 n, u8 model tag, u64 fixed-point p fields
/// (bond for Bond, site for Site, bond then site for Mixed, none for Explicit), u64 seed,
/// edge bitset, then the vertex bitset for Site/Mixed. Integers little-endian; bits are
/// LSB-first within bytes in ascending index order.
std::vector<std::uint8_t> serialize(const PercolationSample& sample);
PercolationSample deserialize(std::span<const std::uint8_t> bytes);

}  // namespace cubeperc
