#include <doctest.h>

#include <cmath>

#include "cubeperc/error.hpp"
#include "cubeperc/mix.hpp"
#include "cubeperc/percolation.hpp"

using namespace cubeperc;

namespace {

template <class F>
Errc error_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::InvalidArgument;
}

}  // namespace

TEST_CASE("mix64 reference values") {
  // SplitMix64 with state 0: the first output of the standard generator is
  // finalize(0 + golden) = 0xe220a8397b1dcdaf.
  CHECK(mix64(0, 1) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix_finalize(0) == 0);
  CounterRng a(7), b(7);
  for (int i = 0; i < 10; ++i) CHECK(a.next() == b.next());
  CounterRng r(3);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.below(10) < 10);
    const double u = r.unit();
    CHECK((u >= 0.0 && u < 1.0));
  }
}

TEST_CASE("threshold quantization") {
  CHECK(Threshold(1.0).fixed() == ~std::uint64_t{0});
  CHECK(Threshold(1.0).accepts(~std::uint64_t{0}));
  CHECK(Threshold(0.0).fixed() == 0);
  CHECK(!Threshold(0.0).accepts(0));
  CHECK(Threshold(0.5).fixed() == (std::uint64_t{1} << 63));
  CHECK(Threshold::from_fixed(Threshold(0.25).fixed()) == Threshold(0.25));
  CHECK(error_of([] { Threshold(1.5); }) == Errc::InvalidArgument);
  CHECK(error_of([] { Threshold(-0.1); }) == Errc::InvalidArgument);
}

TEST_CASE("extreme probabilities") {
  for (int n = 1; n <= 10; ++n) {
    const CubeShape shape(n);
    const auto full = PercolationSample::sample(shape, PercModel::bond_model(1.0), 99);
    CHECK(full.open_edge_count() == shape.edge_count());
    const auto none = PercolationSample::sample(shape, PercModel::bond_model(0.0), 99);
    CHECK(none.open_edge_count() == 0);
    for (Vertex v = 0; v < shape.vertex_count(); ++v) {
      CHECK(full.open_degree(v) == n);
      CHECK(none.open_degree(v) == 0);
      if (n > 1) CHECK(full.is_open_edge(v, v ^ 2U));
      CHECK(!none.is_open_edge(v, v ^ 1U));
    }
  }
  const auto full = PercolationSample::sample(CubeShape(10), PercModel::bond_model(1.0), 1);
  CHECK(full.open_degree(3, 0b111U) == 3);
  CHECK(error_of([&] { full.is_open_edge(5, 5); }) == Errc::NotAdjacent);
  CHECK(error_of([&] { full.is_open_edge(0, 3); }) == Errc::NotAdjacent);
}

TEST_CASE("open fraction matches p") {
  const CubeShape shape(16);
  for (double p : {0.1, 0.25, 0.5, 0.9}) {
    const auto s = PercolationSample::sample(shape, PercModel::bond_model(p), 1);
    const double edges = static_cast<double>(shape.edge_count());
    const double frac = static_cast<double>(s.open_edge_count()) / edges;
    const double sigma = std::sqrt(p * (1 - p) / edges);
    CHECK(std::abs(frac - p) < 4 * sigma);
  }
  const double p = std::pow(16.0, -0.5);
  const auto s = PercolationSample::sample(shape, PercModel::bond_model(p), 1);
  const double frac = static_cast<double>(s.open_edge_count()) / 524288.0;
  CHECK(std::abs(frac - 0.25) < 3 * std::sqrt(0.25 * 0.75 / 524288.0));
}

TEST_CASE("determinism and lazy equivalence") {
  const CubeShape shape(20);
  const PercModel model = PercModel::bond_model(0.3);
  const auto a = PercolationSample::sample(shape, model, 42, SampleMode::Materialized, kDefaultDimensionCap, 1);
  const auto b = PercolationSample::sample(shape, model, 42, SampleMode::Materialized, kDefaultDimensionCap, 3);
  CHECK(a == b);
  CHECK(serialize(a) == serialize(b));
  const auto lazy = PercolationSample::sample(shape, model, 42, SampleMode::Lazy);
  CHECK(lazy == a);
  CounterRng rng(5);
  for (int q = 0; q < 100'000; ++q) {
    const auto v = static_cast<Vertex>(rng.below(shape.vertex_count()));
    const int c = static_cast<int>(rng.below(20));
    REQUIRE(lazy.edge_open(v, c) == a.edge_open(v, c));
  }
  CHECK(lazy.materialized() == a);
  const auto other = PercolationSample::sample(shape, model, 43);
  CHECK(!(other == a));
}

TEST_CASE("site and mixed models") {
  const CubeShape shape(12);
  const auto bond = PercolationSample::sample(shape, PercModel::bond_model(0.4), 11);
  const auto mixed = PercolationSample::sample(shape, PercModel::mixed_model(0.4, 1.0), 11);
  CHECK(mixed.edge_bits() == bond.edge_bits());
  CHECK(mixed.present_vertex_count() == shape.vertex_count());

  const auto site = PercolationSample::sample(shape, PercModel::site_model(0.5), 11);
  const double frac = static_cast<double>(site.present_vertex_count()) / 4096.0;
  CHECK(std::abs(frac - 0.5) < 4 * std::sqrt(0.25 / 4096.0));
  std::uint64_t expected_edges = 0;
  for (Vertex v = 0; v < shape.vertex_count(); ++v) {
    for (int c = 0; c < 12; ++c) {
      const Vertex w = v ^ (Vertex{1} << c);
      const bool both = site.vertex_present(v) && site.vertex_present(w);
      CHECK(site.edge_open(v, c) == both);
      if (v < w && both) ++expected_edges;
    }
  }
  CHECK(site.open_edge_count() == expected_edges);

  const auto lazy_site = PercolationSample::sample(shape, PercModel::mixed_model(0.7, 0.6), 8, SampleMode::Lazy);
  CHECK(lazy_site == PercolationSample::sample(shape, PercModel::mixed_model(0.7, 0.6), 8));
}

TEST_CASE("explicit samples") {
  const CubeShape shape(2);
  const std::vector<EdgeId> open{{0, 0}, {1, 1}};  // 00-01, 01-11
  const auto s = PercolationSample::from_open_edges(shape, open);
  CHECK(s.is_open_edge(0, 1));
  CHECK(s.is_open_edge(1, 3));
  CHECK(!s.is_open_edge(0, 2));
  CHECK(!s.is_open_edge(2, 3));
  CHECK(s.open_edge_count() == 2);
  CHECK(s.model().kind == ModelKind::Explicit);
}

TEST_CASE("materialization cap") {
  CHECK(error_of([] { PercolationSample::sample(CubeShape(14), PercModel::bond_model(0.5), 1, SampleMode::Materialized, 12); }) ==
        Errc::DimensionOverCap);
  const auto lazy = PercolationSample::sample(CubeShape(30), PercModel::bond_model(0.5), 1, SampleMode::Lazy);
  CHECK(lazy.shape().n() == 30);
}

TEST_CASE("binary round trip") {
  for (const PercModel& model : {PercModel::bond_model(0.3), PercModel::site_model(0.6),
                                 PercModel::mixed_model(0.5, 0.8)}) {
    for (int n : {1, 3, 7, 10}) {
      const auto s = PercolationSample::sample(CubeShape(n), model, 77);
      const auto bytes = serialize(s);
      const auto back = deserialize(bytes);
      CHECK(back == s);
      CHECK(back.model() == model);
      CHECK(back.seed() == 77);
      CHECK(serialize(back) == bytes);
    }
  }
  const auto ex = PercolationSample::from_open_edges(CubeShape(3), std::vector<EdgeId>{{0, 0}, {2, 3}});
  CHECK(deserialize(serialize(ex)) == ex);

  const auto s = PercolationSample::sample(CubeShape(5), PercModel::bond_model(0.5), 1);
  auto bytes = serialize(s);
  CHECK(bytes[0] == 'C');
  CHECK(bytes[4] == 1);  // version, little-endian
  CHECK(bytes[6] == 5);
  CHECK(bytes.size() == 8 + 8 + 8 + 80 / 8);

  CHECK(error_of([] { deserialize({}); }) == Errc::BadMagic);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK(error_of([&] { deserialize(bad_magic); }) == Errc::BadMagic);
  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK(error_of([&] { deserialize(bad_version); }) == Errc::VersionMismatch);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK(error_of([&] { deserialize(truncated); }) == Errc::LengthMismatch);
  auto trailing = bytes;
  trailing.push_back(0);
  CHECK(error_of([&] { deserialize(trailing); }) == Errc::LengthMismatch);
}
