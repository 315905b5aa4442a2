#include "cubeperc/percolation.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "cubeperc/error.hpp"
#include "cubeperc/mix.hpp"
#include "cubeperc/parallel.hpp"

namespace cubeperc {

Threshold::Threshold(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(Errc::InvalidArgument, "probability outside [0, 1]");
  if (p >= 1.0) {
    always_ = true;
  } else {
    cut_ = static_cast<std::uint64_t>(std::ldexp(p, 64));
  }
}

Threshold Threshold::from_fixed(std::uint64_t fixed) noexcept {
  Threshold t;
  if (fixed == ~std::uint64_t{0}) {
    t.always_ = true;
  } else {
    t.cut_ = fixed;
  }
  return t;
}

double Threshold::probability() const noexcept {
  return always_ ? 1.0 : std::ldexp(static_cast<double>(cut_), -64);
}

PercModel PercModel::bond_model(double p) { return {ModelKind::Bond, Threshold(p), Threshold(1.0)}; }
PercModel PercModel::site_model(double p) { return {ModelKind::Site, Threshold(1.0), Threshold(p)}; }
PercModel PercModel::mixed_model(double p_bond, double p_site) {
  return {ModelKind::Mixed, Threshold(p_bond), Threshold(p_site)};
}
PercModel PercModel::explicit_model() noexcept {
  return {ModelKind::Explicit, Threshold::from_fixed(0), Threshold::from_fixed(~std::uint64_t{0})};
}

namespace {

std::size_t words_for(std::uint64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

bool test_bit(const std::vector<std::uint64_t>& words, std::uint64_t i) noexcept {
  return (words[static_cast<std::size_t>(i >> 6)] >> (i & 63)) & 1U;
}

}  // namespace

bool PercolationSample::draw_vertex(Vertex v) const noexcept {
  return model_.site.accepts(mix64(seed_, shape_.edge_count() + v));
}

bool PercolationSample::draw_edge(Vertex v, int coord) const noexcept {
  if (!model_.bond.accepts(mix64(seed_, edge_index(shape_, v, coord)))) return false;
  if (!model_.removes_vertices()) return true;
  return draw_vertex(v) && draw_vertex(v ^ (Vertex{1} << coord));
}

bool PercolationSample::vertex_present(Vertex v) const noexcept {
  if (!model_.removes_vertices()) return true;
  if (mode_ == SampleMode::Materialized) return test_bit(vertex_bits_, v);
  return draw_vertex(v);
}

bool PercolationSample::edge_open(Vertex v, int coord) const noexcept {
  if (mode_ == SampleMode::Materialized) return test_bit(edge_bits_, edge_index(shape_, v, coord));
  return draw_edge(v, coord);
}

bool PercolationSample::is_open_edge(Vertex u, Vertex v) const {
  const EdgeId e = edge_between(shape_, u, v);
  return edge_open(e.base, e.coord);
}

int PercolationSample::open_degree(Vertex v, std::uint32_t coord_mask) const {
  if (!shape_.contains(v)) throw Error(Errc::InvalidArgument, "vertex out of range");
  int degree = 0;
  for (int i = 0; i < shape_.n(); ++i) {
    if (((coord_mask >> i) & 1U) && edge_open(v, i)) ++degree;
  }
  return degree;
}

std::uint64_t PercolationSample::open_edge_count() const {
  if (mode_ == SampleMode::Materialized) {
    std::uint64_t total = 0;
    for (std::uint64_t w : edge_bits_) total += static_cast<std::uint64_t>(std::popcount(w));
    return total;
  }
  std::uint64_t total = 0;
  for (std::uint64_t i = 0; i < shape_.edge_count(); ++i) {
    const EdgeId e = edge_from_index(shape_, i);
    total += draw_edge(e.base, e.coord) ? 1 : 0;
  }
  return total;
}

std::uint64_t PercolationSample::present_vertex_count() const {
  if (!model_.removes_vertices()) return shape_.vertex_count();
  std::uint64_t total = 0;
  for (std::uint64_t v = 0; v < shape_.vertex_count(); ++v) total += vertex_present(static_cast<Vertex>(v)) ? 1 : 0;
  return total;
}

PercolationSample PercolationSample::sample(const CubeShape& shape, const PercModel& model, std::uint64_t seed,
                                            SampleMode mode, int cap, unsigned threads) {
  if (model.kind == ModelKind::Explicit) {
    throw Error(Errc::InvalidArgument, "explicit samples are built from an edge list");
  }
  PercolationSample s(shape, model, seed, SampleMode::Lazy);
  if (mode == SampleMode::Lazy) return s;
  return s.materialized(cap, threads);
}

PercolationSample PercolationSample::materialized(int cap, unsigned threads) const {
  if (mode_ == SampleMode::Materialized) return *this;
  if (shape_.n() > cap) {
    throw Error(Errc::DimensionOverCap,
                "n=" + std::to_string(shape_.n()) + " exceeds materialization cap " + std::to_string(cap));
  }
  PercolationSample out(shape_, model_, seed_, SampleMode::Materialized);
  const std::uint64_t edges = shape_.edge_count();
  const std::uint64_t vertices = shape_.vertex_count();

  if (model_.removes_vertices()) {
    out.vertex_bits_.assign(words_for(vertices), 0);
    parallel_chunks(out.vertex_bits_.size(), threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t w = begin; w < end; ++w) {
        std::uint64_t word = 0;
        const std::uint64_t base = std::uint64_t{w} * 64;
        for (std::uint64_t b = 0; b < 64 && base + b < vertices; ++b) {
          if (draw_vertex(static_cast<Vertex>(base + b))) word |= std::uint64_t{1} << b;
        }
        out.vertex_bits_[w] = word;
      }
    });
  }

  out.edge_bits_.assign(words_for(edges), 0);
  const int n = shape_.n();
  const std::uint64_t half = std::uint64_t{1} << (n - 1);
  parallel_chunks(out.edge_bits_.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t w = begin; w < end; ++w) {
      std::uint64_t word = 0;
      const std::uint64_t base = std::uint64_t{w} * 64;
      for (std::uint64_t b = 0; b < 64 && base + b < edges; ++b) {
        const std::uint64_t index = base + b;
        if (!model_.bond.accepts(mix64(seed_, index))) continue;
        if (model_.removes_vertices()) {
          const int coord = static_cast<int>(index / half);
          const EdgeId e = edge_from_index(shape_, index);
          if (!test_bit(out.vertex_bits_, e.base) || !test_bit(out.vertex_bits_, e.base ^ (Vertex{1} << coord))) {
            continue;
          }
        }
        word |= std::uint64_t{1} << b;
      }
      out.edge_bits_[w] = word;
    }
  });
  return out;
}

PercolationSample PercolationSample::from_open_edges(const CubeShape& shape, std::span<const EdgeId> open) {
  PercolationSample s(shape, PercModel::explicit_model(), 0, SampleMode::Materialized);
  s.edge_bits_.assign(words_for(shape.edge_count()), 0);
  for (const EdgeId& e : open) {
    if (e.coord < 0 || e.coord >= shape.n() || !shape.contains(e.base) || ((e.base >> e.coord) & 1U)) {
      throw Error(Errc::InvalidArgument, "edge not in canonical form");
    }
    const std::uint64_t i = edge_index(shape, e);
    s.edge_bits_[static_cast<std::size_t>(i >> 6)] |= std::uint64_t{1} << (i & 63);
  }
  return s;
}

PercolationSample PercolationSample::from_bits(const CubeShape& shape, const PercModel& model, std::uint64_t seed,
                                               std::vector<std::uint64_t> edge_bits,
                                               std::vector<std::uint64_t> vertex_bits) {
  if (edge_bits.size() != words_for(shape.edge_count()) ||
      vertex_bits.size() != (model.removes_vertices() ? words_for(shape.vertex_count()) : 0)) {
    throw Error(Errc::LengthMismatch, "bitset sizes do not match the shape");
  }
  PercolationSample s(shape, model, seed, SampleMode::Materialized);
  s.edge_bits_ = std::move(edge_bits);
  s.vertex_bits_ = std::move(vertex_bits);
  return s;
}

bool PercolationSample::operator==(const PercolationSample& other) const {
  if (!(shape_ == other.shape_ && model_ == other.model_ && seed_ == other.seed_)) return false;
  if (mode_ == other.mode_ && mode_ == SampleMode::Lazy) return true;
  const PercolationSample& a = mode_ == SampleMode::Materialized ? *this : other;
  const PercolationSample b = (mode_ == SampleMode::Materialized ? other : *this).materialized(kMaxDimension);
  return a.edge_bits_ == b.edge_bits_ && a.vertex_bits_ == b.vertex_bits_;
}

namespace {

constexpr std::uint8_t kMagic[4] = {'C', 'P', 'R', 'C'};

void put_le(std::vector<std::uint8_t>& out, std::uint64_t value, int bytes) {
  for (int i = 0; i < bytes; ++i) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

void put_bits(std::vector<std::uint8_t>& out, const std::vector<std::uint64_t>& words, std::uint64_t bits) {
  const std::uint64_t bytes = (bits + 7) / 8;
  for (std::uint64_t i = 0; i < bytes; ++i) {
    out.push_back(static_cast<std::uint8_t>(words[static_cast<std::size_t>(i / 8)] >> (8 * (i % 8))));
  }
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::uint64_t le(int count) {
    need(static_cast<std::size_t>(count));
    std::uint64_t value = 0;
    for (int i = 0; i < count; ++i) value |= std::uint64_t{bytes_[pos_++]} << (8 * i);
    return value;
  }

  std::vector<std::uint64_t> bits(std::uint64_t count) {
    const auto bytes = static_cast<std::size_t>((count + 7) / 8);
    need(bytes);
    std::vector<std::uint64_t> words(words_for(count), 0);
    for (std::size_t i = 0; i < bytes; ++i) words[i / 8] |= std::uint64_t{bytes_[pos_++]} << (8 * (i % 8));
    if (count % 64 != 0 && !words.empty()) words.back() &= (std::uint64_t{1} << (count % 64)) - 1;
    return words;
  }

  std::size_t remaining() const noexcept { return bytes_.size() - pos_; }

 private:
  void need(std::size_t count) const {
    if (remaining() < count) throw Error(Errc::LengthMismatch, "sample stream truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> serialize(const PercolationSample& sample) {
  if (sample.mode() != SampleMode::Materialized) {
    throw Error(Errc::InvalidArgument, "only materialized samples serialize");
  }
  const CubeShape& shape = sample.shape();
  const PercModel& model = sample.model();
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le(out, kSampleFormatVersion, 2);
  put_le(out, static_cast<std::uint64_t>(shape.n()), 1);
  put_le(out, static_cast<std::uint64_t>(model.kind), 1);
  switch (model.kind) {
    case ModelKind::Bond: put_le(out, model.bond.fixed(), 8); break;
    case ModelKind::Site: put_le(out, model.site.fixed(), 8); break;
    case ModelKind::Mixed:
      put_le(out, model.bond.fixed(), 8);
      put_le(out, model.site.fixed(), 8);
      break;
    case ModelKind::Explicit: break;
  }
  put_le(out, sample.seed(), 8);
  put_bits(out, sample.edge_bits(), shape.edge_count());
  if (model.removes_vertices()) put_bits(out, sample.vertex_bits(), shape.vertex_count());
  return out;
}

PercolationSample deserialize(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4 || !std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw Error(Errc::BadMagic, "not a CPRC sample");
  }
  Reader in(bytes.subspan(4));
  const auto version = in.le(2);
  if (version != kSampleFormatVersion) {
    throw Error(Errc::VersionMismatch, "format version " + std::to_string(version));
  }
  const int n = static_cast<int>(in.le(1));
  if (n < 1 || n > kMaxDimension) throw Error(Errc::LengthMismatch, "dimension byte out of range");
  const CubeShape shape(n);
  const auto tag = in.le(1);
  PercModel model;
  switch (tag) {
    case 0: model = {ModelKind::Bond, Threshold::from_fixed(in.le(8)), Threshold(1.0)}; break;
    case 1: model = {ModelKind::Site, Threshold(1.0), Threshold::from_fixed(in.le(8))}; break;
    case 2: {
      const auto bond = Threshold::from_fixed(in.le(8));
      model = {ModelKind::Mixed, bond, Threshold::from_fixed(in.le(8))};
      break;
    }
    case 3: model = PercModel::explicit_model(); break;
    default: throw Error(Errc::InvalidArgument, "unknown model tag " + std::to_string(tag));
  }
  const std::uint64_t seed = in.le(8);
  auto edge_bits = in.bits(shape.edge_count());
  std::vector<std::uint64_t> vertex_bits;
  if (model.removes_vertices()) vertex_bits = in.bits(shape.vertex_count());
  if (in.remaining() != 0) throw Error(Errc::LengthMismatch, "trailing bytes after sample");
  return PercolationSample::from_bits(shape, model, seed, std::move(edge_bits), std::move(vertex_bits));
}

}  // namespace cubeperc
