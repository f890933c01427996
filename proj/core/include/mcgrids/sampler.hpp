#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "mcgrids/delaunay.hpp"
#include "mcgrids/pdf.hpp"
#include "mcgrids/voronoi.hpp"

namespace mcgrids {

/// Counter-based generator: draw i is splitmix64 applied to the seed offset
/// by i. Streams derived with split() are independent of call order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed = 0) : seed_(seed) {}

  std::uint64_t next_u64() { return mix(seed_ + kGolden * ++counter_); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }
  RngStream split(std::uint64_t stream) const { return RngStream(mix(seed_ ^ mix(stream + kGolden))); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// Uniform point in a tetrahedron by folding the unit cube (three uniforms).
/// nullopt for a degenerate tetrahedron.
std::optional<Vec3> uniform_in_tetra(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                     RngStream& rng);

/// Uniform point inside a Voronoi cell: tet chosen by volume, then uniform
/// inside it.
std::optional<Vec3> uniform_in_cell(const VoronoiCell& cell, RngStream& rng);

struct Sample {
  Vec3 point;
  VertexId cell = 0;
};

/// One draw: cell by inverse CDF, then a uniform point in it. nullopt when no
/// cell is active.
std::optional<Sample> sample_point(const DensityState& state, const Triangulation& t,
                                   RngStream& rng);

struct SampleBatch {
  std::vector<Sample> samples;
  std::size_t rejected = 0;  // redraws caused by proximity to an existing vertex
  std::size_t skipped = 0;   // draws abandoned after the retry limit
  bool exhausted = false;
};

/// n draws. Points within the merge distance of their cell's site are redrawn
/// up to `max_retries` times and then skipped. Throws std::invalid_argument
/// for n == 0.
SampleBatch sample_batch(const DensityState& state, const Triangulation& t, RngStream& rng,
                         std::size_t n, int max_retries = 8);

}  // namespace mcgrids
