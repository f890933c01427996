#include "mcgrids/sampler.hpp"

#include <algorithm>
#include <stdexcept>

namespace mcgrids {

std::optional<Vec3> uniform_in_tetra(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                                     RngStream& rng) {
  double s = rng.uniform(), t = rng.uniform(), u = rng.uniform();
  if (signed_volume6(a, b, c, d) == 0.0) return std::nullopt;
  if (s + t > 1.0) {
    s = 1.0 - s;
    t = 1.0 - t;
  }
  if (t + u > 1.0) {
    const double tmp = u;
    u = 1.0 - s - t;
    t = 1.0 - tmp;
  } else if (s + t + u > 1.0) {
    const double tmp = u;
    u = s + t + u - 1.0;
    s = 1.0 - t - tmp;
  }
  const double w = 1.0 - s - t - u;
  return a * w + b * s + c * t + d * u;
}

std::optional<Vec3> uniform_in_cell(const VoronoiCell& cell, RngStream& rng) {
  if (cell.tets.empty() || !(cell.volume > 0.0)) return std::nullopt;
  const double target = rng.uniform() * cell.volume;
  double acc = 0.0;
  std::size_t k = 0;
  for (; k + 1 < cell.tets.size(); ++k) {
    acc += cell.tet_volumes[k];
    if (target < acc) break;
  }
  // Skip zero-volume slivers at the selected position.
  while (k > 0 && !(cell.tet_volumes[k] > 0.0)) --k;
  const auto& q = cell.tets[k];
  return uniform_in_tetra(q[0], q[1], q[2], q[3], rng);
}

std::optional<Sample> sample_point(const DensityState& state, const Triangulation& t,
                                   RngStream& rng) {
  const std::optional<VertexId> cell_id = state.cdf_lookup(rng.uniform());
  if (!cell_id) return std::nullopt;
  const VoronoiCell cell = voronoi_cell(t, *cell_id);
  const std::optional<Vec3> p = uniform_in_cell(cell, rng);
  if (!p) return std::nullopt;
  return Sample{*p, *cell_id};
}

SampleBatch sample_batch(const DensityState& state, const Triangulation& t, RngStream& rng,
                         std::size_t n, int max_retries) {
  if (n == 0) throw std::invalid_argument("sample batch size must be at least 1");
  SampleBatch batch;
  batch.samples.reserve(n);
  const double eps2 = t.merge_epsilon() * t.merge_epsilon();
  for (std::size_t i = 0; i < n; ++i) {
    bool accepted = false;
    for (int attempt = 0; attempt <= max_retries; ++attempt) {
      const std::optional<Sample> s = sample_point(state, t, rng);
      if (!s) {
        batch.exhausted = true;
        return batch;
      }
      // The site is the nearest vertex to any point of its own cell.
      if (squared_distance(s->point, t.position(s->cell)) < eps2 ||
          !t.domain().strictly_contains(s->point)) {
        ++batch.rejected;
        continue;
      }
      batch.samples.push_back(*s);
      accepted = true;
      break;
    }
    if (!accepted) ++batch.skipped;
  }
  return batch;
}

}  // namespace mcgrids
