#include "mcgrids/cvt.hpp"

#include <stdexcept>

namespace mcgrids {
namespace {

VoronoiCell cell_from_neighbors(const Triangulation& t, const Vec3& p,
                                const std::vector<VertexId>& nn) {
  std::vector<Vec3> pts;
  pts.reserve(nn.size());
  for (VertexId w : nn) pts.push_back(t.position(w));
  return voronoi_cell(t.domain(), p, pts);
}

}  // namespace

VoronoiCell hypothetical_cell(const Triangulation& t, const Vec3& p) {
  const std::vector<VertexId> nn = t.natural_neighbors(p);
  if (nn.empty()) return {};
  return cell_from_neighbors(t, p, nn);
}

RelaxResult relax_point(const Triangulation& t, const Vec3& p, int max_iters, double eps_cvt) {
  if (max_iters < 0) throw std::invalid_argument("CVT iteration count must be non-negative");
  RelaxResult r;
  r.position = p;
  if (max_iters == 0) return r;
  std::vector<VertexId> nn = t.natural_neighbors(p);
  if (nn.empty()) {
    r.merged = true;
    return r;
  }
  const Box3& box = t.domain();
  for (int k = 0; k < max_iters; ++k) {
    const VoronoiCell cell = cell_from_neighbors(t, r.position, nn);
    const Vec3 c = cell.centroid;
    if (!(cell.volume > 0.0) || !box.strictly_contains(c)) break;
    std::vector<VertexId> next = t.natural_neighbors(c);
    if (next.empty()) {
      r.collided = true;
      break;
    }
    const double moved = distance(c, r.position);
    r.position = c;
    nn = std::move(next);
    ++r.iterations;
    if (moved < eps_cvt) break;
  }
  return r;
}

double cvt_energy(const Triangulation& t, std::span<const VertexId> verts) {
  if (verts.empty()) throw std::invalid_argument("CVT energy needs at least one vertex");
  double e = 0.0;
  for (VertexId v : verts) e += second_moment(voronoi_cell(t, v), t.position(v));
  return e;
}

}  // namespace mcgrids
