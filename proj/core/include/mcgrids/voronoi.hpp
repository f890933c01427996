#pragma once

#include <array>
#include <span>
#include <vector>

#include "mcgrids/delaunay.hpp"
#include "mcgrids/vec3.hpp"

namespace mcgrids {

/// Bounded convex polyhedron as a vertex list plus faces given as outward
/// counter-clockwise index cycles, stored flat.
class ConvexPolyhedron {
 public:
  static ConvexPolyhedron from_box(const Box3& box);

  bool empty() const { return face_count() < 4; }
  std::size_t face_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::span<const int> face(std::size_t f) const {
    return std::span<const int>(indices_).subspan(offsets_[f], offsets_[f + 1] - offsets_[f]);
  }
  const std::vector<Vec3>& vertices() const { return vertices_; }

  /// Keeps the half-space dot(normal, x) <= offset. Vertices within `eps` of
  /// the plane count as lying on it.
  void clip(const Vec3& normal, double offset, double eps);

  /// Fan decomposition from the vertex average; every tet is positively
  /// oriented for a non-degenerate polyhedron.
  std::vector<std::array<Vec3, 4>> tetrahedra() const;

 private:
  void clear();

  std::vector<Vec3> vertices_;
  std::vector<int> indices_;
  std::vector<int> offsets_;  // face f is indices_[offsets_[f] .. offsets_[f + 1])

  // Scratch reused across clips.
  std::vector<double> dist_;
  std::vector<signed char> side_;
  std::vector<std::array<int, 3>> cuts_;  // (lower, higher, new vertex)
  std::vector<int> new_indices_;
  std::vector<int> new_offsets_;
  std::vector<int> cap_;
  std::vector<std::pair<double, int>> order_;
  std::vector<int> remap_;
  std::vector<Vec3> compact_;
};

struct VoronoiCell {
  VertexId site = 0;
  double volume = 0.0;
  Vec3 centroid;
  std::vector<std::array<Vec3, 4>> tets;
  std::vector<double> tet_volumes;
};

/// Cell of `site` among `neighbors`, clipped to `domain`. Neighbours that are
/// not Delaunay neighbours of the site are harmless but cost time.
VoronoiCell voronoi_cell(const Box3& domain, const Vec3& site, std::span<const Vec3> neighbors);

/// Clipped Voronoi cell of vertex v, computed from its Delaunay one-ring.
VoronoiCell voronoi_cell(const Triangulation& t, VertexId v);

/// Integral of |x - about|^2 over the cell.
double second_moment(const VoronoiCell& cell, const Vec3& about);

/// Integral of |x - s|^2 over tetrahedron (a, b, c, d), exact for the
/// quadratic integrand.
double tet_second_moment(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& s);

}  // namespace mcgrids
