#pragma once

#include <cstdint>
#include <vector>

#include "mcgrids/triangle_mesh.hpp"
#include "mcgrids/vec3.hpp"

namespace mcgrids {

/// Which part of a triangle a closest point lies on.
enum class TriangleFeature : std::uint8_t { vertex0, vertex1, vertex2, edge01, edge12, edge20, face };

struct ClosestPoint {
  Vec3 point;
  double squared_distance = 0.0;
  TriangleFeature feature = TriangleFeature::face;
};

ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Signed solid angle subtended by triangle (a, b, c) seen from p; positive
/// when p is on the back side of the counter-clockwise face.
double triangle_solid_angle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Bounding volume hierarchy over the triangles of a mesh, for closest-point
/// and generalized winding number queries. Holds its own copy of the mesh.
class TriangleBvh {
 public:
  struct Hit {
    std::uint32_t triangle = 0;
    ClosestPoint closest;
  };

  TriangleBvh() = default;
  explicit TriangleBvh(TriangleMesh mesh);

  const TriangleMesh& mesh() const { return mesh_; }
  bool empty() const { return nodes_.empty(); }

  /// Nearest surface point; the mesh must be non-empty.
  Hit closest(const Vec3& p) const;
  /// Generalized winding number. Nodes farther than `beta` times their radius
  /// are approximated by their area-weighted dipole.
  double winding_number(const Vec3& p, double beta = 2.0) const;

 private:
  struct Node {
    Box3 box;
    std::uint32_t first = 0;  // first primitive (leaf) or left child index (inner)
    std::uint32_t count = 0;  // primitive count; 0 marks an inner node
    std::uint32_t right = 0;
    Vec3 dipole;              // sum of area vectors
    Vec3 center;              // area-weighted centroid
    double radius = 0.0;
  };

  std::uint32_t build(std::uint32_t begin, std::uint32_t end, std::vector<Vec3>& centroids);

  TriangleMesh mesh_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace mcgrids
