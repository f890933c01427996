#pragma once

#include <array>
#include <cstdint>
#include <utility>
#include <vector>

#include "mcgrids/vec3.hpp"

namespace mcgrids {

using Triangle = std::array<std::uint32_t, 3>;

/// Indexed triangle mesh. `edge_keys`, when filled by extraction, holds the
/// undirected grid edge (lower id, higher id) each vertex was interpolated on.
struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edge_keys;

  bool empty() const { return triangles.empty(); }
  Box3 bounds() const;
  double area() const;
  Vec3 face_normal(std::size_t t) const;  // unit, zero for degenerate faces
  double face_area(std::size_t t) const;
  /// Area-weighted vertex normals.
  std::vector<Vec3> vertex_normals() const;
  void apply(const Vec3& translate, double scale);  // x -> (x + translate) * scale
};

/// Edge-level topology summary.
struct MeshTopology {
  std::size_t vertices = 0;  // referenced vertices only
  std::size_t edges = 0;
  std::size_t faces = 0;
  std::size_t boundary_edges = 0;     // edges with exactly one incident face
  std::size_t nonmanifold_edges = 0;  // edges with more than two incident faces
  std::size_t components = 0;         // face-connected components
  long euler_characteristic() const {
    return static_cast<long>(vertices) - static_cast<long>(edges) + static_cast<long>(faces);
  }
};

MeshTopology analyze_topology(const TriangleMesh& mesh);

/// Undirected edges as (lower, higher) vertex index pairs, sorted, unique.
std::vector<std::pair<std::uint32_t, std::uint32_t>> unique_edges(const TriangleMesh& mesh);

}  // namespace mcgrids
