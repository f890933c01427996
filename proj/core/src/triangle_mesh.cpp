#include "mcgrids/triangle_mesh.hpp"

#include <algorithm>
#include <numeric>

namespace mcgrids {

Box3 TriangleMesh::bounds() const {
  Box3 b = Box3::empty();
  for (const Vec3& v : vertices) b.expand(v);
  return b;
}

Vec3 TriangleMesh::face_normal(std::size_t t) const {
  const Triangle& f = triangles[t];
  return normalized(cross(vertices[f[1]] - vertices[f[0]], vertices[f[2]] - vertices[f[0]]));
}

double TriangleMesh::face_area(std::size_t t) const {
  const Triangle& f = triangles[t];
  return 0.5 * norm(cross(vertices[f[1]] - vertices[f[0]], vertices[f[2]] - vertices[f[0]]));
}

double TriangleMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += face_area(t);
  return a;
}

std::vector<Vec3> TriangleMesh::vertex_normals() const {
  std::vector<Vec3> n(vertices.size());
  for (const Triangle& f : triangles) {
    // Unnormalized cross product is already area weighted.
    const Vec3 fn = cross(vertices[f[1]] - vertices[f[0]], vertices[f[2]] - vertices[f[0]]);
    for (std::uint32_t v : f) n[v] += fn;
  }
  for (Vec3& v : n) v = normalized(v);
  return n;
}

void TriangleMesh::apply(const Vec3& translate, double scale) {
  for (Vec3& v : vertices) v = (v + translate) * scale;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> unique_edges(const TriangleMesh& mesh) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  for (const Triangle& f : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f[k], b = f[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

namespace {

struct DisjointSets {
  std::vector<std::uint32_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

}  // namespace

MeshTopology analyze_topology(const TriangleMesh& mesh) {
  MeshTopology topo;
  topo.faces = mesh.triangles.size();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(mesh.triangles.size() * 3);
  std::vector<char> used(mesh.vertices.size(), 0);
  for (const Triangle& f : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f[k], b = f[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
      used[a] = 1;
    }
  }
  topo.vertices = static_cast<std::size_t>(std::count(used.begin(), used.end(), 1));
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i;
    while (j < edges.size() && edges[j] == edges[i]) ++j;
    ++topo.edges;
    const std::size_t count = j - i;
    if (count == 1) ++topo.boundary_edges;
    if (count > 2) ++topo.nonmanifold_edges;
    i = j;
  }

  // Components over faces sharing a vertex.
  DisjointSets sets(mesh.vertices.size());
  for (const Triangle& f : mesh.triangles) {
    sets.unite(f[0], f[1]);
    sets.unite(f[1], f[2]);
  }
  std::vector<std::uint32_t> roots;
  for (const Triangle& f : mesh.triangles) roots.push_back(sets.find(f[0]));
  std::sort(roots.begin(), roots.end());
  topo.components = static_cast<std::size_t>(std::unique(roots.begin(), roots.end()) - roots.begin());
  return topo;
}

}  // namespace mcgrids
