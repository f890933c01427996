#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "mcgrids/delaunay.hpp"
#include "mcgrids/triangle_mesh.hpp"

namespace mcgrids {

/// Values exactly equal to alpha are shifted up by 1e-12 * max(1, |alpha|)
/// so that every vertex has a strict side.
double classify_value(double v, double alpha);

/// min < alpha < max over the classified values.
bool surface_crossing(const std::array<double, 4>& values, double alpha);

/// Point on segment (a, b) where the linear interpolant of (fa, fb) equals alpha.
Vec3 edge_crossing(const Vec3& a, const Vec3& b, double fa, double fb, double alpha);

/// Mean of the edge crossing points of a crossing tet.
Vec3 tet_midpoint(const std::array<Vec3, 4>& positions, const std::array<double, 4>& values,
                  double alpha);

/// A marching-tet triangle as three tet edges, each a pair of local vertex
/// indices (0..3).
using EdgeTriangle = std::array<std::array<int, 2>, 3>;

/// Triangles for one positively oriented tet, oriented from the negative
/// side toward the positive side. `ids` (global vertex ids) only select the
/// diagonal of the two-against-two quad. Returns the triangle count (0..2).
int marching_tet_case(const std::array<double, 4>& values, double alpha,
                      const std::array<std::uint32_t, 4>& ids, std::array<EdgeTriangle, 2>& out);

/// Convenience form returning triangle corner positions.
std::vector<std::array<Vec3, 3>> marching_tet(const std::array<Vec3, 4>& positions,
                                              const std::array<double, 4>& values, double alpha);

/// Marching tetrahedra over every tet not incident to a domain corner.
/// values[v] is the field value of vertex v. Mesh vertices are shared per
/// grid edge and emitted in edge-key order. Throws std::logic_error when a
/// processed tet has a NaN value.
TriangleMesh extract_mesh(const Triangulation& t, std::span<const double> values, double alpha);

}  // namespace mcgrids
