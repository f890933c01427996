#pragma once

#include "mcgrids/field.hpp"
#include "mcgrids/triangle_mesh.hpp"

namespace mcgrids {

/// Marching cubes on a uniform lattice with `samples` points per axis
/// (samples^3 queries) spanning `box`. Triangles face from the negative side
/// toward the positive side. Evaluates one z-slice at a time.
TriangleMesh marching_cubes(const ImplicitField& field, const Box3& box, int samples,
                            double alpha = 0.0);

/// Marching tetrahedra on a uniform lattice of `cells` cubes per axis, each
/// split into six tets around its main diagonal ((cells + 1)^3 queries).
TriangleMesh marching_tets_uniform(const ImplicitField& field, const Box3& box, int cells,
                                   double alpha = 0.0);

}  // namespace mcgrids
