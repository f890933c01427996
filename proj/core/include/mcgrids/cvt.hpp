#pragma once

#include <span>

#include "mcgrids/delaunay.hpp"
#include "mcgrids/voronoi.hpp"

namespace mcgrids {

/// Voronoi cell that p would own if it were inserted. Empty (zero volume)
/// when p would be merged with an existing vertex.
VoronoiCell hypothetical_cell(const Triangulation& t, const Vec3& p);

struct RelaxResult {
  Vec3 position;
  int iterations = 0;     // centroid moves actually taken
  bool collided = false;  // stopped because the next centroid would merge
  bool merged = false;    // the starting point itself would merge
};

/// Lloyd relaxation of a point that is about to be inserted: the point moves
/// to the centroid of its hypothetical clipped cell, up to max_iters times or
/// until it moves less than eps_cvt. Existing vertices never move. A step
/// whose centroid would merge with an existing vertex, or that is not
/// strictly inside the domain, is not taken.
RelaxResult relax_point(const Triangulation& t, const Vec3& p, int max_iters, double eps_cvt);

/// Sum over verts of the integral of |x - x_v|^2 over each clipped cell.
double cvt_energy(const Triangulation& t, std::span<const VertexId> verts);

}  // namespace mcgrids
