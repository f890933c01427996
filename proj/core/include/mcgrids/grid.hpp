#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mcgrids/delaunay.hpp"
#include "mcgrids/field.hpp"
#include "mcgrids/pdf.hpp"

namespace mcgrids {

/// A triangulation together with its density state: the adaptive grid that
/// sampling and refinement grow.
class McGrid {
 public:
  McGrid(const Box3& domain, double alpha, double gamma, double merge_epsilon = -1.0);

  Triangulation& triangulation() { return tri_; }
  const Triangulation& triangulation() const { return tri_; }
  DensityState& density() { return density_; }
  const DensityState& density() const { return density_; }

  /// Evaluates the eight corners (one batch) and sets up their cells.
  void initialize(const ImplicitField& field);

  struct Insertion {
    std::optional<VertexId> vertex;  // nullopt when merged
    Vec3 position;                   // final, post-relaxation position
    bool moved = false;              // relaxation changed the position
    int cvt_iterations = 0;
  };

  /// Relaxes p (cvt_iters Lloyd steps) and inserts it without a field value.
  Insertion insert(const Vec3& p, int cvt_iters, double eps_cvt);

  /// Stores field values for freshly inserted vertices and recomputes the
  /// volumes of every cell their insertion changed.
  void commit(std::span<const VertexId> verts, std::span<const double> values);

 private:
  Triangulation tri_;
  DensityState density_;
};

/// "v x y z f" per vertex then "t a b c d" per tet, 1-based; f is "nan" for
/// vertices without a value.
void write_grid(std::ostream& out, const McGrid& grid);

}  // namespace mcgrids
