#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mcgrids/vec3.hpp"

namespace mcgrids {

using VertexId = std::uint32_t;
using TetId = std::uint32_t;
inline constexpr TetId kNoTet = 0xffffffffu;

/// Neighbor i lies across the face opposite vertex i. Vertices are stored in
/// positive orientation (signed volume > 0).
struct Tetrahedron {
  std::array<VertexId, 4> v{};
  std::array<TetId, 4> n{kNoTet, kNoTet, kNoTet, kNoTet};
};

struct Location {
  TetId tet = kNoTet;
  /// Set when the query point coincides with a vertex of `tet`.
  std::optional<VertexId> on_vertex;
};

/// Incremental Delaunay tetrahedralization of points inside an axis-aligned
/// domain box. The eight box corners are permanent vertices 0..7, so the
/// triangulation always tiles the box and there is no point at infinity.
///
/// Insertion is Bowyer-Watson with exact predicates; exact cospherical ties are
/// resolved by symbolic perturbation keyed on vertex id. Vertices are never
/// removed and ids are never reused; tet slots are recycled through a free list.
class Triangulation {
 public:
  /// Throws std::invalid_argument for a box without positive volume.
  /// merge_epsilon < 0 selects the default of 1e-7 times the box diagonal.
  explicit Triangulation(const Box3& domain, double merge_epsilon = -1.0);

  const Box3& domain() const { return domain_; }
  double merge_epsilon() const { return merge_epsilon_; }

  std::size_t vertex_count() const { return positions_.size(); }
  const Vec3& position(VertexId v) const { return positions_[v]; }
  std::span<const Vec3> positions() const { return positions_; }
  static constexpr bool is_corner(VertexId v) { return v < 8; }

  /// Number of tet slots, dead or alive. Valid tet ids are below this.
  std::size_t tet_capacity() const { return tets_.size(); }
  std::size_t tet_count() const { return tets_.size() - free_.size(); }
  bool is_alive(TetId t) const { return t < alive_.size() && alive_[t]; }
  const Tetrahedron& tet(TetId t) const { return tets_[t]; }
  /// Changes whenever slot t is (re)assigned to a new tetrahedron.
  std::uint64_t tet_stamp(TetId t) const { return stamps_[t]; }
  double tet_volume(TetId t) const;
  std::array<Vec3, 4> tet_positions(TetId t) const;
  bool tet_touches_corner(TetId t) const;

  template <class F>
  void for_each_tet(F&& f) const {
    for (TetId t = 0; t < tets_.size(); ++t)
      if (alive_[t]) f(t, tets_[t]);
  }

  /// Tet containing p (closed). Throws std::out_of_range when p is outside
  /// the domain box.
  Location locate(const Vec3& p) const;
  Location locate(const Vec3& p, TetId hint) const;

  /// Inserts p, which must lie strictly inside the domain. Returns nullopt
  /// ("merged") without modifying anything when p is within merge_epsilon of an
  /// existing vertex. Throws std::out_of_range when p is not strictly inside.
  std::optional<VertexId> insert(const Vec3& p);

  /// Vertices that would become Delaunay neighbours of p if it were inserted
  /// (the vertices of its conflict cavity), sorted by id. Empty when p would be
  /// merged. Does not modify the triangulation.
  std::vector<VertexId> natural_neighbors(const Vec3& p) const;

  /// Tets whose circumsphere contains p strictly (the insertion cavity).
  std::vector<TetId> conflict_region(const Vec3& p) const;

  /// Tets incident to v (star), in traversal order.
  std::vector<TetId> incident_tets(VertexId v) const;
  /// Delaunay one-ring of v, sorted by id.
  std::vector<VertexId> one_ring(VertexId v) const;
  /// v together with its one-ring, sorted by id: the vertices whose Voronoi
  /// cells changed when v was inserted.
  std::vector<VertexId> affected_vertices(VertexId v) const;

  /// Tets created by the most recent successful insert().
  std::span<const TetId> last_created() const { return last_created_; }

  // Validation helpers (exhaustive; intended for tests).
  bool adjacency_consistent() const;
  bool all_positively_oriented() const;
  /// Number of (tet, vertex) pairs with the vertex strictly inside the tet's
  /// circumsphere, using exact predicates. O(vertices * tets).
  std::size_t count_delaunay_violations() const;
  double total_volume() const;

  /// OBJ-like dump: "v x y z" lines then "t a b c d" (1-based) lines.
  void write_debug(std::ostream& out) const;

 private:
  struct BoundaryFace {
    TetId inner;      // cavity tet
    int face;         // index of the face in `inner`
    TetId outer;      // neighbour across, or kNoTet
    int outer_face;   // index of the face in `outer`
  };

  TetId locate_impl(const Vec3& p, TetId start) const;
  /// Returns false if p should be merged; fills cavity and boundary.
  bool compute_cavity(const Vec3& p, TetId start, std::vector<TetId>& cavity,
                      std::vector<BoundaryFace>& boundary) const;
  bool in_conflict(TetId t, const Vec3& p) const;
  TetId allocate_tet();
  void build_initial();

  Box3 domain_;
  double merge_epsilon_;
  std::vector<Vec3> positions_;
  std::vector<TetId> vertex_tet_;
  std::vector<Tetrahedron> tets_;
  std::vector<char> alive_;
  std::vector<std::uint64_t> stamps_;
  std::vector<TetId> free_;
  std::vector<TetId> last_created_;
  std::uint64_t next_stamp_ = 1;
  TetId hint_ = 0;
};

}  // namespace mcgrids
