#include "mcgrids/grid.hpp"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include "mcgrids/cvt.hpp"
#include "mcgrids/voronoi.hpp"

namespace mcgrids {

McGrid::McGrid(const Box3& domain, double alpha, double gamma, double merge_epsilon)
    : tri_(domain, merge_epsilon), density_(alpha, gamma) {}

void McGrid::initialize(const ImplicitField& field) {
  std::vector<Vec3> corners(tri_.positions().begin(), tri_.positions().begin() + 8);
  const std::vector<double> values = field.evaluate_batch(corners);
  for (VertexId v = 0; v < 8; ++v) {
    density_.set_value(v, values[v]);
    density_.set_volume(v, voronoi_cell(tri_, v).volume);
  }
}

McGrid::Insertion McGrid::insert(const Vec3& p, int cvt_iters, double eps_cvt) {
  Insertion out;
  const RelaxResult r = relax_point(tri_, p, cvt_iters, eps_cvt);
  out.position = r.position;
  out.moved = !(r.position == p);
  out.cvt_iterations = r.iterations;
  out.vertex = tri_.insert(r.position);
  return out;
}

void McGrid::commit(std::span<const VertexId> verts, std::span<const double> values) {
  if (verts.size() != values.size()) throw std::invalid_argument("one value per vertex required");
  std::vector<VertexId> touched;
  for (std::size_t i = 0; i < verts.size(); ++i) {
    density_.set_value(verts[i], values[i]);
    const std::vector<VertexId> a = tri_.affected_vertices(verts[i]);
    touched.insert(touched.end(), a.begin(), a.end());
  }
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  for (VertexId w : touched) density_.set_volume(w, voronoi_cell(tri_, w).volume);
}

void write_grid(std::ostream& out, const McGrid& grid) {
  const Triangulation& t = grid.triangulation();
  const DensityState& d = grid.density();
  const auto old = out.precision(17);
  for (VertexId v = 0; v < t.vertex_count(); ++v) {
    const Vec3& p = t.position(v);
    out << "v " << p.x << ' ' << p.y << ' ' << p.z << ' ';
    if (d.has_value(v)) out << d.value(v);
    else out << "nan";
    out << '\n';
  }
  t.for_each_tet([&](TetId, const Tetrahedron& tt) {
    out << "t " << tt.v[0] + 1 << ' ' << tt.v[1] + 1 << ' ' << tt.v[2] + 1 << ' ' << tt.v[3] + 1
        << '\n';
  });
  out.precision(old);
}

}  // namespace mcgrids
