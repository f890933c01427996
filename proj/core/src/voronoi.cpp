#include "mcgrids/voronoi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace mcgrids {

ConvexPolyhedron ConvexPolyhedron::from_box(const Box3& box) {
  ConvexPolyhedron poly;
  for (int i = 0; i < 8; ++i) poly.vertices_.push_back(box.corner(i));
  poly.indices_ = {0, 4, 6, 2, 1, 3, 7, 5, 0, 1, 5, 4, 2, 6, 7, 3, 0, 2, 3, 1, 4, 5, 7, 6};
  poly.offsets_ = {0, 4, 8, 12, 16, 20, 24};
  return poly;
}

void ConvexPolyhedron::clear() {
  vertices_.clear();
  indices_.clear();
  offsets_.clear();
}

void ConvexPolyhedron::clip(const Vec3& normal, double offset, double eps) {
  const std::size_t nv = vertices_.size();
  dist_.resize(nv);
  side_.resize(nv);
  bool any_out = false, any_in = false;
  for (std::size_t i = 0; i < nv; ++i) {
    dist_[i] = dot(normal, vertices_[i]) - offset;
    side_[i] = dist_[i] > eps ? 1 : (dist_[i] < -eps ? -1 : 0);
    any_out |= side_[i] > 0;
    any_in |= side_[i] < 0;
  }
  if (!any_out) return;
  if (!any_in) {
    clear();
    return;
  }

  cuts_.clear();
  auto cut_vertex = [&](int a, int b) {
    const int lo = std::min(a, b), hi = std::max(a, b);
    for (const auto& c : cuts_)
      if (c[0] == lo && c[1] == hi) return c[2];
    const double t = dist_[lo] / (dist_[lo] - dist_[hi]);
    vertices_.push_back(lerp(vertices_[lo], vertices_[hi], t));
    const int id = static_cast<int>(vertices_.size()) - 1;
    cuts_.push_back({lo, hi, id});
    return id;
  };

  new_indices_.clear();
  new_offsets_.assign(1, 0);
  for (std::size_t f = 0; f + 1 < offsets_.size(); ++f) {
    const int begin = offsets_[f], k = offsets_[f + 1] - begin;
    const std::size_t mark = new_indices_.size();
    for (int i = 0; i < k; ++i) {
      const int a = indices_[begin + i], b = indices_[begin + (i + 1) % k];
      if (side_[a] <= 0) new_indices_.push_back(a);
      if (side_[a] * side_[b] < 0) new_indices_.push_back(cut_vertex(a, b));
    }
    if (new_indices_.size() - mark >= 3) new_offsets_.push_back(static_cast<int>(new_indices_.size()));
    else new_indices_.resize(mark);
  }

  // The cap: on-plane originals plus the new cut vertices, ordered
  // counter-clockwise around the outward normal.
  cap_.clear();
  for (std::size_t i = 0; i < nv; ++i)
    if (side_[i] == 0) cap_.push_back(static_cast<int>(i));
  for (const auto& c : cuts_) cap_.push_back(c[2]);
  if (cap_.size() >= 3) {
    Vec3 c;
    for (int i : cap_) c += vertices_[i];
    c = c / static_cast<double>(cap_.size());
    const Vec3 ref = std::abs(normal.x) < 0.9 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    const Vec3 u = normalized(cross(normal, ref));
    const Vec3 w = cross(normal, u);
    order_.clear();
    for (int i : cap_) {
      const Vec3 d = vertices_[i] - c;
      order_.emplace_back(std::atan2(dot(d, w), dot(d, u)), i);
    }
    std::sort(order_.begin(), order_.end());
    for (const auto& o : order_) new_indices_.push_back(o.second);
    new_offsets_.push_back(static_cast<int>(new_indices_.size()));
  }

  // Compact: drop vertices no face references.
  remap_.assign(vertices_.size(), -1);
  compact_.clear();
  for (int& i : new_indices_) {
    if (remap_[i] < 0) {
      remap_[i] = static_cast<int>(compact_.size());
      compact_.push_back(vertices_[i]);
    }
    i = remap_[i];
  }
  vertices_.swap(compact_);
  indices_.swap(new_indices_);
  offsets_.swap(new_offsets_);
  if (face_count() < 4) clear();
}

std::vector<std::array<Vec3, 4>> ConvexPolyhedron::tetrahedra() const {
  std::vector<std::array<Vec3, 4>> tets;
  if (empty()) return tets;
  Vec3 c;
  for (const Vec3& v : vertices_) c += v;
  c = c / static_cast<double>(vertices_.size());
  for (std::size_t f = 0; f < face_count(); ++f) {
    const std::span<const int> face = this->face(f);
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      tets.push_back({c, vertices_[face[0]], vertices_[face[i]], vertices_[face[i + 1]]});
    }
  }
  return tets;
}

VoronoiCell voronoi_cell(const Box3& domain, const Vec3& site, std::span<const Vec3> neighbors) {
  // Nearest neighbours first: their bisectors cut the most, which keeps the
  // intermediate polyhedra small.
  std::vector<std::size_t> order(neighbors.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return squared_distance(site, neighbors[a]) < squared_distance(site, neighbors[b]);
  });

  ConvexPolyhedron poly = ConvexPolyhedron::from_box(domain);
  const double eps = 1e-13 * domain.diagonal();
  for (std::size_t i : order) {
    const Vec3 n = normalized(neighbors[i] - site);
    if (squared_norm(n) == 0.0) continue;
    poly.clip(n, dot(n, (site + neighbors[i]) * 0.5), eps);
    if (poly.empty()) break;
  }

  VoronoiCell cell;
  cell.tets = poly.tetrahedra();
  cell.tet_volumes.reserve(cell.tets.size());
  Vec3 weighted;
  for (const auto& t : cell.tets) {
    const double v = signed_volume6(t[0], t[1], t[2], t[3]) / 6.0;
    cell.tet_volumes.push_back(v);
    cell.volume += v;
    weighted += (t[0] + t[1] + t[2] + t[3]) * (v / 4.0);
  }
  cell.centroid = cell.volume > 0.0 ? weighted / cell.volume : site;
  return cell;
}

VoronoiCell voronoi_cell(const Triangulation& t, VertexId v) {
  const std::vector<VertexId> ring = t.one_ring(v);
  std::vector<Vec3> pts;
  pts.reserve(ring.size());
  for (VertexId w : ring) pts.push_back(t.position(w));
  VoronoiCell cell = voronoi_cell(t.domain(), t.position(v), pts);
  cell.site = v;
  return cell;
}

double tet_second_moment(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& s) {
  const double vol = std::abs(signed_volume6(a, b, c, d)) / 6.0;
  const Vec3 ya = a - s, yb = b - s, yc = c - s, yd = d - s;
  const double sum_sq = squared_norm(ya) + squared_norm(yb) + squared_norm(yc) + squared_norm(yd);
  return vol / 20.0 * (sum_sq + squared_norm(ya + yb + yc + yd));
}

double second_moment(const VoronoiCell& cell, const Vec3& about) {
  double e = 0.0;
  for (const auto& t : cell.tets) e += tet_second_moment(t[0], t[1], t[2], t[3], about);
  return e;
}

}  // namespace mcgrids
