#include "mcgrids/bvh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace mcgrids {
namespace {

constexpr std::uint32_t kLeafSize = 4;

ClosestPoint closest_on_segment(const Vec3& p, const Vec3& a, const Vec3& b, TriangleFeature edge,
                                TriangleFeature va, TriangleFeature vb) {
  const Vec3 ab = b - a;
  const double len2 = squared_norm(ab);
  double t = len2 > 0.0 ? dot(p - a, ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  ClosestPoint r;
  r.point = a + ab * t;
  r.squared_distance = squared_distance(p, r.point);
  r.feature = t <= 0.0 ? va : (t >= 1.0 ? vb : edge);
  return r;
}

double box_squared_distance(const Box3& b, const Vec3& p) {
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double v = p[i];
    if (v < b.lo[i]) d += (b.lo[i] - v) * (b.lo[i] - v);
    else if (v > b.hi[i]) d += (v - b.hi[i]) * (v - b.hi[i]);
  }
  return d;
}

}  // namespace

ClosestPoint closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  // Voronoi-region walk over the triangle features.
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  ClosestPoint r;
  auto finish = [&](const Vec3& q, TriangleFeature f) {
    r.point = q;
    r.squared_distance = squared_distance(p, q);
    r.feature = f;
    return r;
  };
  if (d1 <= 0.0 && d2 <= 0.0) return finish(a, TriangleFeature::vertex0);

  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return finish(b, TriangleFeature::vertex1);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    return finish(a + ab * (d1 / (d1 - d3)), TriangleFeature::edge01);
  }

  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return finish(c, TriangleFeature::vertex2);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    return finish(a + ac * (d2 / (d2 - d6)), TriangleFeature::edge20);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    return finish(b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6))), TriangleFeature::edge12);
  }

  const double sum = va + vb + vc;
  if (!(sum > 0.0)) {
    // Degenerate (zero-area) triangle: the closest point is on an edge.
    ClosestPoint best = closest_on_segment(p, a, b, TriangleFeature::edge01,
                                           TriangleFeature::vertex0, TriangleFeature::vertex1);
    for (const ClosestPoint& cand :
         {closest_on_segment(p, b, c, TriangleFeature::edge12, TriangleFeature::vertex1,
                             TriangleFeature::vertex2),
          closest_on_segment(p, c, a, TriangleFeature::edge20, TriangleFeature::vertex2,
                             TriangleFeature::vertex0)}) {
      if (cand.squared_distance < best.squared_distance) best = cand;
    }
    return best;
  }
  const double v = vb / sum, w = vc / sum;
  return finish(a + ab * v + ac * w, TriangleFeature::face);
}

double triangle_solid_angle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 x = a - p, y = b - p, z = c - p;
  const double lx = norm(x), ly = norm(y), lz = norm(z);
  const double det = dot(x, cross(y, z));
  const double den = lx * ly * lz + dot(x, y) * lz + dot(x, z) * ly + dot(y, z) * lx;
  return 2.0 * std::atan2(det, den);
}

TriangleBvh::TriangleBvh(TriangleMesh mesh) : mesh_(std::move(mesh)) {
  const auto n = static_cast<std::uint32_t>(mesh_.triangles.size());
  if (n == 0) return;
  order_.resize(n);
  std::iota(order_.begin(), order_.end(), 0u);
  std::vector<Vec3> centroids(n);
  for (std::uint32_t t = 0; t < n; ++t) {
    const Triangle& f = mesh_.triangles[t];
    centroids[t] = (mesh_.vertices[f[0]] + mesh_.vertices[f[1]] + mesh_.vertices[f[2]]) / 3.0;
  }
  nodes_.reserve(2 * n / kLeafSize + 2);
  build(0, n, centroids);
}

std::uint32_t TriangleBvh::build(std::uint32_t begin, std::uint32_t end,
                                 std::vector<Vec3>& centroids) {
  const auto index = static_cast<std::uint32_t>(nodes_.size());
  nodes_.emplace_back();
  Box3 box = Box3::empty();
  Box3 cbox = Box3::empty();
  Vec3 dipole;
  Vec3 weighted;
  double area_sum = 0.0;
  for (std::uint32_t i = begin; i < end; ++i) {
    const std::uint32_t t = order_[i];
    const Triangle& f = mesh_.triangles[t];
    for (std::uint32_t v : f) box.expand(mesh_.vertices[v]);
    cbox.expand(centroids[t]);
    const Vec3 av = cross(mesh_.vertices[f[1]] - mesh_.vertices[f[0]],
                          mesh_.vertices[f[2]] - mesh_.vertices[f[0]]) *
                    0.5;
    const double area = norm(av);
    dipole += av;
    weighted += centroids[t] * area;
    area_sum += area;
  }
  Node node;
  node.box = box;
  node.dipole = dipole;
  node.center = area_sum > 0.0 ? weighted / area_sum : box.center();
  double r2 = 0.0;
  for (std::uint32_t i = begin; i < end; ++i) {
    for (std::uint32_t v : mesh_.triangles[order_[i]])
      r2 = std::max(r2, squared_distance(node.center, mesh_.vertices[v]));
  }
  node.radius = std::sqrt(r2);

  if (end - begin <= kLeafSize) {
    node.first = begin;
    node.count = end - begin;
    nodes_[index] = node;
    return index;
  }
  const Vec3 ext = cbox.extent();
  const int axis = ext.x >= ext.y && ext.x >= ext.z ? 0 : (ext.y >= ext.z ? 1 : 2);
  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     if (centroids[a][axis] != centroids[b][axis])
                       return centroids[a][axis] < centroids[b][axis];
                     return a < b;
                   });
  node.count = 0;
  node.first = build(begin, mid, centroids);
  node.right = build(mid, end, centroids);
  nodes_[index] = node;
  return index;
}

TriangleBvh::Hit TriangleBvh::closest(const Vec3& p) const {
  Hit best;
  best.closest.squared_distance = std::numeric_limits<double>::infinity();
  if (nodes_.empty()) return best;
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    if (box_squared_distance(node.box, p) >= best.closest.squared_distance) continue;
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const std::uint32_t t = order_[i];
        const Triangle& f = mesh_.triangles[t];
        const ClosestPoint c = closest_point_on_triangle(p, mesh_.vertices[f[0]],
                                                         mesh_.vertices[f[1]], mesh_.vertices[f[2]]);
        if (c.squared_distance < best.closest.squared_distance ||
            (c.squared_distance == best.closest.squared_distance && t < best.triangle)) {
          best.closest = c;
          best.triangle = t;
        }
      }
      continue;
    }
    const double dl = box_squared_distance(nodes_[node.first].box, p);
    const double dr = box_squared_distance(nodes_[node.right].box, p);
    // Push the farther child first so the nearer one is visited next.
    if (dl <= dr) {
      stack[top++] = node.right;
      stack[top++] = node.first;
    } else {
      stack[top++] = node.first;
      stack[top++] = node.right;
    }
  }
  return best;
}

double TriangleBvh::winding_number(const Vec3& p, double beta) const {
  if (nodes_.empty()) return 0.0;
  double omega = 0.0;
  std::uint32_t stack[128];
  int top = 0;
  stack[top++] = 0;
  while (top > 0) {
    const Node& node = nodes_[stack[--top]];
    const Vec3 d = node.center - p;
    const double dist = norm(d);
    if (dist > beta * node.radius && node.radius > 0.0) {
      omega += dot(node.dipole, d) / (dist * dist * dist);
      continue;
    }
    if (node.count > 0) {
      for (std::uint32_t i = node.first; i < node.first + node.count; ++i) {
        const Triangle& f = mesh_.triangles[order_[i]];
        omega += triangle_solid_angle(p, mesh_.vertices[f[0]], mesh_.vertices[f[1]],
                                      mesh_.vertices[f[2]]);
      }
      continue;
    }
    stack[top++] = node.first;
    stack[top++] = node.right;
  }
  return omega / (4.0 * std::numbers::pi);
}

}  // namespace mcgrids
