#include "mcgrids/extract.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mcgrids {
namespace {

// Even permutations starting with each vertex: (i, p[0], p[1], p[2]).
constexpr int kLoneRest[4][3] = {{1, 2, 3}, {0, 3, 2}, {0, 1, 3}, {0, 2, 1}};

bool even_permutation(const std::array<int, 4>& p) {
  int inversions = 0;
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      if (p[i] > p[j]) ++inversions;
  return inversions % 2 == 0;
}

}  // namespace

double classify_value(double v, double alpha) {
  return v == alpha ? alpha + 1e-12 * std::max(1.0, std::abs(alpha)) : v;
}

bool surface_crossing(const std::array<double, 4>& values, double alpha) {
  double lo = classify_value(values[0], alpha), hi = lo;
  for (int i = 1; i < 4; ++i) {
    const double v = classify_value(values[i], alpha);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return lo < alpha && alpha < hi;
}

Vec3 edge_crossing(const Vec3& a, const Vec3& b, double fa, double fb, double alpha) {
  const double t = (alpha - fa) / (fb - fa);
  return lerp(a, b, t);
}

Vec3 tet_midpoint(const std::array<Vec3, 4>& positions, const std::array<double, 4>& values,
                  double alpha) {
  Vec3 sum;
  int count = 0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      const double fi = classify_value(values[i], alpha), fj = classify_value(values[j], alpha);
      if ((fi < alpha) != (fj < alpha)) {
        sum += edge_crossing(positions[i], positions[j], fi, fj, alpha);
        ++count;
      }
    }
  }
  if (count == 0) throw std::invalid_argument("tet does not cross the iso-surface");
  return sum / static_cast<double>(count);
}

int marching_tet_case(const std::array<double, 4>& values, double alpha,
                      const std::array<std::uint32_t, 4>& ids, std::array<EdgeTriangle, 2>& out) {
  std::array<bool, 4> neg{};
  int nneg = 0;
  for (int i = 0; i < 4; ++i) {
    neg[i] = classify_value(values[i], alpha) < alpha;
    nneg += neg[i];
  }
  if (nneg == 0 || nneg == 4) return 0;

  if (nneg == 1 || nneg == 3) {
    const bool lone_negative = nneg == 1;
    int lone = 0;
    while (neg[lone] != lone_negative) ++lone;
    const int* r = kLoneRest[lone];
    EdgeTriangle tri{{{lone, r[0]}, {lone, r[1]}, {lone, r[2]}}};
    // Counter-clockwise seen from the lone vertex's far side when it is
    // negative; flip when it is positive.
    if (!lone_negative) std::swap(tri[1], tri[2]);
    out[0] = tri;
    return 1;
  }

  // Two against two: (a, b) negative, (c, d) positive, (a, b, c, d) even.
  std::array<int, 4> p{};
  int k = 0;
  for (int i = 0; i < 4; ++i)
    if (neg[i]) p[k++] = i;
  for (int i = 0; i < 4; ++i)
    if (!neg[i]) p[k++] = i;
  if (!even_permutation(p)) std::swap(p[2], p[3]);
  const int a = p[0], b = p[1], c = p[2], d = p[3];
  const std::array<int, 2> ac{a, c}, ad{a, d}, bd{b, d}, bc{b, c};
  // Split along the diagonal through the crossing on the edge joining the
  // lowest-id negative vertex to the lowest-id positive vertex.
  const bool low_a = ids[a] < ids[b];
  const bool low_c = ids[c] < ids[d];
  if (low_a == low_c) {  // that edge is ac or bd
    out[0] = {ac, ad, bd};
    out[1] = {ac, bd, bc};
  } else {
    out[0] = {ad, bd, bc};
    out[1] = {ad, bc, ac};
  }
  return 2;
}

std::vector<std::array<Vec3, 3>> marching_tet(const std::array<Vec3, 4>& positions,
                                              const std::array<double, 4>& values, double alpha) {
  std::array<EdgeTriangle, 2> tris{};
  const int n = marching_tet_case(values, alpha, {0, 1, 2, 3}, tris);
  std::vector<std::array<Vec3, 3>> out;
  for (int i = 0; i < n; ++i) {
    std::array<Vec3, 3> tri;
    for (int j = 0; j < 3; ++j) {
      const auto [u, v] = tris[i][j];
      tri[j] = edge_crossing(positions[u], positions[v], classify_value(values[u], alpha),
                             classify_value(values[v], alpha), alpha);
    }
    out.push_back(tri);
  }
  return out;
}

TriangleMesh extract_mesh(const Triangulation& t, std::span<const double> values, double alpha) {
  using EdgeKey = std::pair<std::uint32_t, std::uint32_t>;
  std::vector<std::array<EdgeKey, 3>> faces;
  t.for_each_tet([&](TetId id, const Tetrahedron& tet) {
    if (t.tet_touches_corner(id)) return;
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) {
      if (tet.v[i] >= values.size() || std::isnan(values[tet.v[i]]))
        throw std::logic_error("tet vertex without a field value");
      f[i] = values[tet.v[i]];
    }
    std::array<EdgeTriangle, 2> tris{};
    const int n = marching_tet_case(f, alpha, tet.v, tris);
    for (int i = 0; i < n; ++i) {
      std::array<EdgeKey, 3> face;
      for (int j = 0; j < 3; ++j) {
        face[j] = std::minmax(tet.v[tris[i][j][0]], tet.v[tris[i][j][1]]);
      }
      faces.push_back(face);
    }
  });

  std::vector<EdgeKey> keys;
  keys.reserve(faces.size() * 3);
  for (const auto& face : faces) keys.insert(keys.end(), face.begin(), face.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  TriangleMesh mesh;
  mesh.vertices.reserve(keys.size());
  for (const auto& [u, v] : keys) {
    const double fu = classify_value(values[u], alpha), fv = classify_value(values[v], alpha);
    mesh.vertices.push_back(edge_crossing(t.position(u), t.position(v), fu, fv, alpha));
  }
  mesh.edge_keys = keys;
  mesh.triangles.reserve(faces.size());
  auto index = [&](const EdgeKey& k) {
    return static_cast<std::uint32_t>(std::lower_bound(keys.begin(), keys.end(), k) - keys.begin());
  };
  for (const auto& face : faces) mesh.triangles.push_back({index(face[0]), index(face[1]), index(face[2])});
  return mesh;
}

}  // namespace mcgrids
