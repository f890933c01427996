// Writes the bundled test model: a subdivided icosphere displaced by a few
// octaves of deterministic sinusoidal noise, giving an organic scan-like
// surface with about 20k triangles.

#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include "mcgrids/mesh_io.hpp"
#include "mcgrids/sampler.hpp"
#include "mcgrids/triangle_mesh.hpp"

using namespace mcgrids;

namespace {

TriangleMesh icosphere(int levels) {
  const double g = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh m;
  m.vertices = {{-1, g, 0}, {1, g, 0}, {-1, -g, 0}, {1, -g, 0}, {0, -1, g}, {0, 1, g},
                {0, -1, -g}, {0, 1, -g}, {g, 0, -1}, {g, 0, 1}, {-g, 0, -1}, {-g, 0, 1}};
  for (Vec3& v : m.vertices) v = normalized(v);
  m.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
                 {1, 5, 9},  {5, 11, 4}, {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
                 {3, 9, 4},  {3, 4, 2},  {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
                 {4, 9, 5},  {2, 4, 11}, {6, 2, 10},  {8, 6, 7},  {9, 8, 1}};
  for (int l = 0; l < levels; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> mid;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      const auto key = std::minmax(a, b);
      auto it = mid.find(key);
      if (it != mid.end()) return it->second;
      m.vertices.push_back(normalized(m.vertices[a] + m.vertices[b]));
      const auto id = static_cast<std::uint32_t>(m.vertices.size() - 1);
      mid.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(m.triangles.size() * 4);
    for (const Triangle& t : m.triangles) {
      const std::uint32_t ab = midpoint(t[0], t[1]), bc = midpoint(t[1], t[2]),
                          ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.triangles = std::move(next);
  }
  return m;
}

struct Wave {
  Vec3 dir;
  double freq, phase, amp;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s OUT.obj\n", argv[0]);
    return 2;
  }
  TriangleMesh m = icosphere(5);

  RngStream rng(20240917);
  std::vector<Wave> waves;
  const double octaves[][2] = {{2.0, 0.10}, {4.0, 0.05}, {7.0, 0.025}, {11.0, 0.012}};
  for (const auto& o : octaves) {
    for (int k = 0; k < 4; ++k) {
      const double z = 2.0 * rng.uniform() - 1.0;
      const double phi = 2.0 * std::numbers::pi * rng.uniform();
      const double s = std::sqrt(1.0 - z * z);
      waves.push_back({{s * std::cos(phi), s * std::sin(phi), z}, o[0],
                       2.0 * std::numbers::pi * rng.uniform(), o[1] * (0.5 + rng.uniform())});
    }
  }
  const Vec3 stretch{1.0, 0.8, 0.7};
  for (Vec3& v : m.vertices) {
    double r = 1.0;
    for (const Wave& w : waves) r += w.amp * std::sin(w.freq * dot(w.dir, v) + w.phase);
    v = Vec3{v.x * stretch.x, v.y * stretch.y, v.z * stretch.z} * (0.85 * r);
  }

  try {
    write_mesh(argv[1], m);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  const MeshTopology topo = analyze_topology(m);
  const Box3 b = m.bounds();
  std::printf("%zu vertices, %zu triangles, euler %ld, bounds [%g %g %g] [%g %g %g]\n",
              m.vertices.size(), m.triangles.size(), topo.euler_characteristic(), b.lo.x, b.lo.y,
              b.lo.z, b.hi.x, b.hi.y, b.hi.z);
  return 0;
}
