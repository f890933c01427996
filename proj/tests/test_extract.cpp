#include "doctest.h"
#include "mcgrids/extract.hpp"
#include "test_util.hpp"

using namespace mcgrids;
using namespace testutil;

namespace {

const std::array<Vec3, 4> kTet{Vec3{0, 0, 0}, Vec3{1, 0, 0}, Vec3{0, 1, 0}, Vec3{0, 0, 1}};

// Gradient of the linear interpolant of `values` over kTet.
Vec3 linear_gradient(const std::array<double, 4>& f) { return {f[1] - f[0], f[2] - f[0], f[3] - f[0]}; }

// Brute-force triangle count: one per lone vertex, two for a 2-2 split.
int expected_triangles(const std::array<double, 4>& f, double alpha) {
  int neg = 0;
  for (double v : f) neg += classify_value(v, alpha) < alpha;
  return neg == 0 || neg == 4 ? 0 : (neg == 2 ? 2 : 1);
}

// Watertight grid over a cube with a random interior; corner values set too.
template <class F>
std::vector<double> grid_values(const Triangulation& t, F f) {
  std::vector<double> values(t.vertex_count());
  for (VertexId v = 0; v < values.size(); ++v) values[v] = f(t.position(v));
  return values;
}

}  // namespace

TEST_CASE("all sixteen sign patterns") {
  for (int mask = 0; mask < 16; ++mask) {
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) f[i] = (mask >> i & 1) ? -(0.5 + 0.1 * i) : (0.7 + 0.2 * i);
    CAPTURE(mask);
    const auto tris = marching_tet(kTet, f, 0.0);
    CHECK(static_cast<int>(tris.size()) == expected_triangles(f, 0.0));
    const Vec3 g = linear_gradient(f);
    for (const auto& tri : tris) {
      const Vec3 n = cross(tri[1] - tri[0], tri[2] - tri[0]);
      CHECK(dot(n, g) > 0);  // faces from negative toward positive
      for (const Vec3& p : tri) {
        const double lerp_value = f[0] + dot(g, p);
        CHECK(std::abs(lerp_value) < 1e-12);
      }
    }
    // The complement pattern gives the same surface with the opposite facing.
    std::array<double, 4> neg{};
    for (int i = 0; i < 4; ++i) neg[i] = -f[i];
    const auto flipped = marching_tet(kTet, neg, 0.0);
    REQUIRE(flipped.size() == tris.size());
    double area = 0, flipped_area = 0;
    for (std::size_t k = 0; k < tris.size(); ++k) {
      area += norm(cross(tris[k][1] - tris[k][0], tris[k][2] - tris[k][0]));
      const Vec3 n = cross(flipped[k][1] - flipped[k][0], flipped[k][2] - flipped[k][0]);
      flipped_area += norm(n);
      CHECK(dot(n, linear_gradient(neg)) > 0);
    }
    CHECK(area == doctest::Approx(flipped_area));
  }
}

TEST_CASE("crossing points interpolate to the iso-value") {
  RngStream rng(1001);
  for (int i = 0; i < 10000; ++i) {
    std::array<Vec3, 4> p{};
    for (auto& x : p) x = random_point(rng, {{-1, -1, -1}, {1, 1, 1}});
    if (signed_volume6(p[0], p[1], p[2], p[3]) < 0) std::swap(p[2], p[3]);
    const Vec3 g{rng.uniform() - 0.5, rng.uniform() - 0.5, rng.uniform() - 0.5};
    const double c = rng.uniform() - 0.5, alpha = rng.uniform() - 0.5;
    std::array<double, 4> f{};
    for (int k = 0; k < 4; ++k) f[k] = dot(g, p[k]) + c;
    if (!surface_crossing(f, alpha)) continue;
    const double scale = std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2]), std::abs(f[3]), 1.0});
    for (const auto& tri : marching_tet(p, f, alpha))
      for (const Vec3& x : tri) REQUIRE(std::abs(dot(g, x) + c - alpha) <= 1e-12 * scale);
  }
}

TEST_CASE("quad diagonal depends only on global ids") {
  const std::array<double, 4> f{-1, -1, 1, 1};
  std::array<EdgeTriangle, 2> a{}, b{};
  REQUIRE(marching_tet_case(f, 0.0, {10, 20, 30, 40}, a) == 2);
  REQUIRE(marching_tet_case(f, 0.0, {10, 20, 30, 40}, b) == 2);
  CHECK(a == b);
}

TEST_CASE("sphere extraction is closed and genus zero") {
  const Box3 box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
  Triangulation t(box);
  insert_random(t, 4000, 12, shrink(box, 1e-3));
  const auto values = grid_values(t, [](const Vec3& p) { return norm(p) - 1.0; });
  const TriangleMesh mesh = extract_mesh(t, values, 0.0);
  const MeshTopology topo = analyze_topology(mesh);
  CHECK(topo.boundary_edges == 0);
  CHECK(topo.nonmanifold_edges == 0);
  CHECK(topo.euler_characteristic() == 2);
  CHECK(topo.components == 1);
  CHECK(mesh.edge_keys.size() == mesh.vertices.size());
  // Outward facing: the divergence theorem gives positive enclosed volume.
  double volume = 0;
  for (const Triangle& tri : mesh.triangles)
    volume += dot(mesh.vertices[tri[0]], cross(mesh.vertices[tri[1]], mesh.vertices[tri[2]])) / 6;
  CHECK(volume > 0);
  CHECK(volume < 4.0 / 3 * std::acos(-1.0));
}

TEST_CASE("no crossing means an empty mesh") {
  const Box3 box{{-1, -1, -1}, {1, 1, 1}};
  Triangulation t(box);
  insert_random(t, 100, 1, shrink(box, 1e-3));
  const std::vector<double> ones(t.vertex_count(), 1.0);
  CHECK(extract_mesh(t, ones, 0.0).empty());
}

TEST_CASE("two separate spheres give two components") {
  const Box3 box{{-2, -1, -1}, {2, 1, 1}};
  Triangulation t(box);
  insert_random(t, 5000, 21, shrink(box, 1e-3));
  const auto values = grid_values(t, [](const Vec3& p) {
    return std::min(norm(p - Vec3{-1, 0, 0}), norm(p - Vec3{1, 0, 0})) - 0.6;
  });
  const MeshTopology topo = analyze_topology(extract_mesh(t, values, 0.0));
  CHECK(topo.components == 2);
  CHECK(topo.boundary_edges == 0);
  CHECK(topo.euler_characteristic() == 4);
}

TEST_CASE("corner tets are skipped and NaN values are rejected") {
  const Box3 box{{0, 0, 0}, {1, 1, 1}};
  Triangulation t(box);
  // Only corners: every tet touches one, so nothing is extracted.
  const std::vector<double> mixed = {-1, 1, 1, 1, 1, 1, 1, 1};
  CHECK(extract_mesh(t, mixed, 0.0).empty());
  insert_random(t, 50, 3, shrink(box, 1e-3));
  std::vector<double> values(t.vertex_count(), 1.0);
  values[20] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(extract_mesh(t, values, 0.0), std::logic_error);
}
