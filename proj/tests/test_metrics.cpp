#include "doctest.h"
#include "mcgrids/baselines.hpp"
#include "mcgrids/metrics.hpp"
#include "test_util.hpp"

using namespace mcgrids;
using namespace testutil;

namespace {

TriangleMesh flipped(TriangleMesh m) {
  for (Triangle& t : m.triangles) std::swap(t[1], t[2]);
  return m;
}

// Rotation about z by 90 degrees then a translation.
TriangleMesh moved(TriangleMesh m) {
  for (Vec3& v : m.vertices) v = Vec3{-v.y, v.x, v.z} + Vec3{3, -2, 5};
  return m;
}

}  // namespace

TEST_CASE("kd tree agrees with brute force") {
  RngStream rng(4);
  std::vector<Vec3> pts;
  for (int i = 0; i < 500; ++i) pts.push_back(random_point(rng, {{0, 0, 0}, {1, 1, 1}}));
  const PointKdTree tree(pts);
  for (int i = 0; i < 200; ++i) {
    const Vec3 q = random_point(rng, {{-0.2, -0.2, -0.2}, {1.2, 1.2, 1.2}});
    double best = std::numeric_limits<double>::infinity();
    for (const Vec3& p : pts) best = std::min(best, squared_distance(p, q));
    const auto [idx, d2] = tree.nearest(q);
    CHECK(d2 == best);
    CHECK(squared_distance(pts[idx], q) == best);
  }
}

TEST_CASE("surface samples lie on the mesh") {
  const TriangleMesh sphere = uv_sphere(1.0, 12, 24);
  const SurfaceSamples s = sample_surface(sphere, 2000, 3);
  REQUIRE(s.points.size() == 2000);
  for (std::size_t i = 0; i < s.points.size(); i += 20) {
    CHECK(brute_unsigned_distance(sphere, s.points[i]) < 1e-12);
    CHECK(norm(s.normals[i]) == doctest::Approx(1.0));
  }
}

TEST_CASE("chamfer distance") {
  MetricParams p;
  p.n_samples = 20000;
  const TriangleMesh a = square_mesh(0.0, 4);
  CHECK(chamfer_l2(a, a, p) < 1e-20);
  const double delta = 0.01;
  // Parallel unit squares: every sample is exactly delta from the other.
  CHECK(chamfer_l2(a, square_mesh(delta, 3), p) == doctest::Approx(delta * delta).epsilon(1e-9));
  CHECK_THROWS_AS(chamfer_l2(a, TriangleMesh{}, p), std::invalid_argument);
}

TEST_CASE("quality is invariant to a rigid motion of both meshes") {
  MetricParams p;
  p.n_samples = 5000;
  const TriangleMesh a = uv_sphere(1.0, 10, 20), b = uv_sphere(1.05, 14, 28);
  const QualityReport q1 = evaluate_quality(a, b, p);
  const QualityReport q2 = evaluate_quality(moved(a), moved(b), p);
  // Rounding in the moved coordinates can shift a few area-weighted samples.
  CHECK(q1.cd == doctest::Approx(q2.cd).epsilon(1e-3));
  CHECK(q1.nc == doctest::Approx(q2.nc).epsilon(1e-3));
  CHECK(q1.f1 == doctest::Approx(q2.f1).epsilon(1e-3));
}

TEST_CASE("normal consistency ignores facing") {
  MetricParams p;
  p.n_samples = 2000;
  const TriangleMesh a = square_mesh(0.0, 2);
  CHECK(normal_consistency(a, a, p) == doctest::Approx(1.0));
  CHECK(normal_consistency(a, flipped(a), p) == doctest::Approx(1.0));
  const TriangleMesh s = uv_sphere(1.0, 16, 32);
  CHECK(normal_consistency(s, uv_sphere(1.0, 6, 8), p) < 1.0);
}

TEST_CASE("F1 matches a brute-force recount") {
  MetricParams p;
  p.n_samples = 3000;
  p.seed = 42;
  const TriangleMesh a = uv_sphere(1.0, 8, 16), b = uv_sphere(1.02, 10, 20);
  const double thresh = 0.025;
  const double f1 = f1_score(a, b, thresh, p);
  // Recount with the same samples and an exact point-to-mesh distance.
  const SurfaceSamples sa = sample_surface(a, p.n_samples, p.seed);
  const SurfaceSamples sb = sample_surface(b, p.n_samples, p.seed + 1);
  std::size_t ina = 0, inb = 0;
  for (const Vec3& x : sa.points) ina += brute_unsigned_distance(b, x) < thresh;
  for (const Vec3& x : sb.points) inb += brute_unsigned_distance(a, x) < thresh;
  const double precision = double(ina) / sa.points.size(), recall = double(inb) / sb.points.size();
  const double expect = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
  CHECK(f1 == doctest::Approx(expect).epsilon(1e-12));
  CHECK(f1_score(a, a, thresh, p) == doctest::Approx(1.0));
}

TEST_CASE("edge metrics") {
  MetricParams p;
  p.n_samples = 2000;
  const TriangleMesh cube = cube_mesh(1.0);
  // The face diagonals are flat; only the twelve cube edges are sharp.
  const auto samples = sample_sharp_edges(cube, 1000, 30.0, 1);
  REQUIRE(samples.size() == 1000);
  for (const Vec3& s : samples) {
    int on = 0;
    for (double c : {s.x, s.y, s.z}) on += std::abs(std::abs(c) - 0.5) < 1e-12;
    CHECK(on >= 2);
  }
  CHECK(sample_sharp_edges(uv_sphere(1.0, 24, 48), 100, 30.0, 1).empty());

  const auto [ecd_self, ef1_self] = edge_metrics(cube, cube, 30.0, 0.01, p);
  CHECK(ecd_self < 1e-3);
  CHECK(ef1_self > 0.9);
  const auto [ecd_none, ef1_none] = edge_metrics(uv_sphere(1, 24, 48), uv_sphere(1, 24, 48), 30.0, 0.01, p);
  CHECK(ecd_none == 0.0);
  CHECK(ef1_none == 1.0);
  const auto [ecd_one, ef1_one] = edge_metrics(cube, uv_sphere(0.5, 24, 48), 30.0, 0.01, p);
  CHECK(ecd_one > 0.0);
  CHECK(ef1_one == 0.0);
}

TEST_CASE("marching cubes baseline") {
  const auto sphere = AnalyticField::sphere(1.0);
  const Box3 box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
  const std::uint64_t before = sphere->query_count();
  const TriangleMesh mc = marching_cubes(*sphere, box, 64);
  CHECK(sphere->query_count() - before == 262144);
  const MeshTopology topo = analyze_topology(mc);
  CHECK(topo.boundary_edges == 0);
  CHECK(topo.euler_characteristic() == 2);
  for (const Vec3& v : mc.vertices) CHECK(std::abs(norm(v) - 1.0) < 0.01);

  const std::uint64_t mid = sphere->query_count();
  const TriangleMesh mt = marching_tets_uniform(*sphere, box, 63);
  CHECK(sphere->query_count() - mid == 262144);
  CHECK(mt.triangles.size() > mc.triangles.size());
  CHECK(analyze_topology(mt).boundary_edges == 0);
}

TEST_CASE("finer marching cubes is closer to the torus") {
  const auto torus = AnalyticField::torus(1.0, 0.25);
  const Box3 box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
  MetricParams p;
  p.n_samples = 20000;
  const TriangleMesh ref = marching_cubes(*torus, box, 160);
  const double coarse = evaluate_quality(marching_cubes(*torus, box, 24), ref, p).cd;
  const double fine = evaluate_quality(marching_cubes(*torus, box, 64), ref, p).cd;
  CHECK(fine < coarse);
}

TEST_CASE("peak memory is reported") { CHECK(peak_memory_bytes() > 0); }
