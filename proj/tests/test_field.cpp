#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "doctest.h"
#include "mcgrids/field_spec.hpp"
#include "mcgrids/mesh_io.hpp"
#include "mcgrids/mesh_sdf.hpp"
#include "test_util.hpp"

using namespace mcgrids;
using namespace testutil;

TEST_CASE("sphere field values and query counter") {
  const auto s = AnalyticField::sphere(1.0);
  CHECK(s->evaluate({0, 0, 0}) == -1.0);
  CHECK(s->evaluate({1, 0, 0}) == 0.0);
  CHECK(s->evaluate({2, 0, 0}) == 1.0);
  CHECK(s->query_count() == 3);

  const std::vector<Vec3> pts = {{0, 0, 0}, {1, 0, 0}};
  const std::vector<double> v = s->evaluate_batch(pts);
  REQUIRE(v.size() == 2);
  CHECK(v[0] == -1.0);
  CHECK(v[1] == 0.0);
  CHECK(s->query_count() == 5);

  CHECK(s->evaluate_batch({}).empty());
  CHECK(s->query_count() == 5);
}

TEST_CASE("sphere distance is r - radius exactly along axes") {
  const auto s = AnalyticField::sphere(0.75);
  for (double r : {0.0, 0.25, 0.75, 1.5, 3.0}) CHECK(s->evaluate({0, r, 0}) == r - 0.75);
}

TEST_CASE("batch matches sequential evaluation and is deterministic") {
  const auto t = AnalyticField::torus(1.0, 0.25);
  RngStream rng(3);
  std::vector<Vec3> pts;
  for (int i = 0; i < 200; ++i) pts.push_back(random_point(rng, {{-2, -2, -2}, {2, 2, 2}}));
  const std::vector<double> batch = t->evaluate_batch(pts);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK(batch[i] == t->evaluate(pts[i]));
  CHECK(t->query_count() == 400);
}

TEST_CASE("torus closed form") {
  const auto t = AnalyticField::torus(1.0, 0.25);
  CHECK(std::abs(t->evaluate({1, 0, 0.25})) <= 1e-15);
  RngStream rng(11);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p = random_point(rng, {{-2, -2, -2}, {2, 2, 2}});
    const double q = std::hypot(p.x, p.y) - 1.0;
    CHECK(t->evaluate(p) == doctest::Approx(std::sqrt(q * q + p.z * p.z) - 0.25).epsilon(1e-14));
  }
}

TEST_CASE("non-finite points are rejected") {
  const auto s = AnalyticField::sphere(1.0);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(s->evaluate({nan, 0, 0}), std::domain_error);
  const std::vector<Vec3> pts = {{0, 0, 0}, {0, std::numeric_limits<double>::infinity(), 0}};
  CHECK_THROWS_AS(s->evaluate_batch(pts), std::domain_error);
}

TEST_CASE("query counter is exact under concurrent evaluation") {
  const auto s = AnalyticField::sphere(1.0);
  std::vector<std::thread> threads;
  for (int k = 0; k < 4; ++k) {
    threads.emplace_back([&] {
      for (int i = 0; i < 20000; ++i) s->evaluate({0.1 * i, 0, 0});
    });
  }
  for (auto& th : threads) th.join();
  CHECK(s->query_count() == 80000);
}

TEST_CASE("csg counts one query per evaluation") {
  auto a = AnalyticField::sphere(1.0);
  auto b = AnalyticField::sphere(1.0, Similarity::from_euler({}, {1.5, 0, 0}, 1.0));
  CsgField u(CsgField::Op::unite, a, b);
  CsgField i(CsgField::Op::intersect, a, b);
  CsgField d(CsgField::Op::subtract, a, b);
  const Vec3 p{0.2, 0.1, 0};
  CHECK(u.evaluate(p) == std::min(a->evaluate(p), b->evaluate(p)));
  CHECK(i.evaluate(p) == std::max(a->evaluate(p), b->evaluate(p)));
  CHECK(d.evaluate(p) == std::max(a->evaluate(p), -b->evaluate(p)));
  CHECK(u.query_count() == 1);
  CHECK(a->query_count() == 3);  // only the direct calls above
}

TEST_CASE("similarity transform moves and scales primitives") {
  const auto s = AnalyticField::sphere(1.0, Similarity::from_euler({10, 20, 30}, {0.5, -0.25, 0.1}, 2.0));
  CHECK(s->evaluate({0.5, -0.25, 0.1}) == doctest::Approx(-2.0));
  CHECK(s->evaluate({2.5, -0.25, 0.1}) == doctest::Approx(0.0).scale(1e-12));
}

TEST_CASE("mesh sdf examples") {
  TriangleMesh tri;
  tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
  tri.triangles = {{0, 1, 2}};
  MeshSdf single(tri, MeshSdf::SignPolicy::unsigned_distance);
  CHECK(single.evaluate({0.25, 0.25, 1}) == doctest::Approx(1.0));
  CHECK_FALSE(single.watertight());

  MeshSdf cube(cube_mesh());
  CHECK(cube.watertight());
  CHECK(cube.policy() == MeshSdf::SignPolicy::winding_number);
  CHECK(cube.evaluate({0, 0, 0}) == doctest::Approx(-0.5));
  CHECK(cube.evaluate({1, 0, 0}) == doctest::Approx(0.5));
  CHECK(brute_unsigned_distance(cube.mesh(), {0, 0, 0}) == doctest::Approx(0.5));

  CHECK_THROWS_AS(MeshSdf(TriangleMesh{}), std::invalid_argument);
}

TEST_CASE("mesh sdf unsigned distance matches brute force on random meshes") {
  RngStream rng(5);
  for (int m = 0; m < 10; ++m) {
    TriangleMesh mesh;
    const int n = 5 + static_cast<int>(rng.uniform() * 45);
    for (int i = 0; i < n; ++i) {
      const auto base = static_cast<std::uint32_t>(mesh.vertices.size());
      const Vec3 c = random_point(rng, {{-1, -1, -1}, {1, 1, 1}});
      for (int k = 0; k < 3; ++k) mesh.vertices.push_back(c + random_point(rng, {{-0.3, -0.3, -0.3}, {0.3, 0.3, 0.3}}));
      mesh.triangles.push_back({base, base + 1, base + 2});
    }
    MeshSdf sdf(mesh, MeshSdf::SignPolicy::pseudo_normal);
    for (int i = 0; i < 100; ++i) {
      const Vec3 p = random_point(rng, {{-2, -2, -2}, {2, 2, 2}});
      CHECK(std::abs(sdf.unsigned_distance(p) - brute_unsigned_distance(mesh, p)) < 1e-9);
      CHECK(std::abs(std::abs(sdf.evaluate(p)) - brute_unsigned_distance(mesh, p)) < 1e-9);
    }
  }
}

TEST_CASE("sign policies on a closed convex mesh") {
  const TriangleMesh sphere = uv_sphere(1.0, 16, 24);
  MeshSdf winding(sphere, MeshSdf::SignPolicy::winding_number);
  MeshSdf pseudo(sphere, MeshSdf::SignPolicy::pseudo_normal);
  RngStream rng(9);
  int checked = 0;
  for (int i = 0; i < 400; ++i) {
    const Vec3 p = random_point(rng, {{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}});
    // Convex oracle: inside iff behind every face plane.
    double worst = -1e300;
    for (std::size_t t = 0; t < sphere.triangles.size(); ++t)
      worst = std::max(worst, dot(p - sphere.vertices[sphere.triangles[t][0]], sphere.face_normal(t)));
    if (std::abs(worst) < 1e-3) continue;
    ++checked;
    const bool inside = worst < 0;
    CHECK((winding.evaluate(p) < 0) == inside);
    CHECK((pseudo.evaluate(p) < 0) == inside);
  }
  CHECK(checked > 300);
}

TEST_CASE("sampled grid: lattice values exact, linear fields reproduced") {
  const std::array<std::size_t, 3> res{5, 4, 6};
  const Box3 box{{-1, 0, 2}, {1, 3, 4}};
  auto lin = [](const Vec3& p) { return 0.5 * p.x - 2.0 * p.y + 0.25 * p.z + 1.0; };
  std::vector<double> vals;
  for (std::size_t k = 0; k < res[2]; ++k)
    for (std::size_t j = 0; j < res[1]; ++j)
      for (std::size_t i = 0; i < res[0]; ++i) {
        const Vec3 p{box.lo.x + 2.0 * i / 4, box.lo.y + 3.0 * j / 3, box.lo.z + 2.0 * k / 5};
        vals.push_back(lin(p) + (i == 2 && j == 1 && k == 3 ? 0.125 : 0.0));
      }
  SampledGrid g(res, box, vals);
  // The bumped lattice value comes back up to rounding of the lattice coordinate.
  CHECK(g.evaluate({0.0, 1.0, 2.0 + 2.0 * 3 / 5}) == doctest::Approx(vals[2 + 5 * (1 + 4 * 3)]).epsilon(1e-12));

  std::vector<double> lin_vals;
  for (std::size_t k = 0; k < res[2]; ++k)
    for (std::size_t j = 0; j < res[1]; ++j)
      for (std::size_t i = 0; i < res[0]; ++i)
        lin_vals.push_back(lin({box.lo.x + 2.0 * i / 4, box.lo.y + 3.0 * j / 3, box.lo.z + 2.0 * k / 5}));
  SampledGrid linear(res, box, lin_vals);
  RngStream rng(1);
  for (int i = 0; i < 200; ++i) {
    const Vec3 p = random_point(rng, box);
    CHECK(std::abs(linear.evaluate(p) - lin(p)) < 1e-13);
  }
  CHECK_THROWS_AS(SampledGrid({1, 2, 2}, box, std::vector<double>(4)), std::invalid_argument);
  CHECK_THROWS_AS(SampledGrid({2, 2, 2}, box, std::vector<double>(7)), std::invalid_argument);
}

TEST_CASE("sampled grid file round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "mcgrids_test_grid";
  std::filesystem::create_directories(dir);
  const auto path = dir / "g.grid";
  std::vector<double> vals(27);
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::sin(0.3 * i) - 0.1;
  SampledGrid g({3, 3, 3}, {{-1, -1, -1}, {1, 1, 1}}, vals);
  g.save(path);
  const auto back = SampledGrid::load(path);
  CHECK(back->values() == vals);
  CHECK(back->resolution() == g.resolution());

  const auto via_spec = parse_field_spec("grid:path=g.grid", dir);
  CHECK(via_spec->evaluate({0.3, -0.2, 0.7}) == g.evaluate({0.3, -0.2, 0.7}));

  std::ofstream(dir / "bad.grid") << "not a grid\n";
  CHECK_THROWS_AS(SampledGrid::load(dir / "bad.grid"), std::runtime_error);
  CHECK_THROWS_AS(SampledGrid::load(dir / "missing.grid"), std::runtime_error);
}

TEST_CASE("field spec parser") {
  CHECK(parse_field_spec("sphere:r=2")->evaluate({0, 0, 0}) == -2.0);
  CHECK(parse_field_spec("sphere:r=1,cx=1")->evaluate({1, 0, 0}) == -1.0);
  CHECK(parse_field_spec("torus:R=1,r=0.25")->evaluate({1, 0, 0}) == doctest::Approx(-0.25));
  CHECK(parse_field_spec("const:v=1")->evaluate({3, 2, 1}) == 1.0);
  CHECK(parse_field_spec("box:hx=1,hy=2,hz=3")->evaluate({0, 0, 0}) == doctest::Approx(-1.0));

  const auto u = parse_field_spec("csg:union(sphere:r=1,sphere:r=1,cx=1.5)");
  CHECK(u->evaluate({1.5, 0, 0}) == doctest::Approx(-1.0));
  CHECK(u->kind() == ImplicitField::Kind::csg_composite);
  const auto nested = parse_field_spec("csg:subtract(csg:union(sphere:r=1,sphere:r=1,cx=1),sphere:r=0.5)");
  CHECK(nested->evaluate({0, 0, 0}) == doctest::Approx(0.5));

  CHECK_THROWS_AS(parse_field_spec(""), FieldSpecError);
  CHECK_THROWS_AS(parse_field_spec("blob:r=1"), FieldSpecError);
  CHECK_THROWS_AS(parse_field_spec("sphere:q=1"), FieldSpecError);
  CHECK_THROWS_AS(parse_field_spec("sphere:r=abc"), FieldSpecError);
  CHECK_THROWS_AS(parse_field_spec("csg:xor(sphere,sphere)"), FieldSpecError);
  CHECK_THROWS_AS(parse_field_spec("csg:union(sphere:r=1)"), FieldSpecError);
  CHECK_THROWS_AS(parse_field_spec("mesh:path=/nonexistent/file.obj"), std::runtime_error);
  try {
    parse_field_spec("mesh:path=/nonexistent/file.obj");
  } catch (const FieldSpecError&) {
    FAIL("a missing file is an I/O error, not a usage error");
  } catch (const std::runtime_error&) {
  }
}

TEST_CASE("field bounds") {
  const Box3 b = AnalyticField::torus(1.0, 0.25)->bounds();
  CHECK(b.lo.x == doctest::Approx(-1.25));
  CHECK(b.hi.z == doctest::Approx(0.25));
  CHECK_FALSE(AnalyticField::constant(1.0)->bounds().valid());
  CHECK_FALSE(AnalyticField::constant(1.0)->is_distance_like());
}

TEST_CASE("slab with bumps") {
  SlabBumpsField f;
  const auto& p = f.params();
  CHECK(f.evaluate({-0.5, 0, 0}) < 0);
  CHECK(f.evaluate({-0.5, 0, p.slab_half_extents.z + 0.05}) > 0);
  const double top = p.slab_half_extents.z;
  CHECK(f.in_bump_region({0.5, 0, top + 0.01}));
  CHECK_FALSE(f.in_bump_region({-0.5, 0, top + 0.01}));
  CHECK_FALSE(f.in_bump_region({0.5, 0, 0}));  // inside the slab, below the bumps
  const Box3 b = f.bounds();
  CHECK(b.contains({0, 0, 0}));
}
