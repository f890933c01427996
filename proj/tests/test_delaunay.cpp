#include <set>
#include <sstream>
#include <string>

#include "doctest.h"
#include "mcgrids/delaunay.hpp"
#include "mcgrids/predicates.hpp"
#include "test_util.hpp"

using namespace mcgrids;
using namespace testutil;

namespace {

const Box3 kUnit{{0, 0, 0}, {1, 1, 1}};

bool invariants_hold(const Triangulation& t) {
  return t.adjacency_consistent() && t.all_positively_oriented() &&
         std::abs(t.total_volume() - t.domain().volume()) <= 1e-9 * t.domain().volume();
}

}  // namespace

TEST_CASE("predicates: orientation and in-sphere signs") {
  using namespace predicates;
  const Vec3 a{0, 0, 0}, b{1, 0, 0}, c{0, 1, 0}, d{0, 0, 1};
  CHECK(orient3d(a, b, c, d) == 1);
  CHECK(orient3d(a, c, b, d) == -1);
  CHECK(orient3d(a, b, c, {0.3, 0.3, 0}) == 0);
  CHECK(insphere(a, b, c, d, {0.2, 0.2, 0.2}) == 1);
  CHECK(insphere(a, b, c, d, {2, 2, 2}) == -1);
  CHECK(insphere(a, b, c, d, {1, 1, 1}) == 0);  // cube corner, cospherical
  // Perturbation never ties.
  const int s = insphere_perturbed(a, b, c, d, {1, 1, 1}, {0, 1, 2, 3, 4});
  CHECK(s != 0);
}

TEST_CASE("predicates: near-degenerate orientation agrees with exact arithmetic") {
  using namespace predicates;
  // Points on the plane x + y + z = 1 with tiny perturbations along the normal.
  const Vec3 a{1, 0, 0}, b{0, 1, 0}, c{0, 0, 1};
  for (int k = -5; k <= 5; ++k) {
    const double e = k * 1e-17;
    const Vec3 p{1.0 / 3 + e, 1.0 / 3, 1.0 / 3};
    // det[b - a, c - a, p - a] = x + y + z - 1, exact in long double here.
    const long double off = static_cast<long double>(p.x) + p.y + p.z - 1.0L;
    const int expect = off > 0 ? 1 : (off < 0 ? -1 : 0);
    CHECK(orient3d(a, b, c, p) == expect);
  }
}

TEST_CASE("init: box corners and positive tets tiling the box") {
  Triangulation unit(kUnit);
  CHECK(unit.vertex_count() == 8);
  CHECK(unit.total_volume() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(unit.all_positively_oriented());
  CHECK(unit.adjacency_consistent());
  for (VertexId v = 0; v < 8; ++v) CHECK(Triangulation::is_corner(v));

  Triangulation big({{-1, -1, -1}, {1, 1, 1}});
  CHECK(big.total_volume() == doctest::Approx(8.0).epsilon(1e-15));
  CHECK(big.merge_epsilon() == doctest::Approx(1e-7 * std::sqrt(12.0)));

  CHECK_THROWS_AS(Triangulation({{0, 0, 0}, {1, 0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(Triangulation({{1, 1, 1}, {0, 0, 0}}), std::invalid_argument);
}

TEST_CASE("locate: returned tet contains the point (brute-force oracle)") {
  Triangulation t(kUnit);
  insert_random(t, 200, 17, shrink(kUnit, 1e-3));
  const Location center = t.locate({0.5, 0.5, 0.5});
  REQUIRE(center.tet != kNoTet);
  CHECK(tet_contains(t.tet_positions(center.tet), {0.5, 0.5, 0.5}));

  RngStream rng(99);
  for (int i = 0; i < 100; ++i) {
    const Vec3 p = random_point(rng, kUnit);
    const Location loc = t.locate(p);
    REQUIRE(t.is_alive(loc.tet));
    CHECK(tet_contains(t.tet_positions(loc.tet), p));
    int containing = 0;
    t.for_each_tet([&](TetId id, const Tetrahedron&) { containing += tet_contains(t.tet_positions(id), p); });
    CHECK(containing >= 1);
  }
  CHECK_THROWS_AS(t.locate({1.5, 0.5, 0.5}), std::out_of_range);
}

TEST_CASE("locate: point at a vertex is flagged") {
  Triangulation t(kUnit);
  const auto v = t.insert({0.3, 0.6, 0.2});
  REQUIRE(v);
  const Location loc = t.locate({0.3, 0.6, 0.2});
  REQUIRE(loc.on_vertex);
  CHECK(*loc.on_vertex == *v);
  const Location corner = t.locate({1, 1, 1});
  REQUIRE(corner.on_vertex);
  CHECK(*corner.on_vertex == 7);
}

TEST_CASE("insert: center of the unit cube") {
  Triangulation t(kUnit);
  const auto v = t.insert({0.5, 0.5, 0.5});
  REQUIRE(v);
  CHECK(*v == 8);
  CHECK(t.vertex_count() == 9);
  CHECK(std::abs(t.total_volume() - 1.0) < 1e-12);
  CHECK(t.affected_vertices(*v) == std::vector<VertexId>{0, 1, 2, 3, 4, 5, 6, 7, 8});
  CHECK(t.count_delaunay_violations() == 0);
}

TEST_CASE("insert: 500 random points keep every invariant") {
  Triangulation t(kUnit);
  RngStream rng(2024);
  for (int i = 0; i < 500; ++i) {
    REQUIRE(t.insert(random_point(rng, shrink(kUnit, 1e-6))));
    if (i % 50 == 0) REQUIRE(invariants_hold(t));
  }
  CHECK(invariants_hold(t));
  CHECK(t.count_delaunay_violations() == 0);
}

TEST_CASE("insert: cospherical lattice points resolve by perturbation") {
  Triangulation t({{0, 0, 0}, {4, 4, 4}});
  for (int i = 1; i < 4; ++i)
    for (int j = 1; j < 4; ++j)
      for (int k = 1; k < 4; ++k) REQUIRE(t.insert({double(i), double(j), double(k)}));
  CHECK(invariants_hold(t));
  CHECK(t.count_delaunay_violations() == 0);
}

TEST_CASE("insert: merge and domain errors") {
  Triangulation t(kUnit);
  REQUIRE(t.insert({0.25, 0.5, 0.75}));
  const std::size_t tets = t.tet_count();
  std::ostringstream before;
  t.write_debug(before);
  CHECK_FALSE(t.insert({0.25, 0.5, 0.75}));
  CHECK_FALSE(t.insert({0.25 + 0.5 * t.merge_epsilon(), 0.5, 0.75}));
  CHECK(t.vertex_count() == 9);
  CHECK(t.tet_count() == tets);
  std::ostringstream after;
  t.write_debug(after);
  CHECK(before.str() == after.str());

  CHECK_THROWS_AS(t.insert({1.0, 0.5, 0.5}), std::out_of_range);
  CHECK_THROWS_AS(t.insert({-0.1, 0.5, 0.5}), std::out_of_range);
  CHECK(t.natural_neighbors({0.25, 0.5, 0.75}).empty());
}

TEST_CASE("natural neighbours predict the one-ring after insertion") {
  Triangulation t(kUnit);
  insert_random(t, 100, 8, shrink(kUnit, 1e-3));
  RngStream rng(81);
  for (int i = 0; i < 30; ++i) {
    const Vec3 p = random_point(rng, shrink(kUnit, 1e-3));
    const std::vector<VertexId> predicted = t.natural_neighbors(p);
    // Conflict region oracle: tets whose circumsphere strictly contains p.
    std::set<VertexId> from_conflict;
    for (TetId c : t.conflict_region(p))
      for (VertexId v : t.tet(c).v) from_conflict.insert(v);
    std::set<TetId> brute;
    t.for_each_tet([&](TetId id, const Tetrahedron&) {
      const auto x = t.tet_positions(id);
      if (predicates::insphere(x[0], x[1], x[2], x[3], p) > 0) brute.insert(id);
    });
    const auto cr = t.conflict_region(p);
    CHECK(std::set<TetId>(cr.begin(), cr.end()) == brute);
    CHECK(predicted == std::vector<VertexId>(from_conflict.begin(), from_conflict.end()));
    const auto v = t.insert(p);
    REQUIRE(v);
    CHECK(t.one_ring(*v) == predicted);
  }
}

TEST_CASE("tet slots are recycled and stamps change") {
  Triangulation t(kUnit);
  insert_random(t, 50, 4, shrink(kUnit, 1e-3));
  const std::size_t capacity = t.tet_capacity();
  std::vector<std::uint64_t> stamps;
  for (TetId id = 0; id < capacity; ++id) stamps.push_back(t.tet_stamp(id));
  const auto v = t.insert({0.51, 0.49, 0.52});
  REQUIRE(v);
  int changed = 0;
  for (TetId id : t.last_created()) {
    CHECK(t.is_alive(id));
    if (id < capacity) changed += t.tet_stamp(id) != stamps[id];
  }
  CHECK(changed >= 1);
  CHECK(t.tet_capacity() < capacity + t.last_created().size());
}

TEST_CASE("debug dump lists vertices then 1-based tets") {
  Triangulation t(kUnit);
  std::ostringstream out;
  t.write_debug(out);
  std::istringstream in(out.str());
  std::string tag;
  int v = 0, tets = 0;
  std::string line;
  while (std::getline(in, line)) {
    if (line[0] == 'v') ++v;
    if (line[0] == 't') {
      ++tets;
      std::istringstream ls(line);
      int a, b, c, d;
      ls >> tag >> a >> b >> c >> d;
      CHECK(std::min({a, b, c, d}) >= 1);
      CHECK(std::max({a, b, c, d}) <= 8);
    }
  }
  CHECK(v == 8);
  CHECK(static_cast<std::size_t>(tets) == t.tet_count());
}
