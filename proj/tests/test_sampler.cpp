#include <map>

#include "doctest.h"
#include "mcgrids/grid.hpp"
#include "mcgrids/sampler.hpp"
#include "mcgrids/voronoi.hpp"
#include "test_util.hpp"

using namespace mcgrids;
using namespace testutil;

namespace {

const Box3 kUnit{{0, 0, 0}, {1, 1, 1}};

// Corner-only unit cube: each corner cell is a cube of side 1/2.
DensityState corner_state(const Triangulation& t) {
  DensityState s(0.0, 0.1);
  for (VertexId v = 0; v < 8; ++v) s.set_value(v, 1.0);
  rebuild_volumes(s, t);
  return s;
}

}  // namespace

TEST_CASE("rng streams are deterministic and split independently") {
  RngStream a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  RngStream c(42);
  const RngStream s1 = c.split(1);
  c.next_u64();
  const RngStream s1_again = c.split(1);
  CHECK(s1.seed() == s1_again.seed());  // independent of draws taken
  CHECK(c.split(1).seed() != c.split(2).seed());
  RngStream u(7);
  for (int i = 0; i < 10000; ++i) {
    const double x = u.uniform();
    REQUIRE(x >= 0.0);
    REQUIRE(x < 1.0);
  }
}

TEST_CASE("uniform in tetra: containment, determinism, centroid") {
  const Vec3 a{1, 1, 1}, b{1, -1, -1}, c{-1, 1, -1}, d{-1, -1, 1};  // regular, edge 2*sqrt(2)
  RngStream rng(3), again(3);
  Vec3 mean;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const auto p = uniform_in_tetra(a, b, c, d, rng);
    REQUIRE(p);
    const auto q = uniform_in_tetra(a, b, c, d, again);
    REQUIRE(*p == *q);
    if (i < 2000) {
      const std::array<Vec3, 4> tet{a, b, c, d};
      const bool positive = signed_volume6(a, b, c, d) > 0;
      const std::array<Vec3, 4> oriented = positive ? tet : std::array<Vec3, 4>{a, c, b, d};
      CHECK(tet_contains(oriented, *p));
    }
    mean += *p;
  }
  mean = mean / n;
  // Standard error per axis is about 0.003; allow 0.01 edge lengths.
  CHECK(norm(mean) < 0.01 * 2 * std::sqrt(2.0));
  CHECK_FALSE(uniform_in_tetra(a, b, c, (a + b) * 0.5, rng));
}

TEST_CASE("one active cubic cell samples uniformly by octant") {
  Triangulation t(kUnit);
  DensityState s = corner_state(t);
  for (VertexId v = 1; v < 8; ++v) s.set_trimmed(v, true);
  RngStream rng(12345);
  const int n = 100000;
  std::array<int, 8> octant{};
  for (int i = 0; i < n; ++i) {
    const auto smp = sample_point(s, t, rng);
    REQUIRE(smp);
    REQUIRE(smp->cell == 0);
    const Vec3& p = smp->point;
    REQUIRE((p.x >= 0 && p.x <= 0.5 && p.y >= 0 && p.y <= 0.5 && p.z >= 0 && p.z <= 0.5));
    ++octant[(p.x > 0.25) + 2 * (p.y > 0.25) + 4 * (p.z > 0.25)];
  }
  const double sigma = std::sqrt(n * (1.0 / 8) * (7.0 / 8));
  for (int k = 0; k < 8; ++k) CHECK(std::abs(octant[k] - n / 8.0) < 3 * sigma);
}

TEST_CASE("two cells with probability ratio 3:1") {
  Triangulation t(kUnit);
  DensityState s = corner_state(t);
  for (VertexId v = 2; v < 8; ++v) s.set_trimmed(v, true);
  s.set_multiplier(0, 3.0);
  RngStream rng(2718);
  const int n = 100000;
  int first = 0;
  for (int i = 0; i < n; ++i) first += sample_point(s, t, rng)->cell == 0;
  CHECK(std::abs(first / double(n) - 0.75) < 0.01);
}

TEST_CASE("chi-square over ten cells") {
  Triangulation t(kUnit);
  REQUIRE(t.insert({0.3, 0.4, 0.6}));
  REQUIRE(t.insert({0.7, 0.55, 0.35}));
  DensityState s(0.0, 0.1);
  RngStream values(5);
  for (VertexId v = 0; v < 10; ++v) s.set_value(v, values.uniform() * 2 - 1);
  rebuild_volumes(s, t);
  REQUIRE(s.active_cells().size() == 10);
  RngStream rng(20240601);
  const int n = 100000;
  std::array<int, 10> counts{};
  for (int i = 0; i < n; ++i) ++counts[sample_point(s, t, rng)->cell];
  double chi2 = 0;
  for (VertexId v = 0; v < 10; ++v) {
    const double expected = n * s.normalized_probability(v);
    chi2 += (counts[v] - expected) * (counts[v] - expected) / expected;
  }
  // Upper 0.001 quantile of chi-square with 9 degrees of freedom.
  CHECK(chi2 < 27.877);
}

TEST_CASE("samples lie in the Voronoi cell they were drawn from") {
  Triangulation t(kUnit);
  insert_random(t, 60, 6, shrink(kUnit, 1e-3));
  DensityState s(0.0, 0.1);
  for (VertexId v = 0; v < t.vertex_count(); ++v) s.set_value(v, 0.1 * v);
  rebuild_volumes(s, t);
  RngStream rng(8);
  for (int i = 0; i < 2000; ++i) {
    const auto smp = sample_point(s, t, rng);
    REQUIRE(smp);
    const double own = squared_distance(smp->point, t.position(smp->cell));
    const double best = squared_distance(smp->point, t.position(nearest_site(t, smp->point)));
    CHECK(own <= best * (1 + 1e-9) + 1e-18);
  }
}

TEST_CASE("sample batch") {
  Triangulation t({{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}});
  McGrid grid(t.domain(), 0.0, 0.05 * t.domain().diagonal());
  const auto sphere = AnalyticField::sphere(1.0);
  grid.initialize(*sphere);
  RngStream rng(1), rng2(1);
  CHECK_THROWS_AS(sample_batch(grid.density(), grid.triangulation(), rng, 0), std::invalid_argument);
  const SampleBatch b = sample_batch(grid.density(), grid.triangulation(), rng, 64);
  const SampleBatch b2 = sample_batch(grid.density(), grid.triangulation(), rng2, 64);
  CHECK(b.samples.size() + b.skipped == 64);
  CHECK_FALSE(b.exhausted);
  REQUIRE(b.samples.size() == b2.samples.size());
  for (std::size_t i = 0; i < b.samples.size(); ++i) {
    CHECK(grid.triangulation().domain().strictly_contains(b.samples[i].point));
    CHECK(b.samples[i].point == b2.samples[i].point);
  }

  DensityState empty = grid.density();
  std::vector<VertexId> all;
  for (VertexId v = 0; v < 8; ++v) all.push_back(v);
  empty.set_trimmed(all);
  const SampleBatch none = sample_batch(empty, grid.triangulation(), rng, 10);
  CHECK(none.exhausted);
  CHECK(none.samples.empty());
  CHECK_FALSE(sample_point(empty, grid.triangulation(), rng));
}
