#include <benchmark/benchmark.h>

#include "mcgrids/baselines.hpp"
#include "mcgrids/cvt.hpp"
#include "mcgrids/extract.hpp"
#include "mcgrids/field_spec.hpp"
#include "mcgrids/pipeline.hpp"
#include "mcgrids/sampler.hpp"
#include "mcgrids/voronoi.hpp"

using namespace mcgrids;

namespace {

const Box3 kUnit{{0, 0, 0}, {1, 1, 1}};

Vec3 draw(RngStream& rng) { return {rng.uniform(), rng.uniform(), rng.uniform()}; }

Triangulation filled(std::size_t n, std::uint64_t seed) {
  Triangulation t(kUnit);
  RngStream rng(seed);
  while (t.vertex_count() < n + 8) t.insert(draw(rng));
  return t;
}

void BM_DelaunayInsert(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    Triangulation t = filled(n, 1);
    benchmark::DoNotOptimize(t.tet_count());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_DelaunayInsert)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_VoronoiCell(benchmark::State& state) {
  const Triangulation t = filled(5000, 2);
  VertexId v = 8;
  for (auto _ : state) {
    benchmark::DoNotOptimize(voronoi_cell(t, v).volume);
    v = v + 1 < t.vertex_count() ? v + 1 : 8;
  }
}
BENCHMARK(BM_VoronoiCell);

void BM_RelaxPoint(benchmark::State& state) {
  const Triangulation t = filled(5000, 3);
  RngStream rng(4);
  for (auto _ : state) benchmark::DoNotOptimize(relax_point(t, draw(rng), 3, 1e-6).position);
}
BENCHMARK(BM_RelaxPoint);

void BM_SamplePoint(benchmark::State& state) {
  const Triangulation t = filled(5000, 5);
  DensityState s(0.5, 0.05);
  for (VertexId v = 0; v < t.vertex_count(); ++v) s.set_value(v, t.position(v).x);
  rebuild_volumes(s, t);
  RngStream rng(6);
  for (auto _ : state) benchmark::DoNotOptimize(sample_point(s, t, rng));
}
BENCHMARK(BM_SamplePoint);

void BM_MeshSdf(benchmark::State& state) {
  const FieldPtr blob = parse_field_spec("mesh:path=blob.obj", MCGRIDS_DATA_DIR);
  RngStream rng(7);
  for (auto _ : state) {
    const Vec3 p{rng.uniform() * 3 - 1.5, rng.uniform() * 3 - 1.5, rng.uniform() * 3 - 1.5};
    benchmark::DoNotOptimize(blob->evaluate(p));
  }
}
BENCHMARK(BM_MeshSdf);

void BM_ExtractSphere(benchmark::State& state) {
  const Triangulation t = filled(20000, 8);
  std::vector<double> values(t.vertex_count());
  for (VertexId v = 0; v < values.size(); ++v) values[v] = norm(t.position(v) - Vec3{0.5, 0.5, 0.5}) - 0.3;
  for (auto _ : state) benchmark::DoNotOptimize(extract_mesh(t, values, 0.0).triangles.size());
}
BENCHMARK(BM_ExtractSphere)->Unit(benchmark::kMillisecond);

void BM_MarchingCubes(benchmark::State& state) {
  const auto torus = AnalyticField::torus(1.0, 0.25);
  const Box3 box{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
  for (auto _ : state)
    benchmark::DoNotOptimize(marching_cubes(*torus, box, static_cast<int>(state.range(0))).triangles.size());
}
BENCHMARK(BM_MarchingCubes)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_PipelineSphere(benchmark::State& state) {
  PipelineConfig c;
  c.tau = 1e-3;
  for (auto _ : state) {
    const auto sphere = AnalyticField::sphere(1.0);
    const RunResult r = run_pipeline(*sphere, c);
    state.counters["queries"] = static_cast<double>(r.queries);
  }
}
BENCHMARK(BM_PipelineSphere)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace
BENCHMARK_MAIN();
