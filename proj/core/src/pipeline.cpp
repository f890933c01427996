#include "mcgrids/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mcgrids/extract.hpp"
#include "mcgrids/grid.hpp"
#include "mcgrids/sampler.hpp"

namespace mcgrids {
namespace {

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos == v.size()) return d;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config '" + key + "': not a number: " + v);
}

long parse_long(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long n = std::stol(v, &pos);
    if (pos == v.size()) return n;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config '" + key + "': not an integer: " + v);
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config '" + key + "': not a boolean: " + v);
}

}  // namespace

PipelineConfig PipelineConfig::resolved() const {
  PipelineConfig c = *this;
  const double diag = domain.diagonal();
  if (c.gamma < 0.0) c.gamma = 0.05 * diag;
  if (c.v_min < 0.0) c.v_min = std::pow(diag * std::ldexp(1.0, -10), 3);
  if (c.eps_merge < 0.0) c.eps_merge = 1e-7 * diag;
  if (c.eps_cvt < 0.0) c.eps_cvt = 1e-4 * diag;
  if (!c.cvt) c.cvt_iters = 0;
  return c;
}

void PipelineConfig::validate() const {
  if (!domain.valid()) throw std::invalid_argument("domain must be a box with positive volume");
  if (!std::isfinite(alpha)) throw std::invalid_argument("alpha must be finite");
  if (gamma == 0.0 || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
  if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (v_min == 0.0 || std::isnan(v_min)) throw std::invalid_argument("vmin must be positive");
  if (eps_merge == 0.0 || eps_cvt == 0.0) throw std::invalid_argument("tolerances must be positive");
  if (generation_iters < 0) throw std::invalid_argument("iters must be non-negative");
  if (batch_size < 1) throw std::invalid_argument("batch must be at least 1");
  if (cvt_iters < 0) throw std::invalid_argument("cvt-iters must be non-negative");
  if (max_refine_passes < 0) throw std::invalid_argument("max-passes must be non-negative");
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
  if (key == "domain") {
    std::vector<double> v;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(parse_double(key, item));
    if (v.size() == 1) {
      domain = {{-v[0], -v[0], -v[0]}, {v[0], v[0], v[0]}};
    } else if (v.size() == 6) {
      domain = {{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    } else {
      throw std::invalid_argument("config 'domain': expected 1 or 6 comma-separated numbers");
    }
  } else if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "gamma") gamma = parse_double(key, value);
  else if (key == "tau") tau = parse_double(key, value);
  else if (key == "vmin") v_min = parse_double(key, value);
  else if (key == "eps_merge") eps_merge = parse_double(key, value);
  else if (key == "eps_cvt") eps_cvt = parse_double(key, value);
  else if (key == "iters") generation_iters = static_cast<int>(parse_long(key, value));
  else if (key == "batch") batch_size = static_cast<int>(parse_long(key, value));
  else if (key == "cvt_iters") cvt_iters = static_cast<int>(parse_long(key, value));
  else if (key == "cvt") cvt = parse_bool(key, value);
  else if (key == "midpoint") midpoint_insertion = parse_bool(key, value);
  else if (key == "interleave") interleave = parse_bool(key, value);
  else if (key == "seed") seed = static_cast<std::uint64_t>(parse_long(key, value));
  else if (key == "max_passes") max_refine_passes = static_cast<int>(parse_long(key, value));
  else throw std::invalid_argument("unknown config key: " + key);
}

RunResult run_pipeline(const ImplicitField& field, const PipelineConfig& user_config,
                       const RunOutputs& outputs) {
  std::ostream* progress = outputs.progress;
  user_config.validate();
  const PipelineConfig cfg = user_config.resolved();
  cfg.validate();

  const Box3 fb = field.bounds();
  if (fb.valid() && !(cfg.domain.strictly_contains(fb.lo) && cfg.domain.strictly_contains(fb.hi)))
    throw std::invalid_argument("domain does not enclose the field's surface bounds");

  const auto t0 = std::chrono::steady_clock::now();
  RunResult result;
  result.config = cfg;
  const std::uint64_t q0 = field.query_count();
  auto queries = [&] { return field.query_count() - q0; };

  McGrid grid(cfg.domain, cfg.alpha, cfg.gamma, cfg.eps_merge);
  Triangulation& tri = grid.triangulation();
  grid.initialize(field);
  if (field.is_distance_like()) {
    for (VertexId v = 0; v < 8; ++v) {
      if (grid.density().value(v) <= cfg.alpha)
        throw std::invalid_argument("domain corner lies inside the surface; enlarge the domain");
    }
  }
  result.trace.push_back({"init", 0, queries(), tri.vertex_count(), tri.tet_count(), 8, 0, 0, 0.0});

  RngStream rng(cfg.seed);
  RefineParams rp;
  rp.tau = cfg.tau;
  rp.v_min = cfg.v_min;
  rp.cvt_iters = cfg.cvt_iters;
  rp.eps_cvt = cfg.eps_cvt;
  rp.midpoint_insertion = cfg.midpoint_insertion;
  Refiner refiner(rp);
  RngStream refine_rng = rng.split(1);

  auto refine_once = [&] {
    const PassReport r = refiner.pass(field, grid, refine_rng);
    result.passes.push_back(r);
    result.merges += r.merges;
    result.probe_queries += r.probes;
    result.max_residual = r.max_residual;
    result.trace.push_back({"refine", r.pass, queries(), tri.vertex_count(), tri.tet_count(),
                            r.insertions, r.crossing, r.bad, r.max_residual});
    if (progress) {
      *progress << "pass " << r.pass << " crossing " << r.crossing << " probes " << r.probes
                << " bad " << r.bad << " inserted " << r.insertions << " max_residual "
                << r.max_residual << '\n';
    }
  };

  // Phase A: Monte Carlo generation.
  RngStream gen_rng = rng.split(0);
  for (int it = 1; it <= cfg.generation_iters; ++it) {
    const SampleBatch batch = sample_batch(grid.density(), tri, gen_rng, cfg.batch_size);
    result.sample_rejections += batch.rejected;
    std::vector<VertexId> inserted;
    std::vector<Vec3> points;
    for (const Sample& s : batch.samples) {
      const McGrid::Insertion ins = grid.insert(s.point, cfg.cvt_iters, cfg.eps_cvt);
      if (!ins.vertex) {
        ++result.merges;
        continue;
      }
      inserted.push_back(*ins.vertex);
      points.push_back(ins.position);
    }
    grid.commit(inserted, field.evaluate_batch(points));
    result.generation_queries += points.size();
    result.trace.push_back({"generate", it, queries(), tri.vertex_count(), tri.tet_count(),
                            inserted.size(), 0, 0, 0.0});
    if (progress) {
      *progress << "iteration " << it << " inserted " << inserted.size() << " vertices "
                << tri.vertex_count() << " queries " << queries() << '\n';
    }
    if (cfg.interleave) refine_once();
    if (batch.exhausted) break;
  }

  // Phase B: refinement.
  while (static_cast<int>(result.passes.size()) < cfg.max_refine_passes) {
    refine_once();
    if (refiner.terminated()) break;
  }
  result.converged = refiner.terminated();

  // Phase C: extraction.
  result.mesh = extract_mesh(tri, grid.density().values(), cfg.alpha);
  result.queries = queries();
  result.vertices = tri.vertex_count();
  result.tets = tri.tet_count();
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  result.peak_memory = peak_memory_bytes();
  if (outputs.grid) write_grid(*outputs.grid, grid);
  if (outputs.pdf) grid.density().write_table(*outputs.pdf);
  return result;
}

void write_report(std::ostream& out, const RunResult& r, const std::string& field_spec,
                  const std::optional<QualityReport>& quality) {
  const PipelineConfig& c = r.config;
  const auto old = out.precision(10);
  const MeshTopology topo = analyze_topology(r.mesh);
  out << "method = mcgrids\n";
  out << "field = " << field_spec << '\n';
  out << "domain = " << c.domain.lo.x << ',' << c.domain.lo.y << ',' << c.domain.lo.z << ','
      << c.domain.hi.x << ',' << c.domain.hi.y << ',' << c.domain.hi.z << '\n';
  out << "alpha = " << c.alpha << "\ngamma = " << c.gamma << "\ntau = " << c.tau
      << "\nvmin = " << c.v_min << "\neps_merge = " << c.eps_merge << "\neps_cvt = " << c.eps_cvt
      << "\niters = " << c.generation_iters << "\nbatch = " << c.batch_size
      << "\ncvt_iters = " << c.cvt_iters << "\nmidpoint = " << (c.midpoint_insertion ? "true" : "false")
      << "\ninterleave = " << (c.interleave ? "true" : "false") << "\nseed = " << c.seed
      << "\nmax_passes = " << c.max_refine_passes << '\n';
  out << "queries = " << r.queries << "\ngeneration_queries = " << r.generation_queries
      << "\nprobe_queries = " << r.probe_queries << "\ngrid_vertices = " << r.vertices
      << "\ngrid_tets = " << r.tets << "\nrefine_passes = " << r.passes.size()
      << "\nmerges = " << r.merges << "\nsample_rejections = " << r.sample_rejections
      << "\nconverged = " << (r.converged ? "true" : "false")
      << "\nmax_residual = " << r.max_residual << '\n';
  if (!r.converged) out << "warning = residual above tau\n";
  out << "mesh_vertices = " << r.mesh.vertices.size() << "\nmesh_triangles = " << r.mesh.triangles.size()
      << "\nboundary_edges = " << topo.boundary_edges << "\ncomponents = " << topo.components
      << "\neuler_characteristic = " << topo.euler_characteristic() << '\n';
  if (quality) {
    out << "metric_frame = reference bounding box scaled to unit longest side\n";
    out << "cd = " << quality->cd << "\nnc = " << quality->nc << "\necd = " << quality->ecd
        << "\nf1 = " << quality->f1 << "\nef1 = " << quality->ef1 << '\n';
  }
  out.precision(old);
}

void write_timing(std::ostream& out, const RunResult& r) {
  out << "wall_time_s = " << r.wall_seconds << "\npeak_memory_bytes = " << r.peak_memory << '\n';
}

void write_trace(std::ostream& out, const RunResult& r) {
  const auto old = out.precision(10);
  out << "# phase index queries vertices tets inserted crossing bad max_residual\n";
  for (const TraceRow& t : r.trace) {
    out << t.phase << ' ' << t.index << ' ' << t.queries << ' ' << t.vertices << ' ' << t.tets << ' '
        << t.inserted << ' ' << t.crossing << ' ' << t.bad << ' ' << t.max_residual << '\n';
  }
  out.precision(old);
}

}  // namespace mcgrids
