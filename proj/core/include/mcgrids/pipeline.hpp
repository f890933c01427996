#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcgrids/field.hpp"
#include "mcgrids/metrics.hpp"
#include "mcgrids/refine.hpp"
#include "mcgrids/triangle_mesh.hpp"

namespace mcgrids {

/// Every tunable of a run. Negative tolerances select their defaults, which
/// scale with the domain diagonal.
struct PipelineConfig {
  Box3 domain{{-1.5, -1.5, -1.5}, {1.5, 1.5, 1.5}};
  double alpha = 0.0;
  double gamma = -1.0;       // default 0.05 * diagonal
  double tau = 1e-3;
  double v_min = -1.0;       // default (diagonal * 2^-10)^3
  double eps_merge = -1.0;   // default 1e-7 * diagonal
  double eps_cvt = -1.0;     // default 1e-4 * diagonal
  int generation_iters = 20;
  int batch_size = 64;
  int cvt_iters = 3;
  bool cvt = true;
  bool midpoint_insertion = true;
  bool interleave = false;   // also run a refine pass after each generation iteration
  std::uint64_t seed = 0;
  int max_refine_passes = 200;

  /// Copy with every default resolved against the domain.
  PipelineConfig resolved() const;
  /// Throws std::invalid_argument describing the first bad value.
  void validate() const;
  /// Sets a field by its config-file key ("tau", "batch", "domain", ...).
  /// Throws std::invalid_argument for unknown keys or unparsable values.
  void set(const std::string& key, const std::string& value);
};

struct TraceRow {
  std::string phase;  // "init", "generate" or "refine"
  int index = 0;
  std::uint64_t queries = 0;  // cumulative
  std::size_t vertices = 0;
  std::size_t tets = 0;
  std::size_t inserted = 0;
  std::size_t crossing = 0;
  std::size_t bad = 0;
  double max_residual = 0.0;
};

struct RunResult {
  PipelineConfig config;  // resolved
  TriangleMesh mesh;
  std::vector<TraceRow> trace;
  std::vector<PassReport> passes;
  std::uint64_t queries = 0;
  std::uint64_t generation_queries = 0;
  std::uint64_t probe_queries = 0;
  std::size_t vertices = 0;
  std::size_t tets = 0;
  std::size_t sample_rejections = 0;
  std::size_t merges = 0;
  bool converged = false;
  double max_residual = 0.0;
  double wall_seconds = 0.0;
  std::size_t peak_memory = 0;
};

/// Optional side outputs of a run; null streams are skipped.
struct RunOutputs {
  std::ostream* progress = nullptr;  // one line per iteration and pass
  std::ostream* grid = nullptr;      // final grid: "v x y z f" then "t a b c d" (1-based)
  std::ostream* pdf = nullptr;       // final per-vertex density table
};

/// Generation iterations, refinement passes, then marching tetrahedra. The
/// query count is the field counter's delta over the run.
RunResult run_pipeline(const ImplicitField& field, const PipelineConfig& config,
                       const RunOutputs& outputs = {});

/// Key-value report. Leaves out wall time and memory so that identical runs
/// give identical bytes.
void write_report(std::ostream& out, const RunResult& result, const std::string& field_spec,
                  const std::optional<QualityReport>& quality = std::nullopt);
void write_timing(std::ostream& out, const RunResult& result);
void write_trace(std::ostream& out, const RunResult& result);

}  // namespace mcgrids
