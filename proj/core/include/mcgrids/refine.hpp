#pragma once

#include <cstdint>
#include <vector>

#include "mcgrids/field.hpp"
#include "mcgrids/grid.hpp"
#include "mcgrids/sampler.hpp"

namespace mcgrids {

struct RefineParams {
  double tau = 1e-3;          // midpoint residual tolerance, field units
  double v_min = 0.0;         // tets at or below this volume are not refined
  int cvt_iters = 3;
  double eps_cvt = 0.0;
  /// When false, each pass draws as many samples from the trimmed density as
  /// there are inaccurate tets instead of inserting their midpoints.
  bool midpoint_insertion = true;
};

struct PassReport {
  int pass = 0;
  std::size_t crossing = 0;    // tets whose values straddle the iso-value
  std::size_t probes = 0;      // midpoints evaluated this pass
  std::size_t reused = 0;      // crossing tets whose residual was cached
  std::size_t small = 0;       // crossing tets skipped for being at or below v_min
  std::size_t bad = 0;         // tets that need refinement
  std::size_t insertions = 0;
  std::size_t merges = 0;
  std::size_t trimmed = 0;     // vertices with zero density after this pass
  std::size_t queries = 0;     // field evaluations made by this pass
  double max_residual = 0.0;   // over probed or cached crossing tets
};

/// The refinement loop state: cached midpoint probes per tet and the tets
/// whose midpoint could not be inserted.
class Refiner {
 public:
  explicit Refiner(const RefineParams& params);

  const RefineParams& params() const { return params_; }

  /// One pass: probe, trim, insert. The rng is only used when midpoint
  /// insertion is disabled.
  PassReport pass(const ImplicitField& field, McGrid& grid, RngStream& rng);

  /// True once a pass found no tet needing refinement.
  bool terminated() const { return terminated_; }
  int passes() const { return passes_; }

 private:
  struct Probe {
    std::uint64_t stamp = 0;  // 0: no probe cached
    Vec3 midpoint;
    double value = 0.0;
    double residual = 0.0;
    std::uint64_t blocked_stamp = 0;
  };

  RefineParams params_;
  std::vector<Probe> probes_;
  bool terminated_ = false;
  int passes_ = 0;
};

}  // namespace mcgrids
