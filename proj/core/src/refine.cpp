#include "mcgrids/refine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mcgrids/extract.hpp"

namespace mcgrids {

Refiner::Refiner(const RefineParams& params) : params_(params) {
  if (!(params_.tau > 0.0)) throw std::invalid_argument("tau must be positive");
  if (!(params_.v_min >= 0.0)) throw std::invalid_argument("v_min must be non-negative");
  if (params_.cvt_iters < 0) throw std::invalid_argument("CVT iteration count must be non-negative");
}

PassReport Refiner::pass(const ImplicitField& field, McGrid& grid, RngStream& rng) {
  Triangulation& tri = grid.triangulation();
  DensityState& density = grid.density();
  const double alpha = density.alpha();
  const std::span<const double> values = density.values();

  PassReport report;
  report.pass = ++passes_;
  const std::uint64_t queries_before = field.query_count();
  if (probes_.size() < tri.tet_capacity()) probes_.resize(tri.tet_capacity());

  std::vector<TetId> crossing;
  std::vector<TetId> to_probe;
  std::vector<char> near_surface(tri.vertex_count(), 0);
  tri.for_each_tet([&](TetId t, const Tetrahedron& tet) {
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) f[i] = values[tet.v[i]];
    if (!surface_crossing(f, alpha)) return;
    crossing.push_back(t);
    for (VertexId v : tet.v) near_surface[v] = 1;
    if (!tri.tet_touches_corner(t) && tri.tet_volume(t) <= params_.v_min) {
      ++report.small;
      return;
    }
    if (probes_[t].stamp == tri.tet_stamp(t)) {
      ++report.reused;
    } else {
      to_probe.push_back(t);
    }
  });
  report.crossing = crossing.size();

  // Midpoint probes, one batch.
  std::vector<Vec3> mids;
  mids.reserve(to_probe.size());
  for (TetId t : to_probe) {
    std::array<double, 4> f{};
    for (int i = 0; i < 4; ++i) f[i] = values[tri.tet(t).v[i]];
    mids.push_back(tet_midpoint(tri.tet_positions(t), f, alpha));
  }
  const std::vector<double> mid_values = field.evaluate_batch(mids);
  for (std::size_t k = 0; k < to_probe.size(); ++k) {
    Probe& pr = probes_[to_probe[k]];
    pr.stamp = tri.tet_stamp(to_probe[k]);
    pr.midpoint = mids[k];
    pr.value = mid_values[k];
    pr.residual = std::abs(mid_values[k] - alpha);
  }
  report.probes = to_probe.size();

  // Trimming: a vertex keeps its density only while it touches a crossing tet.
  for (VertexId v = 0; v < tri.vertex_count(); ++v) {
    density.set_trimmed(v, !near_surface[v]);
    report.trimmed += !near_surface[v];
  }

  // Crossing tets touching a domain corner are never extracted. When all
  // corners lie on one side the surface is closed inside the domain, so such
  // tets are refined regardless of residual to keep the mesh closed. With
  // mixed corner signs the surface leaves the box through corner-only
  // boundary faces and those tets can never be refined away.
  bool corners_one_side = true;
  for (VertexId v = 1; v < 8; ++v) {
    corners_one_side = corners_one_side && (classify_value(values[v], alpha) > alpha) ==
                                               (classify_value(values[0], alpha) > alpha);
  }

  // Tets needing refinement, in id order.
  std::vector<TetId> bad;
  for (TetId t : crossing) {
    const Probe& pr = probes_[t];
    if (pr.stamp != tri.tet_stamp(t)) continue;  // small tet, never probed
    report.max_residual = std::max(report.max_residual, pr.residual);
    if (pr.blocked_stamp == pr.stamp) continue;
    if (pr.residual > params_.tau || (corners_one_side && tri.tet_touches_corner(t)))
      bad.push_back(t);
  }
  report.bad = bad.size();
  terminated_ = bad.empty();
  if (terminated_) {
    report.queries = field.query_count() - queries_before;
    return report;
  }

  std::vector<VertexId> inserted;
  std::vector<double> known;
  std::vector<std::size_t> pending;  // indices into inserted needing evaluation
  std::vector<Vec3> pending_points;
  auto add = [&](const Vec3& p, const double* value, Probe* origin) {
    const McGrid::Insertion ins = grid.insert(p, params_.cvt_iters, params_.eps_cvt);
    if (!ins.vertex) {
      ++report.merges;
      if (origin) origin->blocked_stamp = origin->stamp;
      return;
    }
    inserted.push_back(*ins.vertex);
    if (value && !ins.moved) {
      known.push_back(*value);
    } else {
      known.push_back(0.0);
      pending.push_back(inserted.size() - 1);
      pending_points.push_back(ins.position);
    }
  };

  if (params_.midpoint_insertion) {
    // Snapshot first: inserting recycles tet slots.
    std::vector<Probe> snapshot;
    for (TetId t : bad) snapshot.push_back(probes_[t]);
    for (std::size_t k = 0; k < bad.size(); ++k) {
      // Only block the original tet, not a later occupant of its slot.
      const bool same = tri.is_alive(bad[k]) && tri.tet_stamp(bad[k]) == snapshot[k].stamp;
      Probe* live = same ? &probes_[bad[k]] : nullptr;
      add(snapshot[k].midpoint, &snapshot[k].value, live);
    }
  } else {
    const SampleBatch batch = sample_batch(density, tri, rng, bad.size());
    for (const Sample& s : batch.samples) add(s.point, nullptr, nullptr);
  }

  const std::vector<double> fresh = field.evaluate_batch(pending_points);
  for (std::size_t k = 0; k < pending.size(); ++k) known[pending[k]] = fresh[k];
  grid.commit(inserted, known);
  if (probes_.size() < tri.tet_capacity()) probes_.resize(tri.tet_capacity());

  report.insertions = inserted.size();
  report.queries = field.query_count() - queries_before;
  return report;
}

}  // namespace mcgrids
