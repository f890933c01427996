#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mcgrids/delaunay.hpp"

namespace mcgrids {

/// 1 / (gamma + |f - alpha|). Throws std::invalid_argument when gamma <= 0.
double vertex_density(double f, double alpha, double gamma);

/// Per-vertex field values, densities and cell probabilities, plus the
/// discrete CDF over cells with non-zero probability.
///
/// The unnormalized probability of cell i is kappa_i * d_i * volume_i, where
/// kappa_i defaults to 1 and d_i is zero for trimmed vertices.
class DensityState {
 public:
  DensityState(double alpha, double gamma);

  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  std::size_t size() const { return f_.size(); }

  /// Records the field value of v, growing the state as needed.
  void set_value(VertexId v, double f);
  void set_volume(VertexId v, double volume);
  void set_multiplier(VertexId v, double kappa);
  void set_trimmed(VertexId v, bool trimmed);
  void set_trimmed(std::span<const VertexId> verts);

  bool has_value(VertexId v) const { return v < f_.size() && has_value_[v]; }
  double value(VertexId v) const { return f_[v]; }
  /// NaN for vertices without a value.
  std::span<const double> values() const { return f_; }
  bool trimmed(VertexId v) const { return v < trimmed_.size() && trimmed_[v]; }
  double volume(VertexId v) const { return volume_[v]; }
  double density(VertexId v) const;
  /// Unnormalized p(i).
  double probability(VertexId v) const;
  /// p(i) divided by the sum over all cells; 0 when no cell is active.
  double normalized_probability(VertexId v) const;

  /// Cells with p > 0, ascending by id, and the matching prefix sums ending
  /// at exactly 1. Rebuilt lazily after any mutation.
  std::span<const VertexId> active_cells() const;
  std::span<const double> cdf() const;

  /// Cell whose left-closed CDF bin contains u in [0, 1); nullopt when no
  /// cell is active.
  std::optional<VertexId> cdf_lookup(double u) const;

  /// Text table "id f d p" for plotting.
  void write_table(std::ostream& out) const;

 private:
  void grow(VertexId v);
  void rebuild() const;

  double alpha_;
  double gamma_;
  std::vector<double> f_;
  std::vector<char> has_value_;
  std::vector<double> volume_;
  std::vector<double> kappa_;
  std::vector<char> trimmed_;

  mutable bool dirty_ = true;
  mutable std::vector<VertexId> active_;
  mutable std::vector<double> cdf_;
  mutable double total_ = 0.0;
};

/// Recomputes the cell volume of v and each of its Delaunay neighbours.
/// Returns the vertices that were updated.
std::vector<VertexId> update_after_insert(DensityState& state, const Triangulation& t, VertexId v,
                                          double f_value);

/// Recomputes every cell volume from scratch.
void rebuild_volumes(DensityState& state, const Triangulation& t);

}  // namespace mcgrids
