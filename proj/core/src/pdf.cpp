#include "mcgrids/pdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "mcgrids/voronoi.hpp"

namespace mcgrids {

double vertex_density(double f, double alpha, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  return 1.0 / (gamma + std::abs(f - alpha));
}

DensityState::DensityState(double alpha, double gamma) : alpha_(alpha), gamma_(gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw std::invalid_argument("gamma must be positive");
  if (!std::isfinite(alpha)) throw std::invalid_argument("iso-value must be finite");
}

void DensityState::grow(VertexId v) {
  if (v < f_.size()) return;
  const std::size_t n = static_cast<std::size_t>(v) + 1;
  f_.resize(n, std::numeric_limits<double>::quiet_NaN());
  has_value_.resize(n, 0);
  volume_.resize(n, 0.0);
  kappa_.resize(n, 1.0);
  trimmed_.resize(n, 0);
}

void DensityState::set_value(VertexId v, double f) {
  if (!std::isfinite(f)) throw std::domain_error("field value must be finite");
  grow(v);
  f_[v] = f;
  has_value_[v] = 1;
  dirty_ = true;
}

void DensityState::set_volume(VertexId v, double volume) {
  grow(v);
  volume_[v] = volume;
  dirty_ = true;
}

void DensityState::set_multiplier(VertexId v, double kappa) {
  if (!(kappa >= 0.0)) throw std::invalid_argument("density multiplier must be non-negative");
  grow(v);
  kappa_[v] = kappa;
  dirty_ = true;
}

void DensityState::set_trimmed(VertexId v, bool trimmed) {
  grow(v);
  if (trimmed_[v] != static_cast<char>(trimmed)) dirty_ = true;
  trimmed_[v] = trimmed;
}

void DensityState::set_trimmed(std::span<const VertexId> verts) {
  for (VertexId v : verts) set_trimmed(v, true);
}

double DensityState::density(VertexId v) const {
  if (!has_value(v) || trimmed_[v]) return 0.0;
  return kappa_[v] / (gamma_ + std::abs(f_[v] - alpha_));
}

double DensityState::probability(VertexId v) const { return density(v) * volume_[v]; }

double DensityState::normalized_probability(VertexId v) const {
  rebuild();
  return total_ > 0.0 ? probability(v) / total_ : 0.0;
}

void DensityState::rebuild() const {
  if (!dirty_) return;
  active_.clear();
  cdf_.clear();
  double sum = 0.0;
  for (VertexId v = 0; v < f_.size(); ++v) {
    const double p = probability(v);
    if (p > 0.0) {
      sum += p;
      active_.push_back(v);
      cdf_.push_back(sum);
    }
  }
  total_ = sum;
  for (double& c : cdf_) c /= sum;
  if (!cdf_.empty()) cdf_.back() = 1.0;
  dirty_ = false;
}

std::span<const VertexId> DensityState::active_cells() const {
  rebuild();
  return active_;
}

std::span<const double> DensityState::cdf() const {
  rebuild();
  return cdf_;
}

std::optional<VertexId> DensityState::cdf_lookup(double u) const {
  rebuild();
  if (active_.empty()) return std::nullopt;
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  const std::size_t k = std::min(static_cast<std::size_t>(it - cdf_.begin()), cdf_.size() - 1);
  return active_[k];
}

void DensityState::write_table(std::ostream& out) const {
  const auto old = out.precision(17);
  out << "# id f d p\n";
  for (VertexId v = 0; v < f_.size(); ++v) {
    if (!has_value_[v]) continue;
    out << v << ' ' << f_[v] << ' ' << density(v) << ' ' << normalized_probability(v) << '\n';
  }
  out.precision(old);
}

std::vector<VertexId> update_after_insert(DensityState& state, const Triangulation& t, VertexId v,
                                          double f_value) {
  state.set_value(v, f_value);
  std::vector<VertexId> affected = t.affected_vertices(v);
  for (VertexId w : affected) state.set_volume(w, voronoi_cell(t, w).volume);
  return affected;
}

void rebuild_volumes(DensityState& state, const Triangulation& t) {
  for (VertexId v = 0; v < t.vertex_count(); ++v) state.set_volume(v, voronoi_cell(t, v).volume);
}

}  // namespace mcgrids
