#include "mcgrids/metrics.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "mcgrids/sampler.hpp"

namespace mcgrids {
namespace {

void require_non_empty(const TriangleMesh& m) {
  if (m.triangles.empty()) throw std::invalid_argument("metric needs a non-empty mesh");
}

std::vector<double> squared_distances(const std::vector<Vec3>& pts, const TriangleBvh& bvh) {
  std::vector<double> d(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) d[i] = bvh.closest(pts[i]).closest.squared_distance;
  return d;
}

double mean(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double fraction_within(const std::vector<double>& d2, double thresh) {
  if (d2.empty()) return 0.0;
  const double t2 = thresh * thresh;
  const auto n = std::count_if(d2.begin(), d2.end(), [&](double d) { return d < t2; });
  return static_cast<double>(n) / static_cast<double>(d2.size());
}

double harmonic(double p, double r) { return p + r > 0.0 ? 2.0 * p * r / (p + r) : 0.0; }

}  // namespace

SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed) {
  require_non_empty(mesh);
  std::vector<double> cdf(mesh.triangles.size());
  double acc = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    acc += mesh.face_area(t);
    cdf[t] = acc;
  }
  SurfaceSamples s;
  if (!(acc > 0.0)) return s;
  s.points.reserve(n);
  s.normals.reserve(n);
  RngStream rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform() * acc;
    std::size_t t = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    t = std::min(t, cdf.size() - 1);
    const Triangle& f = mesh.triangles[t];
    const double r1 = std::sqrt(rng.uniform()), r2 = rng.uniform();
    const Vec3 p = mesh.vertices[f[0]] * (1.0 - r1) + mesh.vertices[f[1]] * (r1 * (1.0 - r2)) +
                   mesh.vertices[f[2]] * (r1 * r2);
    s.points.push_back(p);
    s.normals.push_back(mesh.face_normal(t));
  }
  return s;
}

std::vector<Vec3> sample_sharp_edges(const TriangleMesh& mesh, std::size_t n, double angle_deg,
                                     std::uint64_t seed) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::size_t>> faces;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& f = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) faces[std::minmax(f[k], f[(k + 1) % 3])].push_back(t);
  }
  const double cos_thresh = std::cos(angle_deg * std::numbers::pi / 180.0);
  std::vector<std::pair<Vec3, Vec3>> sharp;
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& [e, fs] : faces) {
    if (fs.size() != 2) continue;
    if (dot(mesh.face_normal(fs[0]), mesh.face_normal(fs[1])) >= cos_thresh) continue;
    const Vec3 a = mesh.vertices[e.first], b = mesh.vertices[e.second];
    acc += distance(a, b);
    sharp.emplace_back(a, b);
    cdf.push_back(acc);
  }
  std::vector<Vec3> out;
  if (sharp.empty() || !(acc > 0.0)) return out;
  RngStream rng(seed);
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t k = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), rng.uniform() * acc) - cdf.begin());
    k = std::min(k, cdf.size() - 1);
    out.push_back(lerp(sharp[k].first, sharp[k].second, rng.uniform()));
  }
  return out;
}

PointKdTree::PointKdTree(std::span<const Vec3> points) : points_(points.begin(), points.end()) {
  index_.resize(points_.size());
  std::iota(index_.begin(), index_.end(), std::size_t{0});
  build(0, index_.size(), 0);
}

void PointKdTree::build(std::size_t begin, std::size_t end, int depth) {
  if (end - begin <= 1) return;
  const int axis = depth % 3;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  build(begin, mid, depth + 1);
  build(mid + 1, end, depth + 1);
}

void PointKdTree::search(std::size_t begin, std::size_t end, int depth, const Vec3& q,
                         std::size_t& best, double& best_d2) const {
  if (begin >= end) return;
  const std::size_t mid = begin + (end - begin) / 2;
  const std::size_t i = index_[mid];
  const double d2 = squared_distance(points_[i], q);
  if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
    best_d2 = d2;
    best = i;
  }
  const int axis = depth % 3;
  const double diff = q[axis] - points_[i][axis];
  const bool left_first = diff < 0.0;
  if (left_first) search(begin, mid, depth + 1, q, best, best_d2);
  else search(mid + 1, end, depth + 1, q, best, best_d2);
  if (diff * diff <= best_d2) {
    if (left_first) search(mid + 1, end, depth + 1, q, best, best_d2);
    else search(begin, mid, depth + 1, q, best, best_d2);
  }
}

std::pair<std::size_t, double> PointKdTree::nearest(const Vec3& q) const {
  if (points_.empty()) throw std::logic_error("nearest neighbour query on an empty tree");
  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  search(0, index_.size(), 0, q, best, best_d2);
  return {best, best_d2};
}

double chamfer_l2(const TriangleMesh& a, const TriangleMesh& b, const MetricParams& params) {
  require_non_empty(a);
  require_non_empty(b);
  const TriangleBvh ba(a), bb(b);
  const SurfaceSamples sa = sample_surface(a, params.n_samples, params.seed);
  const SurfaceSamples sb = sample_surface(b, params.n_samples, params.seed + 1);
  return 0.5 * (mean(squared_distances(sa.points, bb)) + mean(squared_distances(sb.points, ba)));
}

double normal_consistency(const TriangleMesh& a, const TriangleMesh& b, const MetricParams& params) {
  require_non_empty(a);
  require_non_empty(b);
  const TriangleBvh ba(a), bb(b);
  auto one_way = [&](const SurfaceSamples& s, const TriangleBvh& other) {
    double sum = 0.0;
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      const auto hit = other.closest(s.points[i]);
      sum += std::abs(dot(s.normals[i], other.mesh().face_normal(hit.triangle)));
    }
    return s.points.empty() ? 0.0 : sum / static_cast<double>(s.points.size());
  };
  const SurfaceSamples sa = sample_surface(a, params.n_samples, params.seed);
  const SurfaceSamples sb = sample_surface(b, params.n_samples, params.seed + 1);
  return 0.5 * (one_way(sa, bb) + one_way(sb, ba));
}

double f1_score(const TriangleMesh& a, const TriangleMesh& b, double dist_thresh,
                const MetricParams& params) {
  require_non_empty(a);
  require_non_empty(b);
  const TriangleBvh ba(a), bb(b);
  const SurfaceSamples sa = sample_surface(a, params.n_samples, params.seed);
  const SurfaceSamples sb = sample_surface(b, params.n_samples, params.seed + 1);
  const double precision = fraction_within(squared_distances(sa.points, bb), dist_thresh);
  const double recall = fraction_within(squared_distances(sb.points, ba), dist_thresh);
  return harmonic(precision, recall);
}

std::pair<double, double> edge_metrics(const TriangleMesh& a, const TriangleMesh& b,
                                       double angle_deg, double dist_thresh,
                                       const MetricParams& params) {
  require_non_empty(a);
  require_non_empty(b);
  const std::vector<Vec3> ea = sample_sharp_edges(a, params.n_samples, angle_deg, params.seed + 2);
  const std::vector<Vec3> eb = sample_sharp_edges(b, params.n_samples, angle_deg, params.seed + 3);
  if (ea.empty() && eb.empty()) return {0.0, 1.0};
  if (ea.empty() || eb.empty()) {
    const TriangleBvh other(ea.empty() ? a : b);
    return {mean(squared_distances(ea.empty() ? eb : ea, other)), 0.0};
  }
  const PointKdTree ta(ea), tb(eb);
  std::vector<double> dab(ea.size()), dba(eb.size());
  for (std::size_t i = 0; i < ea.size(); ++i) dab[i] = tb.nearest(ea[i]).second;
  for (std::size_t i = 0; i < eb.size(); ++i) dba[i] = ta.nearest(eb[i]).second;
  const double ecd = 0.5 * (mean(dab) + mean(dba));
  return {ecd, harmonic(fraction_within(dab, dist_thresh), fraction_within(dba, dist_thresh))};
}

QualityReport evaluate_quality(const TriangleMesh& candidate, const TriangleMesh& reference,
                               const MetricParams& params) {
  require_non_empty(candidate);
  require_non_empty(reference);
  const Box3 box = reference.bounds();
  const Vec3 e = box.extent();
  const double longest = std::max({e.x, e.y, e.z});
  if (!(longest > 0.0)) throw std::invalid_argument("reference mesh has a degenerate bounding box");
  TriangleMesh a = candidate, b = reference;
  a.apply(-box.center(), 1.0 / longest);
  b.apply(-box.center(), 1.0 / longest);
  const double thresh = params.f1_ratio * norm(e / longest);

  QualityReport r;
  const TriangleBvh ba(a), bb(b);
  const SurfaceSamples sa = sample_surface(a, params.n_samples, params.seed);
  const SurfaceSamples sb = sample_surface(b, params.n_samples, params.seed + 1);
  std::vector<double> dab(sa.points.size()), dba(sb.points.size());
  double nab = 0.0, nba = 0.0;
  for (std::size_t i = 0; i < sa.points.size(); ++i) {
    const auto hit = bb.closest(sa.points[i]);
    dab[i] = hit.closest.squared_distance;
    nab += std::abs(dot(sa.normals[i], b.face_normal(hit.triangle)));
  }
  for (std::size_t i = 0; i < sb.points.size(); ++i) {
    const auto hit = ba.closest(sb.points[i]);
    dba[i] = hit.closest.squared_distance;
    nba += std::abs(dot(sb.normals[i], a.face_normal(hit.triangle)));
  }
  r.cd = 0.5 * (mean(dab) + mean(dba));
  r.nc = 0.5 * (nab / static_cast<double>(std::max<std::size_t>(1, sa.points.size())) +
                nba / static_cast<double>(std::max<std::size_t>(1, sb.points.size())));
  r.f1 = harmonic(fraction_within(dab, thresh), fraction_within(dba, thresh));
  std::tie(r.ecd, r.ef1) = edge_metrics(a, b, params.edge_angle_deg, thresh, params);
  return r;
}

std::size_t peak_memory_bytes() {
  rusage usage{};
  if (getrusage(RUSAGE_SELF, &usage) != 0) return 0;
  return static_cast<std::size_t>(usage.ru_maxrss) * 1024;
}

}  // namespace mcgrids
