#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mcgrids/bvh.hpp"
#include "mcgrids/triangle_mesh.hpp"

namespace mcgrids {

struct SurfaceSamples {
  std::vector<Vec3> points;
  std::vector<Vec3> normals;  // unit normal of the source triangle
};

/// Area-uniform samples on the surface.
SurfaceSamples sample_surface(const TriangleMesh& mesh, std::size_t n, std::uint64_t seed);

/// Length-uniform samples along edges whose dihedral angle exceeds
/// angle_deg. Boundary edges are not sharp edges. Empty when there are none.
std::vector<Vec3> sample_sharp_edges(const TriangleMesh& mesh, std::size_t n, double angle_deg,
                                     std::uint64_t seed);

/// Static 3-d tree for nearest-neighbour queries over a point set.
class PointKdTree {
 public:
  explicit PointKdTree(std::span<const Vec3> points);
  bool empty() const { return points_.empty(); }
  /// (index, squared distance) of the nearest point; the tree must be non-empty.
  std::pair<std::size_t, double> nearest(const Vec3& q) const;

 private:
  void build(std::size_t begin, std::size_t end, int depth);
  void search(std::size_t begin, std::size_t end, int depth, const Vec3& q, std::size_t& best,
              double& best_d2) const;

  std::vector<Vec3> points_;
  std::vector<std::size_t> index_;
};

struct MetricParams {
  std::size_t n_samples = 100000;
  double f1_ratio = 0.003;        // F1 distance threshold as a fraction of the bbox diagonal
  double edge_angle_deg = 30.0;
  std::uint64_t seed = 0;
};

/// Quality of `candidate` against `reference`. Both meshes are first mapped
/// by the same similarity that takes the reference bounding box to a box of
/// unit longest side centred at the origin.
struct QualityReport {
  double cd = 0.0;   // symmetric mean squared point-to-surface distance
  double nc = 0.0;   // mean |cos| between sample normals and nearest-face normals
  double ecd = 0.0;  // chamfer over sharp-edge samples
  double f1 = 0.0;
  double ef1 = 0.0;
};

QualityReport evaluate_quality(const TriangleMesh& candidate, const TriangleMesh& reference,
                               const MetricParams& params = {});

// Individual metrics on meshes already in a common frame. All throw
// std::invalid_argument for an empty mesh.
double chamfer_l2(const TriangleMesh& a, const TriangleMesh& b, const MetricParams& params = {});
double normal_consistency(const TriangleMesh& a, const TriangleMesh& b, const MetricParams& params = {});
double f1_score(const TriangleMesh& a, const TriangleMesh& b, double dist_thresh,
                const MetricParams& params = {});
/// (ECD, EF1). Both edge sets empty: (0, 1). Exactly one empty: ECD is the
/// mean squared distance from the non-empty samples to the other surface and
/// EF1 is 0.
std::pair<double, double> edge_metrics(const TriangleMesh& a, const TriangleMesh& b,
                                       double angle_deg, double dist_thresh,
                                       const MetricParams& params = {});

/// Peak resident set size of this process in bytes (0 when unavailable).
std::size_t peak_memory_bytes();

}  // namespace mcgrids
