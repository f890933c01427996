#pragma once

#include <array>
#include <filesystem>
#include <memory>
#include <vector>

#include "mcgrids/bvh.hpp"
#include "mcgrids/field.hpp"
#include "mcgrids/triangle_mesh.hpp"

namespace mcgrids {

/// Signed distance to a triangle mesh, negative inside.
class MeshSdf final : public ImplicitField {
 public:
  enum class SignPolicy {
    automatic,       // winding number when watertight, pseudo-normal otherwise
    pseudo_normal,   // angle-weighted pseudo-normal of the closest feature
    winding_number,  // generalized winding number > 1/2 means inside
    unsigned_distance,
  };

  /// Throws std::invalid_argument for a mesh without triangles.
  explicit MeshSdf(TriangleMesh mesh, SignPolicy policy = SignPolicy::automatic);

  Kind kind() const override { return Kind::mesh_sdf; }
  Box3 bounds() const override { return bounds_; }
  SignPolicy policy() const { return policy_; }
  bool watertight() const { return watertight_; }
  const TriangleMesh& mesh() const { return bvh_.mesh(); }

  /// Uncounted unsigned distance (for metrics and tests).
  double unsigned_distance(const Vec3& p) const;

 protected:
  double value(const Vec3& p) const override;

 private:
  TriangleBvh bvh_;
  SignPolicy policy_;
  bool watertight_ = false;
  Box3 bounds_;
  std::vector<Vec3> vertex_pseudo_normals_;
  std::vector<std::array<Vec3, 3>> edge_pseudo_normals_;  // per triangle, edge k = (f[k], f[k+1])
};

/// Trilinearly interpolated scalar grid over an axis-aligned box.
class SampledGrid final : public ImplicitField {
 public:
  /// values are x-fastest: index = x + nx * (y + ny * z); each count >= 2.
  SampledGrid(std::array<std::size_t, 3> resolution, Box3 bounds, std::vector<double> values);

  /// Reads a text header followed by little-endian float64 samples (see README).
  static std::shared_ptr<SampledGrid> load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  Kind kind() const override { return Kind::sampled_grid; }
  Box3 bounds() const override { return bounds_; }
  bool is_distance_like() const override { return false; }
  const std::array<std::size_t, 3>& resolution() const { return resolution_; }
  const std::vector<double>& values() const { return values_; }

 protected:
  double value(const Vec3& p) const override;

 private:
  std::array<std::size_t, 3> resolution_;
  Box3 bounds_;
  std::vector<double> values_;
};

}  // namespace mcgrids
