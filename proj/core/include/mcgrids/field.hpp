#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcgrids/vec3.hpp"

namespace mcgrids {

/// Scalar field f: R^3 -> R with an exact, thread-safe query counter.
///
/// Every call to evaluate() counts as one query and every point of an
/// evaluate_batch() call counts as one query. Subclasses implement value().
class ImplicitField {
 public:
  enum class Kind { analytic_primitive, csg_composite, mesh_sdf, sampled_grid };

  virtual ~ImplicitField() = default;

  /// Throws std::domain_error for non-finite input.
  double evaluate(const Vec3& p) const;
  std::vector<double> evaluate_batch(std::span<const Vec3> ps) const;

  std::uint64_t query_count() const { return queries_.load(std::memory_order_relaxed); }

  virtual Kind kind() const = 0;
  /// Axis-aligned box enclosing the zero level set, when the field knows one.
  virtual Box3 bounds() const = 0;
  /// True when |f| approximates Euclidean distance to the surface.
  virtual bool is_distance_like() const { return true; }

 protected:
  ImplicitField() = default;
  ImplicitField(const ImplicitField&) = delete;
  ImplicitField& operator=(const ImplicitField&) = delete;

  /// Uncounted evaluation; must be deterministic and safe to call concurrently.
  virtual double value(const Vec3& p) const = 0;

  friend class CsgField;

 private:
  mutable std::atomic<std::uint64_t> queries_{0};
};

using FieldPtr = std::shared_ptr<const ImplicitField>;

/// Rigid transform followed by uniform scale: world = R * (scale * local) + t.
struct Similarity {
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 translation;
  double scale = 1.0;

  Vec3 to_local(const Vec3& world) const;
  Vec3 to_world(const Vec3& local) const;
  /// Rotation from intrinsic Z-Y-X Euler angles in degrees.
  static Similarity from_euler(const Vec3& degrees, const Vec3& translation, double scale);
};

/// Analytic signed distance primitives.
class AnalyticField final : public ImplicitField {
 public:
  enum class Shape { sphere, box, rounded_box, torus, gyroid, plane, constant };

  static std::shared_ptr<AnalyticField> sphere(double radius, const Similarity& xf = {});
  static std::shared_ptr<AnalyticField> box(const Vec3& half_extents, const Similarity& xf = {});
  static std::shared_ptr<AnalyticField> rounded_box(const Vec3& half_extents, double rounding,
                                                    const Similarity& xf = {});
  static std::shared_ptr<AnalyticField> torus(double major_radius, double minor_radius,
                                              const Similarity& xf = {});
  /// Sheet gyroid of the given period scale and shell thickness, confined to
  /// `extent` (a box about the local origin).
  static std::shared_ptr<AnalyticField> gyroid(double scale, double thickness,
                                               const Vec3& extent, const Similarity& xf = {});
  /// Signed distance to the plane dot(normal, x) = offset (normal is normalized).
  static std::shared_ptr<AnalyticField> plane(const Vec3& normal, double offset);
  static std::shared_ptr<AnalyticField> constant(double v);

  Kind kind() const override { return Kind::analytic_primitive; }
  Box3 bounds() const override;
  bool is_distance_like() const override { return shape_ != Shape::constant; }
  Shape shape() const { return shape_; }

 protected:
  double value(const Vec3& p) const override;

 private:
  AnalyticField(Shape s, std::array<double, 4> params, Vec3 extent, Similarity xf);

  Shape shape_;
  std::array<double, 4> params_;
  Vec3 extent_;
  Similarity xf_;
};

/// Boolean combination of two fields using min/max.
class CsgField final : public ImplicitField {
 public:
  enum class Op { unite, intersect, subtract };

  CsgField(Op op, FieldPtr a, FieldPtr b);
  Kind kind() const override { return Kind::csg_composite; }
  Box3 bounds() const override;
  bool is_distance_like() const override;

 protected:
  double value(const Vec3& p) const override;

 private:
  Op op_;
  FieldPtr a_;
  FieldPtr b_;
};

/// A flat rounded slab with an array of small spherical bumps on one half of
/// its top face. Mixes flat and highly curved regions.
class SlabBumpsField final : public ImplicitField {
 public:
  struct Params {
    Vec3 slab_half_extents{1.0, 1.0, 0.2};
    double slab_rounding = 0.1;
    double bump_radius = 0.08;
    double bump_spacing = 0.2;
    /// Bumps are placed where x > bump_region_x.
    double bump_region_x = 0.1;
  };

  SlabBumpsField() : SlabBumpsField(Params{}) {}
  explicit SlabBumpsField(const Params& params);
  Kind kind() const override { return Kind::csg_composite; }
  Box3 bounds() const override;
  const Params& params() const { return params_; }
  /// True when p lies over the bump array (used to partition probe regions).
  bool in_bump_region(const Vec3& p) const;

 protected:
  double value(const Vec3& p) const override;

 private:
  Params params_;
  double x0_ = 0.0;
  double y0_ = 0.0;
  int nx_ = 0;
  int ny_ = 0;
};

}  // namespace mcgrids
