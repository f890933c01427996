#include "mcgrids/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mcgrids {

double ImplicitField::evaluate(const Vec3& p) const {
  if (!is_finite(p)) throw std::domain_error("field evaluated at a non-finite point");
  queries_.fetch_add(1, std::memory_order_relaxed);
  return value(p);
}

std::vector<double> ImplicitField::evaluate_batch(std::span<const Vec3> ps) const {
  for (const Vec3& p : ps) {
    if (!is_finite(p)) throw std::domain_error("field evaluated at a non-finite point");
  }
  std::vector<double> out(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) out[i] = value(ps[i]);
  queries_.fetch_add(ps.size(), std::memory_order_relaxed);
  return out;
}

Vec3 Similarity::to_local(const Vec3& world) const {
  const Vec3 d = world - translation;
  // R^T d / scale
  const Vec3 r{rotation[0] * d.x + rotation[3] * d.y + rotation[6] * d.z,
               rotation[1] * d.x + rotation[4] * d.y + rotation[7] * d.z,
               rotation[2] * d.x + rotation[5] * d.y + rotation[8] * d.z};
  return r / scale;
}

Vec3 Similarity::to_world(const Vec3& local) const {
  const Vec3 s = local * scale;
  return Vec3{rotation[0] * s.x + rotation[1] * s.y + rotation[2] * s.z,
              rotation[3] * s.x + rotation[4] * s.y + rotation[5] * s.z,
              rotation[6] * s.x + rotation[7] * s.y + rotation[8] * s.z} +
         translation;
}

Similarity Similarity::from_euler(const Vec3& degrees, const Vec3& translation, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("similarity scale must be positive");
  constexpr double kDeg = std::numbers::pi / 180.0;
  const double cx = std::cos(degrees.x * kDeg), sx = std::sin(degrees.x * kDeg);
  const double cy = std::cos(degrees.y * kDeg), sy = std::sin(degrees.y * kDeg);
  const double cz = std::cos(degrees.z * kDeg), sz = std::sin(degrees.z * kDeg);
  // R = Rz * Ry * Rx
  Similarity s;
  s.rotation = {cz * cy, cz * sy * sx - sz * cx, cz * sy * cx + sz * sx,
                sz * cy, sz * sy * sx + cz * cx, sz * sy * cx - cz * sx,
                -sy,     cy * sx,                cy * cx};
  s.translation = translation;
  s.scale = scale;
  return s;
}

namespace {

double box_sdf(const Vec3& p, const Vec3& h) {
  const Vec3 q{std::abs(p.x) - h.x, std::abs(p.y) - h.y, std::abs(p.z) - h.z};
  const Vec3 qp = max(q, Vec3{});
  return norm(qp) + std::min(std::max(q.x, std::max(q.y, q.z)), 0.0);
}

Box3 transformed_bounds(const Similarity& xf, const Vec3& half) {
  Box3 b = Box3::empty();
  for (int i = 0; i < 8; ++i) {
    const Vec3 c{(i & 1) ? half.x : -half.x, (i & 2) ? half.y : -half.y,
                 (i & 4) ? half.z : -half.z};
    b.expand(xf.to_world(c));
  }
  return b;
}

}  // namespace

AnalyticField::AnalyticField(Shape s, std::array<double, 4> params, Vec3 extent, Similarity xf)
    : shape_(s), params_(params), extent_(extent), xf_(xf) {}

std::shared_ptr<AnalyticField> AnalyticField::sphere(double radius, const Similarity& xf) {
  if (!(radius > 0.0)) throw std::invalid_argument("sphere radius must be positive");
  return std::shared_ptr<AnalyticField>(
      new AnalyticField(Shape::sphere, {radius, 0, 0, 0}, Vec3{radius, radius, radius}, xf));
}

std::shared_ptr<AnalyticField> AnalyticField::box(const Vec3& half_extents, const Similarity& xf) {
  if (!(half_extents.x > 0 && half_extents.y > 0 && half_extents.z > 0))
    throw std::invalid_argument("box half extents must be positive");
  return std::shared_ptr<AnalyticField>(
      new AnalyticField(Shape::box, {0, 0, 0, 0}, half_extents, xf));
}

std::shared_ptr<AnalyticField> AnalyticField::rounded_box(const Vec3& half_extents, double rounding,
                                                          const Similarity& xf) {
  if (!(rounding >= 0.0) || rounding >= std::min({half_extents.x, half_extents.y, half_extents.z}))
    throw std::invalid_argument("rounding must be non-negative and below the half extents");
  return std::shared_ptr<AnalyticField>(
      new AnalyticField(Shape::rounded_box, {rounding, 0, 0, 0}, half_extents, xf));
}

std::shared_ptr<AnalyticField> AnalyticField::torus(double major_radius, double minor_radius,
                                                    const Similarity& xf) {
  if (!(minor_radius > 0.0) || !(major_radius > minor_radius))
    throw std::invalid_argument("torus requires major radius > minor radius > 0");
  const double e = major_radius + minor_radius;
  return std::shared_ptr<AnalyticField>(new AnalyticField(
      Shape::torus, {major_radius, minor_radius, 0, 0}, Vec3{e, e, minor_radius}, xf));
}

std::shared_ptr<AnalyticField> AnalyticField::gyroid(double scale, double thickness,
                                                     const Vec3& extent, const Similarity& xf) {
  if (!(scale > 0.0) || !(thickness > 0.0))
    throw std::invalid_argument("gyroid scale and thickness must be positive");
  return std::shared_ptr<AnalyticField>(
      new AnalyticField(Shape::gyroid, {scale, thickness, 0, 0}, extent, xf));
}

std::shared_ptr<AnalyticField> AnalyticField::plane(const Vec3& normal, double offset) {
  const Vec3 n = normalized(normal);
  if (n == Vec3{}) throw std::invalid_argument("plane normal must be non-zero");
  return std::shared_ptr<AnalyticField>(
      new AnalyticField(Shape::plane, {n.x, n.y, n.z, offset}, Vec3{}, Similarity{}));
}

std::shared_ptr<AnalyticField> AnalyticField::constant(double v) {
  return std::shared_ptr<AnalyticField>(
      new AnalyticField(Shape::constant, {v, 0, 0, 0}, Vec3{}, Similarity{}));
}

Box3 AnalyticField::bounds() const {
  switch (shape_) {
    case Shape::plane:
    case Shape::constant:
      return Box3::empty();
    default:
      return transformed_bounds(xf_, extent_);
  }
}

double AnalyticField::value(const Vec3& world) const {
  switch (shape_) {
    case Shape::plane:
      return params_[0] * world.x + params_[1] * world.y + params_[2] * world.z - params_[3];
    case Shape::constant:
      return params_[0];
    default:
      break;
  }
  const Vec3 p = xf_.to_local(world);
  double d = 0.0;
  switch (shape_) {
    case Shape::sphere:
      d = norm(p) - params_[0];
      break;
    case Shape::box:
      d = box_sdf(p, extent_);
      break;
    case Shape::rounded_box: {
      const double r = params_[0];
      d = box_sdf(p, extent_ - Vec3{r, r, r}) - r;
      break;
    }
    case Shape::torus: {
      const double qx = std::sqrt(p.x * p.x + p.y * p.y) - params_[0];
      d = std::sqrt(qx * qx + p.z * p.z) - params_[1];
      break;
    }
    case Shape::gyroid: {
      const double s = params_[0];
      const Vec3 q = p * s;
      const double g = std::sin(q.x) * std::cos(q.y) + std::sin(q.y) * std::cos(q.z) +
                       std::sin(q.z) * std::cos(q.x);
      // |grad g| <= sqrt(3) * s roughly; scale to an approximate distance.
      const double sheet = (std::abs(g) / (1.5 * s)) - params_[1] * 0.5;
      d = std::max(sheet, box_sdf(p, extent_));
      break;
    }
    default:
      break;
  }
  return d * xf_.scale;
}

CsgField::CsgField(Op op, FieldPtr a, FieldPtr b) : op_(op), a_(std::move(a)), b_(std::move(b)) {
  if (!a_ || !b_) throw std::invalid_argument("csg operands must be non-null");
}

Box3 CsgField::bounds() const {
  const Box3 ba = a_->bounds();
  const Box3 bb = b_->bounds();
  switch (op_) {
    case Op::unite: {
      Box3 r = ba;
      r.expand(bb.lo);
      r.expand(bb.hi);
      return r;
    }
    case Op::intersect:
      return {max(ba.lo, bb.lo), min(ba.hi, bb.hi)};
    case Op::subtract:
      return ba;
  }
  return ba;
}

bool CsgField::is_distance_like() const {
  return a_->is_distance_like() && b_->is_distance_like();
}

double CsgField::value(const Vec3& p) const {
  const double fa = a_->value(p);
  const double fb = b_->value(p);
  switch (op_) {
    case Op::unite:
      return std::min(fa, fb);
    case Op::intersect:
      return std::max(fa, fb);
    case Op::subtract:
      return std::max(fa, -fb);
  }
  return fa;
}

SlabBumpsField::SlabBumpsField(const Params& params) : params_(params) {
  const Vec3& h = params_.slab_half_extents;
  const double s = params_.bump_spacing;
  if (!(s > 0.0) || !(params_.bump_radius > 0.0) || params_.bump_radius >= 0.5 * s)
    throw std::invalid_argument("bump radius must be positive and below half the spacing");
  for (double x = params_.bump_region_x + 0.5 * s; x + params_.bump_radius < h.x - params_.slab_rounding;
       x += s) {
    ++nx_;
  }
  for (double y = -h.y + s; y < h.y - 0.5 * s; y += s) ++ny_;
  x0_ = params_.bump_region_x + 0.5 * s;
  y0_ = -h.y + s;
}

Box3 SlabBumpsField::bounds() const {
  const Vec3& h = params_.slab_half_extents;
  return {{-h.x, -h.y, -h.z}, {h.x, h.y, h.z + params_.bump_radius}};
}

bool SlabBumpsField::in_bump_region(const Vec3& p) const {
  return p.x > params_.bump_region_x && p.z > params_.slab_half_extents.z - 1e-9;
}

double SlabBumpsField::value(const Vec3& p) const {
  const double r = params_.slab_rounding;
  const Vec3& h = params_.slab_half_extents;
  const double slab = box_sdf(p, h - Vec3{r, r, r}) - r;
  if (nx_ == 0 || ny_ == 0) return slab;
  // Nearest lattice centre, found per axis.
  const double s = params_.bump_spacing;
  const auto nearest = [s](double v, double origin, int count) {
    const double k = std::clamp(std::round((v - origin) / s), 0.0, static_cast<double>(count - 1));
    return origin + k * s;
  };
  const Vec3 c{nearest(p.x, x0_, nx_), nearest(p.y, y0_, ny_), h.z};
  const double bump = distance(p, c) - params_.bump_radius;
  // Polynomial smooth minimum keeps the bump/slab junction free of creases.
  constexpr double k = 0.03;
  const double t = std::clamp(0.5 + 0.5 * (bump - slab) / k, 0.0, 1.0);
  return bump * (1.0 - t) + slab * t - k * t * (1.0 - t);
}

}  // namespace mcgrids
