#pragma once

#include <array>
#include <cstdint>

#include "mcgrids/vec3.hpp"

namespace mcgrids::predicates {

// Exact geometric predicates. Each first evaluates a floating-point
// determinant with a forward error bound and falls back to exact rational
// arithmetic only when the sign cannot be certified.

/// Sign of det[b - a, c - a, d - a]: +1 when (a, b, c, d) is positively
/// oriented, -1 when negatively oriented, 0 when coplanar.
int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// +1 when e lies strictly inside the circumsphere of the positively oriented
/// tetrahedron (a, b, c, d), -1 strictly outside, 0 on the sphere.
/// Undefined for degenerate (a, b, c, d).
int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e);

/// insphere() with ties broken by symbolic perturbation. `keys` are distinct
/// integers identifying (a, b, c, d, e) in that order; points with larger keys
/// carry the dominant perturbation. Never returns 0.
int insphere_perturbed(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                       const Vec3& e, const std::array<std::uint64_t, 5>& keys);

/// Counters for how often the exact fallback ran (per thread).
struct FallbackStats {
  std::uint64_t orient_exact = 0;
  std::uint64_t insphere_exact = 0;
};
FallbackStats& fallback_stats();

}  // namespace mcgrids::predicates
