#include "mcgrids/predicates.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>

namespace mcgrids::predicates {
namespace {

constexpr double kEpsilon = 0x1p-53;
constexpr double kOrientErrBound = (7.0 + 56.0 * kEpsilon) * kEpsilon;
constexpr double kInsphereErrBound = (16.0 + 224.0 * kEpsilon) * kEpsilon;

int sign_of(const mpq_class& v) { return sgn(v); }

int orient3d_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  ++fallback_stats().orient_exact;
  const mpq_class bx = mpq_class(b.x) - a.x, by = mpq_class(b.y) - a.y, bz = mpq_class(b.z) - a.z;
  const mpq_class cx = mpq_class(c.x) - a.x, cy = mpq_class(c.y) - a.y, cz = mpq_class(c.z) - a.z;
  const mpq_class dx = mpq_class(d.x) - a.x, dy = mpq_class(d.y) - a.y, dz = mpq_class(d.z) - a.z;
  const mpq_class det = bx * (cy * dz - cz * dy) - by * (cx * dz - cz * dx) + bz * (cx * dy - cy * dx);
  return sign_of(det);
}

int insphere_exact(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  ++fallback_stats().insphere_exact;
  std::array<std::array<mpq_class, 4>, 4> m;
  const Vec3* pts[4] = {&a, &b, &c, &d};
  for (int i = 0; i < 4; ++i) {
    m[i][0] = mpq_class((*pts[i]).x) - e.x;
    m[i][1] = mpq_class((*pts[i]).y) - e.y;
    m[i][2] = mpq_class((*pts[i]).z) - e.z;
    m[i][3] = m[i][0] * m[i][0] + m[i][1] * m[i][1] + m[i][2] * m[i][2];
  }
  // Laplace expansion along the lift column; 3x3 minors of the xyz block.
  auto minor3 = [&](int r0, int r1, int r2) -> mpq_class {
    return m[r0][0] * (m[r1][1] * m[r2][2] - m[r1][2] * m[r2][1]) -
           m[r0][1] * (m[r1][0] * m[r2][2] - m[r1][2] * m[r2][0]) +
           m[r0][2] * (m[r1][0] * m[r2][1] - m[r1][1] * m[r2][0]);
  };
  const mpq_class det = -m[0][3] * minor3(1, 2, 3) + m[1][3] * minor3(0, 2, 3) -
                        m[2][3] * minor3(0, 1, 3) + m[3][3] * minor3(0, 1, 2);
  // det[a-e, b-e, c-e, d-e | lift] is negative for e inside a positively
  // oriented tetrahedron under our orientation convention.
  return -sign_of(det);
}

}  // namespace

FallbackStats& fallback_stats() {
  thread_local FallbackStats stats;
  return stats;
}

int orient3d(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  // Shewchuk's orient3d stage A evaluated on (b, a, c, d), which matches our
  // sign convention.
  const double adx = b.x - d.x, bdx = a.x - d.x, cdx = c.x - d.x;
  const double ady = b.y - d.y, bdy = a.y - d.y, cdy = c.y - d.y;
  const double adz = b.z - d.z, bdz = a.z - d.z, cdz = c.z - d.z;

  const double bdxcdy = bdx * cdy, cdxbdy = cdx * bdy;
  const double cdxady = cdx * ady, adxcdy = adx * cdy;
  const double adxbdy = adx * bdy, bdxady = bdx * ady;

  const double det = adz * (bdxcdy - cdxbdy) + bdz * (cdxady - adxcdy) + cdz * (adxbdy - bdxady);
  const double permanent = (std::abs(bdxcdy) + std::abs(cdxbdy)) * std::abs(adz) +
                           (std::abs(cdxady) + std::abs(adxcdy)) * std::abs(bdz) +
                           (std::abs(adxbdy) + std::abs(bdxady)) * std::abs(cdz);
  const double errbound = kOrientErrBound * permanent;
  if (det > errbound) return 1;
  if (-det > errbound) return -1;
  if (permanent == 0.0) return 0;
  return orient3d_exact(a, b, c, d);
}

int insphere(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d, const Vec3& e) {
  const double aex = a.x - e.x, bex = b.x - e.x, cex = c.x - e.x, dex = d.x - e.x;
  const double aey = a.y - e.y, bey = b.y - e.y, cey = c.y - e.y, dey = d.y - e.y;
  const double aez = a.z - e.z, bez = b.z - e.z, cez = c.z - e.z, dez = d.z - e.z;

  const double aexbey = aex * bey, bexaey = bex * aey, ab = aexbey - bexaey;
  const double bexcey = bex * cey, cexbey = cex * bey, bc = bexcey - cexbey;
  const double cexdey = cex * dey, dexcey = dex * cey, cd = cexdey - dexcey;
  const double dexaey = dex * aey, aexdey = aex * dey, da = dexaey - aexdey;
  const double aexcey = aex * cey, cexaey = cex * aey, ac = aexcey - cexaey;
  const double bexdey = bex * dey, dexbey = dex * bey, bd = bexdey - dexbey;

  const double abc = aez * bc - bez * ac + cez * ab;
  const double bcd = bez * cd - cez * bd + dez * bc;
  const double cda = cez * da + dez * ac + aez * cd;
  const double dab = dez * ab + aez * bd + bez * da;

  const double alift = aex * aex + aey * aey + aez * aez;
  const double blift = bex * bex + bey * bey + bez * bez;
  const double clift = cex * cex + cey * cey + cez * cez;
  const double dlift = dex * dex + dey * dey + dez * dez;

  const double det = (dlift * abc - clift * dab) + (blift * cda - alift * bcd);

  const double aezp = std::abs(aez), bezp = std::abs(bez), cezp = std::abs(cez), dezp = std::abs(dez);
  const double aexbeyp = std::abs(aexbey), bexaeyp = std::abs(bexaey);
  const double bexceyp = std::abs(bexcey), cexbeyp = std::abs(cexbey);
  const double cexdeyp = std::abs(cexdey), dexceyp = std::abs(dexcey);
  const double dexaeyp = std::abs(dexaey), aexdeyp = std::abs(aexdey);
  const double aexceyp = std::abs(aexcey), cexaeyp = std::abs(cexaey);
  const double bexdeyp = std::abs(bexdey), dexbeyp = std::abs(dexbey);
  const double permanent =
      ((cexdeyp + dexceyp) * bezp + (dexbeyp + bexdeyp) * cezp + (bexceyp + cexbeyp) * dezp) * alift +
      ((dexaeyp + aexdeyp) * cezp + (aexceyp + cexaeyp) * dezp + (cexdeyp + dexceyp) * aezp) * blift +
      ((aexbeyp + bexaeyp) * dezp + (bexdeyp + dexbeyp) * aezp + (dexaeyp + aexdeyp) * bezp) * clift +
      ((bexceyp + cexbeyp) * aezp + (cexaeyp + aexceyp) * bezp + (aexbeyp + bexaeyp) * cezp) * dlift;
  const double errbound = kInsphereErrBound * permanent;
  // Shewchuk's insphere is positive for e inside when orient3d (his sign) is
  // positive, i.e. when our orientation is negative; flip.
  if (det > errbound) return -1;
  if (-det > errbound) return 1;
  if (permanent == 0.0) return 0;
  return insphere_exact(a, b, c, d, e);
}

int insphere_perturbed(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d,
                       const Vec3& e, const std::array<std::uint64_t, 5>& keys) {
  const int s = insphere(a, b, c, d, e);
  if (s != 0) return s;

  // Symbolic perturbation: examine the points from the largest key down; the
  // first non-vanishing coefficient of the perturbed determinant decides.
  std::array<int, 5> order = {0, 1, 2, 3, 4};
  std::sort(order.begin(), order.end(), [&](int i, int j) { return keys[i] > keys[j]; });
  for (int k = 0; k < 3; ++k) {
    int o = 0;
    switch (order[k]) {
      case 4:
        return -1;
      case 3:
        o = orient3d(a, b, c, e);
        break;
      case 2:
        o = orient3d(a, b, e, d);
        break;
      case 1:
        o = orient3d(a, e, c, d);
        break;
      case 0:
        o = orient3d(e, b, c, d);
        break;
    }
    if (o != 0) return o;
  }
  return -1;
}

}  // namespace mcgrids::predicates
