#include "mcgrids/baselines.hpp"

#include <array>
#include <stdexcept>
#include <unordered_map>

#include "mc_tables.hpp"
#include "mcgrids/delaunay.hpp"
#include "mcgrids/extract.hpp"

namespace mcgrids {
namespace {

// Corner offsets in the table's numbering.
constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeCorners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                     {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
// Six tets sharing the 0-6 diagonal.
constexpr int kKuhn[6][4] = {{0, 1, 2, 6}, {0, 1, 5, 6}, {0, 3, 2, 6},
                             {0, 3, 7, 6}, {0, 4, 5, 6}, {0, 4, 7, 6}};

class Lattice {
 public:
  Lattice(const ImplicitField& field, const Box3& box, int n, double alpha)
      : field_(field), box_(box), n_(n), alpha_(alpha) {
    if (!box.valid()) throw std::invalid_argument("lattice box must have positive volume");
    slices_[0] = evaluate_slice(0);
    slices_[1] = evaluate_slice(1);
  }

  Vec3 point(long i, long j, long k) const {
    const Vec3 e = box_.extent();
    const double s = 1.0 / static_cast<double>(n_ - 1);
    return {i == n_ - 1 ? box_.hi.x : box_.lo.x + e.x * (static_cast<double>(i) * s),
            j == n_ - 1 ? box_.hi.y : box_.lo.y + e.y * (static_cast<double>(j) * s),
            k == n_ - 1 ? box_.hi.z : box_.lo.z + e.z * (static_cast<double>(k) * s)};
  }
  std::uint64_t id(long i, long j, long k) const {
    return static_cast<std::uint64_t>(i) +
           static_cast<std::uint64_t>(n_) * (static_cast<std::uint64_t>(j) +
                                             static_cast<std::uint64_t>(n_) * static_cast<std::uint64_t>(k));
  }
  /// Value at lattice point; k must be the current slab's z or z + 1.
  double value(long i, long j, long k) const {
    return slices_[k - z_][static_cast<std::size_t>(i + n_ * j)];
  }
  void advance() {
    ++z_;
    slices_[0] = std::move(slices_[1]);
    if (z_ + 1 < n_) slices_[1] = evaluate_slice(z_ + 1);
  }
  long z() const { return z_; }

  /// Mesh vertex on the lattice edge (a, b), created on first use.
  std::uint32_t vertex(std::array<long, 3> a, std::array<long, 3> b, TriangleMesh& mesh) {
    std::uint64_t ia = id(a[0], a[1], a[2]), ib = id(b[0], b[1], b[2]);
    if (ia > ib) {
      std::swap(ia, ib);
      std::swap(a, b);
    }
    const std::uint64_t n3 = static_cast<std::uint64_t>(n_) * n_ * n_;
    const std::uint64_t key = ia * n3 + ib;
    auto [it, inserted] = verts_.try_emplace(key, static_cast<std::uint32_t>(mesh.vertices.size()));
    if (inserted) {
      const double fa = classify_value(value(a[0], a[1], a[2]), alpha_);
      const double fb = classify_value(value(b[0], b[1], b[2]), alpha_);
      mesh.vertices.push_back(edge_crossing(point(a[0], a[1], a[2]), point(b[0], b[1], b[2]), fa, fb, alpha_));
    }
    return it->second;
  }

  /// Drops vertices that can no longer be referenced (below slab z).
  void forget_before(long k) {
    const std::uint64_t limit = static_cast<std::uint64_t>(n_) * n_ * static_cast<std::uint64_t>(k);
    const std::uint64_t n3 = static_cast<std::uint64_t>(n_) * n_ * n_;
    for (auto it = verts_.begin(); it != verts_.end();) {
      if (it->first / n3 < limit) it = verts_.erase(it);
      else ++it;
    }
  }

 private:
  std::vector<double> evaluate_slice(long k) const {
    std::vector<Vec3> pts;
    pts.reserve(static_cast<std::size_t>(n_) * n_);
    for (long j = 0; j < n_; ++j)
      for (long i = 0; i < n_; ++i) pts.push_back(point(i, j, k));
    return field_.evaluate_batch(pts);
  }

  const ImplicitField& field_;
  Box3 box_;
  long n_;
  double alpha_;
  long z_ = 0;
  std::array<std::vector<double>, 2> slices_;
  std::unordered_map<std::uint64_t, std::uint32_t> verts_;
};

}  // namespace

TriangleMesh marching_cubes(const ImplicitField& field, const Box3& box, int samples, double alpha) {
  if (samples < 2) throw std::invalid_argument("marching cubes needs at least 2 samples per axis");
  Lattice lat(field, box, samples, alpha);
  TriangleMesh mesh;
  for (long k = 0; k + 1 < samples; ++k) {
    for (long j = 0; j + 1 < samples; ++j) {
      for (long i = 0; i + 1 < samples; ++i) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          const double f = classify_value(lat.value(i + kCorner[c][0], j + kCorner[c][1], k + kCorner[c][2]), alpha);
          if (f < alpha) cube |= 1 << c;
        }
        if (detail::kEdgeTable[cube] == 0) continue;
        std::array<std::uint32_t, 12> ev{};
        for (int e = 0; e < 12; ++e) {
          if (!(detail::kEdgeTable[cube] & (1 << e))) continue;
          const int* ca = kCorner[kEdgeCorners[e][0]];
          const int* cb = kCorner[kEdgeCorners[e][1]];
          ev[e] = lat.vertex({i + ca[0], j + ca[1], k + ca[2]}, {i + cb[0], j + cb[1], k + cb[2]}, mesh);
        }
        const int* tri = detail::kTriTable[cube];
        // The table winds toward the inside; reverse to face outward.
        for (int t = 0; tri[t] != -1; t += 3) mesh.triangles.push_back({ev[tri[t]], ev[tri[t + 2]], ev[tri[t + 1]]});
      }
    }
    lat.advance();
    lat.forget_before(k + 1);
  }
  return mesh;
}

TriangleMesh marching_tets_uniform(const ImplicitField& field, const Box3& box, int cells, double alpha) {
  if (cells < 1) throw std::invalid_argument("marching tetrahedra needs at least 1 cell per axis");
  const int samples = cells + 1;
  Lattice lat(field, box, samples, alpha);
  TriangleMesh mesh;
  for (long k = 0; k + 1 < samples; ++k) {
    for (long j = 0; j + 1 < samples; ++j) {
      for (long i = 0; i + 1 < samples; ++i) {
        for (const int* kt : kKuhn) {
          std::array<std::array<long, 3>, 4> c{};
          std::array<Vec3, 4> pos;
          std::array<double, 4> f{};
          std::array<std::uint32_t, 4> ids{};
          for (int q = 0; q < 4; ++q) {
            const int* o = kCorner[kt[q]];
            c[q] = {i + o[0], j + o[1], k + o[2]};
            pos[q] = lat.point(c[q][0], c[q][1], c[q][2]);
            f[q] = lat.value(c[q][0], c[q][1], c[q][2]);
            ids[q] = static_cast<std::uint32_t>(lat.id(c[q][0], c[q][1], c[q][2]));
          }
          if (signed_volume6(pos[0], pos[1], pos[2], pos[3]) < 0.0) {
            std::swap(c[2], c[3]);
            std::swap(pos[2], pos[3]);
            std::swap(f[2], f[3]);
            std::swap(ids[2], ids[3]);
          }
          std::array<EdgeTriangle, 2> tris{};
          const int n = marching_tet_case(f, alpha, ids, tris);
          for (int t = 0; t < n; ++t) {
            Triangle out{};
            for (int e = 0; e < 3; ++e) out[e] = lat.vertex(c[tris[t][e][0]], c[tris[t][e][1]], mesh);
            mesh.triangles.push_back(out);
          }
        }
      }
    }
    lat.advance();
    lat.forget_before(k + 1);
  }
  return mesh;
}

}  // namespace mcgrids
