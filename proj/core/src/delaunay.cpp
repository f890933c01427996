#include "mcgrids/delaunay.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "mcgrids/predicates.hpp"

namespace mcgrids {
namespace {

using predicates::insphere;
using predicates::insphere_perturbed;
using predicates::orient3d;

bool contains(const std::vector<TetId>& v, TetId t) {
  return std::find(v.begin(), v.end(), t) != v.end();
}

std::uint64_t edge_key(VertexId a, VertexId b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | b;
}

}  // namespace

Triangulation::Triangulation(const Box3& domain, double merge_epsilon) : domain_(domain) {
  if (!domain_.valid()) throw std::invalid_argument("triangulation domain must have positive volume");
  merge_epsilon_ = merge_epsilon < 0.0 ? 1e-7 * domain_.diagonal() : merge_epsilon;
  build_initial();
}

void Triangulation::build_initial() {
  for (int i = 0; i < 8; ++i) positions_.push_back(domain_.corner(i));
  vertex_tet_.assign(8, kNoTet);

  // The eight corners are cospherical; pick the triangulation that the
  // symbolic perturbation declares Delaunay so later insertions stay
  // consistent with it. Brute force over all 4-subsets.
  std::vector<Tetrahedron> chosen;
  for (VertexId a = 0; a < 8; ++a)
    for (VertexId b = a + 1; b < 8; ++b)
      for (VertexId c = b + 1; c < 8; ++c)
        for (VertexId d = c + 1; d < 8; ++d) {
          std::array<VertexId, 4> v{a, b, c, d};
          const int o = orient3d(positions_[a], positions_[b], positions_[c], positions_[d]);
          if (o == 0) continue;
          if (o < 0) std::swap(v[0], v[1]);
          bool empty = true;
          for (VertexId e = 0; e < 8 && empty; ++e) {
            if (e == a || e == b || e == c || e == d) continue;
            const int s = insphere_perturbed(positions_[v[0]], positions_[v[1]], positions_[v[2]],
                                             positions_[v[3]], positions_[e],
                                             {v[0], v[1], v[2], v[3], e});
            empty = s < 0;
          }
          if (empty) chosen.push_back(Tetrahedron{v, {kNoTet, kNoTet, kNoTet, kNoTet}});
        }

  // Face matching for adjacency.
  std::map<std::array<VertexId, 3>, std::pair<TetId, int>> faces;
  for (TetId t = 0; t < chosen.size(); ++t) {
    for (int i = 0; i < 4; ++i) {
      std::array<VertexId, 3> f{};
      int k = 0;
      for (int j = 0; j < 4; ++j)
        if (j != i) f[k++] = chosen[t].v[j];
      std::sort(f.begin(), f.end());
      auto it = faces.find(f);
      if (it == faces.end()) {
        faces.emplace(f, std::make_pair(t, i));
      } else {
        chosen[t].n[i] = it->second.first;
        chosen[it->second.first].n[it->second.second] = t;
      }
    }
  }
  for (const Tetrahedron& tet : chosen) {
    const TetId id = allocate_tet();
    tets_[id] = tet;
    for (VertexId v : tet.v) vertex_tet_[v] = id;
  }
  hint_ = 0;
}

TetId Triangulation::allocate_tet() {
  TetId id;
  if (!free_.empty()) {
    id = free_.back();
    free_.pop_back();
  } else {
    id = static_cast<TetId>(tets_.size());
    tets_.emplace_back();
    alive_.push_back(0);
    stamps_.push_back(0);
  }
  alive_[id] = 1;
  stamps_[id] = next_stamp_++;
  return id;
}

double Triangulation::tet_volume(TetId t) const {
  const Tetrahedron& tt = tets_[t];
  return signed_volume6(positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]],
                        positions_[tt.v[3]]) /
         6.0;
}

std::array<Vec3, 4> Triangulation::tet_positions(TetId t) const {
  const Tetrahedron& tt = tets_[t];
  return {positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]], positions_[tt.v[3]]};
}

bool Triangulation::tet_touches_corner(TetId t) const {
  const Tetrahedron& tt = tets_[t];
  return std::any_of(tt.v.begin(), tt.v.end(), [](VertexId v) { return is_corner(v); });
}

Location Triangulation::locate(const Vec3& p) const { return locate(p, hint_); }

Location Triangulation::locate(const Vec3& p, TetId hint) const {
  if (!is_finite(p) || !domain_.contains(p)) throw std::out_of_range("point outside the domain");
  const TetId start = is_alive(hint) ? hint : vertex_tet_[0];
  Location loc;
  loc.tet = locate_impl(p, start);
  for (VertexId v : tets_[loc.tet].v) {
    if (positions_[v] == p) loc.on_vertex = v;
  }
  return loc;
}

TetId Triangulation::locate_impl(const Vec3& p, TetId start) const {
  // Remembering stochastic walk; the face order is randomized with a fixed
  // seed so the walk is deterministic.
  std::uint32_t rng = 0x9e3779b9u;
  TetId t = start;
  TetId previous = kNoTet;
  for (std::size_t steps = 0;; ++steps) {
    if (steps > 4 * tets_.size() + 64) throw std::logic_error("point location did not terminate");
    const Tetrahedron& tt = tets_[t];
    rng ^= rng << 13;
    rng ^= rng >> 17;
    rng ^= rng << 5;
    const int first = static_cast<int>(rng & 3u);
    TetId next = kNoTet;
    for (int k = 0; k < 4; ++k) {
      const int i = (first + k) & 3;
      if (tt.n[i] == previous && previous != kNoTet) continue;
      std::array<Vec3, 4> q{positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]],
                            positions_[tt.v[3]]};
      q[i] = p;
      if (orient3d(q[0], q[1], q[2], q[3]) < 0) {
        if (tt.n[i] == kNoTet) throw std::out_of_range("point outside the domain");
        next = tt.n[i];
        break;
      }
    }
    if (next == kNoTet) return t;
    previous = t;
    t = next;
  }
}

bool Triangulation::in_conflict(TetId t, const Vec3& p) const {
  const Tetrahedron& tt = tets_[t];
  // The query point is ordered after every existing vertex, so exact ties
  // resolve to "outside".
  return insphere(positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]],
                  positions_[tt.v[3]], p) > 0;
}

bool Triangulation::compute_cavity(const Vec3& p, TetId start, std::vector<TetId>& cavity,
                                   std::vector<BoundaryFace>& boundary) const {
  cavity.clear();
  boundary.clear();
  std::vector<TetId> rejected;

  cavity.push_back(start);
  for (std::size_t head = 0; head < cavity.size(); ++head) {
    const Tetrahedron& tt = tets_[cavity[head]];
    for (int i = 0; i < 4; ++i) {
      const TetId nb = tt.n[i];
      if (nb == kNoTet || contains(cavity, nb) || contains(rejected, nb)) continue;
      if (in_conflict(nb, p)) cavity.push_back(nb);
      else rejected.push_back(nb);
    }
  }

  for (;;) {
    boundary.clear();
    bool grown = false;
    for (TetId c : cavity) {
      const Tetrahedron& tt = tets_[c];
      for (int i = 0; i < 4; ++i) {
        const TetId nb = tt.n[i];
        if (nb != kNoTet && contains(cavity, nb)) continue;
        std::array<Vec3, 4> q{positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]],
                              positions_[tt.v[3]]};
        q[i] = p;
        if (orient3d(q[0], q[1], q[2], q[3]) <= 0) {
          // Not visible from p; absorb the tet behind the face so the cavity
          // stays star-shaped. Only reachable through degenerate input.
          if (nb == kNoTet) throw std::logic_error("cavity reached the domain boundary");
          cavity.push_back(nb);
          grown = true;
          break;
        }
        int back = -1;
        if (nb != kNoTet) {
          for (int j = 0; j < 4; ++j)
            if (tets_[nb].n[j] == c) back = j;
        }
        boundary.push_back({c, i, nb, back});
      }
      if (grown) break;
    }
    if (!grown) break;
  }

  const double eps2 = merge_epsilon_ * merge_epsilon_;
  for (TetId c : cavity) {
    for (VertexId v : tets_[c].v) {
      if (squared_distance(positions_[v], p) < eps2) return false;
    }
  }
  return true;
}

std::vector<TetId> Triangulation::conflict_region(const Vec3& p) const {
  const Location loc = locate(p);
  std::vector<TetId> cavity;
  std::vector<BoundaryFace> boundary;
  compute_cavity(p, loc.tet, cavity, boundary);
  return cavity;
}

std::vector<VertexId> Triangulation::natural_neighbors(const Vec3& p) const {
  if (!domain_.strictly_contains(p)) throw std::out_of_range("point not strictly inside the domain");
  const Location loc = locate(p);
  std::vector<TetId> cavity;
  std::vector<BoundaryFace> boundary;
  if (!compute_cavity(p, loc.tet, cavity, boundary)) return {};
  std::vector<VertexId> out;
  for (TetId c : cavity)
    for (VertexId v : tets_[c].v) out.push_back(v);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::optional<VertexId> Triangulation::insert(const Vec3& p) {
  if (!is_finite(p) || !domain_.strictly_contains(p))
    throw std::out_of_range("inserted point must lie strictly inside the domain");
  const TetId start = locate_impl(p, is_alive(hint_) ? hint_ : vertex_tet_[0]);

  std::vector<TetId> cavity;
  std::vector<BoundaryFace> boundary;
  if (!compute_cavity(p, start, cavity, boundary)) return std::nullopt;

  const auto vid = static_cast<VertexId>(positions_.size());
  positions_.push_back(p);
  vertex_tet_.push_back(kNoTet);

  // Snapshot boundary vertices before slots are recycled.
  struct NewTet {
    std::array<VertexId, 4> v;
    int apex;
    TetId outer;
    int outer_face;
  };
  std::vector<NewTet> pending;
  pending.reserve(boundary.size());
  for (const BoundaryFace& bf : boundary) {
    NewTet nt{tets_[bf.inner].v, bf.face, bf.outer, bf.outer_face};
    nt.v[bf.face] = vid;
    pending.push_back(nt);
  }
  std::vector<VertexId> cavity_vertices;
  for (TetId c : cavity) {
    for (VertexId v : tets_[c].v) cavity_vertices.push_back(v);
    alive_[c] = 0;
    free_.push_back(c);
  }

  last_created_.clear();
  std::unordered_map<std::uint64_t, std::pair<TetId, int>> open_faces;
  open_faces.reserve(pending.size() * 3);
  for (const NewTet& nt : pending) {
    const TetId id = allocate_tet();
    Tetrahedron& tt = tets_[id];
    tt.v = nt.v;
    tt.n = {kNoTet, kNoTet, kNoTet, kNoTet};
    tt.n[nt.apex] = nt.outer;
    if (nt.outer != kNoTet) tets_[nt.outer].n[nt.outer_face] = id;
    for (int j = 0; j < 4; ++j) {
      if (j == nt.apex) continue;
      // Face opposite v[j] contains the new vertex and the two boundary
      // vertices other than v[j].
      VertexId e[2];
      int k = 0;
      for (int m = 0; m < 4; ++m)
        if (m != j && m != nt.apex) e[k++] = tt.v[m];
      const std::uint64_t key = edge_key(e[0], e[1]);
      auto it = open_faces.find(key);
      if (it == open_faces.end()) {
        open_faces.emplace(key, std::make_pair(id, j));
      } else {
        tt.n[j] = it->second.first;
        tets_[it->second.first].n[it->second.second] = id;
        open_faces.erase(it);
      }
    }
    for (VertexId v : tt.v) vertex_tet_[v] = id;
    last_created_.push_back(id);
  }
  if (!open_faces.empty()) throw std::logic_error("cavity retriangulation left unmatched faces");
  for (VertexId v : cavity_vertices) {
    if (!alive_[vertex_tet_[v]]) throw std::logic_error("cavity swallowed a vertex");
  }
  hint_ = last_created_.front();
  return vid;
}

std::vector<TetId> Triangulation::incident_tets(VertexId v) const {
  std::vector<TetId> star;
  const TetId start = vertex_tet_.at(v);
  star.push_back(start);
  for (std::size_t head = 0; head < star.size(); ++head) {
    const Tetrahedron& tt = tets_[star[head]];
    for (int i = 0; i < 4; ++i) {
      if (tt.v[i] == v) continue;
      const TetId nb = tt.n[i];
      if (nb != kNoTet && !contains(star, nb)) star.push_back(nb);
    }
  }
  return star;
}

std::vector<VertexId> Triangulation::one_ring(VertexId v) const {
  std::vector<VertexId> ring;
  for (TetId t : incident_tets(v))
    for (VertexId w : tets_[t].v)
      if (w != v) ring.push_back(w);
  std::sort(ring.begin(), ring.end());
  ring.erase(std::unique(ring.begin(), ring.end()), ring.end());
  return ring;
}

std::vector<VertexId> Triangulation::affected_vertices(VertexId v) const {
  std::vector<VertexId> out = one_ring(v);
  out.insert(std::lower_bound(out.begin(), out.end(), v), v);
  return out;
}

bool Triangulation::adjacency_consistent() const {
  for (TetId t = 0; t < tets_.size(); ++t) {
    if (!alive_[t]) continue;
    const Tetrahedron& tt = tets_[t];
    for (int i = 0; i < 4; ++i) {
      const TetId nb = tt.n[i];
      if (nb == kNoTet) continue;
      if (!alive_[nb]) return false;
      int back = -1;
      for (int j = 0; j < 4; ++j)
        if (tets_[nb].n[j] == t) back = j;
      if (back < 0) return false;
      // Shared face: same three vertices.
      std::array<VertexId, 3> fa{}, fb{};
      int ka = 0, kb = 0;
      for (int j = 0; j < 4; ++j) {
        if (j != i) fa[ka++] = tt.v[j];
        if (j != back) fb[kb++] = tets_[nb].v[j];
      }
      std::sort(fa.begin(), fa.end());
      std::sort(fb.begin(), fb.end());
      if (fa != fb) return false;
    }
  }
  return true;
}

bool Triangulation::all_positively_oriented() const {
  for (TetId t = 0; t < tets_.size(); ++t) {
    if (!alive_[t]) continue;
    const Tetrahedron& tt = tets_[t];
    if (orient3d(positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]],
                 positions_[tt.v[3]]) <= 0)
      return false;
  }
  return true;
}

std::size_t Triangulation::count_delaunay_violations() const {
  std::size_t violations = 0;
  for (TetId t = 0; t < tets_.size(); ++t) {
    if (!alive_[t]) continue;
    const Tetrahedron& tt = tets_[t];
    for (VertexId v = 0; v < positions_.size(); ++v) {
      if (v == tt.v[0] || v == tt.v[1] || v == tt.v[2] || v == tt.v[3]) continue;
      if (insphere(positions_[tt.v[0]], positions_[tt.v[1]], positions_[tt.v[2]],
                   positions_[tt.v[3]], positions_[v]) > 0)
        ++violations;
    }
  }
  return violations;
}

double Triangulation::total_volume() const {
  double sum = 0.0;
  for_each_tet([&](TetId t, const Tetrahedron&) { sum += tet_volume(t); });
  return sum;
}

void Triangulation::write_debug(std::ostream& out) const {
  const auto old = out.precision(17);
  for (const Vec3& p : positions_) out << "v " << p.x << ' ' << p.y << ' ' << p.z << '\n';
  for_each_tet([&](TetId, const Tetrahedron& tt) {
    out << "t " << tt.v[0] + 1 << ' ' << tt.v[1] + 1 << ' ' << tt.v[2] + 1 << ' ' << tt.v[3] + 1
        << '\n';
  });
  out.precision(old);
}

}  // namespace mcgrids
