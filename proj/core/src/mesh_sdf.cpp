#include "mcgrids/mesh_sdf.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mcgrids {

MeshSdf::MeshSdf(TriangleMesh mesh, SignPolicy policy) : policy_(policy) {
  if (mesh.triangles.empty()) throw std::invalid_argument("mesh SDF requires a non-empty mesh");
  for (const Triangle& f : mesh.triangles) {
    for (std::uint32_t v : f) {
      if (v >= mesh.vertices.size()) throw std::invalid_argument("triangle index out of range");
    }
  }
  bounds_ = mesh.bounds();

  // Edge incidence for watertightness and edge pseudo-normals.
  std::map<std::pair<std::uint32_t, std::uint32_t>, Vec3> edge_normals;
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_faces;
  vertex_pseudo_normals_.assign(mesh.vertices.size(), Vec3{});
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& f = mesh.triangles[t];
    const Vec3 n = mesh.face_normal(t);
    for (int k = 0; k < 3; ++k) {
      const std::uint32_t a = f[k], b = f[(k + 1) % 3], c = f[(k + 2) % 3];
      const auto key = std::minmax(a, b);
      edge_normals[key] += n;
      ++edge_faces[key];
      // Incident angle at vertex a.
      const Vec3 u = normalized(mesh.vertices[b] - mesh.vertices[a]);
      const Vec3 w = normalized(mesh.vertices[c] - mesh.vertices[a]);
      const double angle = std::acos(std::clamp(dot(u, w), -1.0, 1.0));
      vertex_pseudo_normals_[a] += n * angle;
    }
  }
  watertight_ = std::all_of(edge_faces.begin(), edge_faces.end(),
                            [](const auto& kv) { return kv.second == 2; });
  edge_pseudo_normals_.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& f = mesh.triangles[t];
    for (int k = 0; k < 3; ++k) {
      edge_pseudo_normals_[t][k] = edge_normals[std::minmax(f[k], f[(k + 1) % 3])];
    }
  }
  if (policy_ == SignPolicy::automatic) {
    policy_ = watertight_ ? SignPolicy::winding_number : SignPolicy::pseudo_normal;
  }
  bvh_ = TriangleBvh(std::move(mesh));
}

double MeshSdf::unsigned_distance(const Vec3& p) const {
  return std::sqrt(bvh_.closest(p).closest.squared_distance);
}

double MeshSdf::value(const Vec3& p) const {
  const TriangleBvh::Hit hit = bvh_.closest(p);
  const double d = std::sqrt(hit.closest.squared_distance);
  switch (policy_) {
    case SignPolicy::unsigned_distance:
      return d;
    case SignPolicy::winding_number:
      return bvh_.winding_number(p) > 0.5 ? -d : d;
    default:
      break;
  }
  const Triangle& f = bvh_.mesh().triangles[hit.triangle];
  Vec3 n;
  switch (hit.closest.feature) {
    case TriangleFeature::vertex0: n = vertex_pseudo_normals_[f[0]]; break;
    case TriangleFeature::vertex1: n = vertex_pseudo_normals_[f[1]]; break;
    case TriangleFeature::vertex2: n = vertex_pseudo_normals_[f[2]]; break;
    case TriangleFeature::edge01: n = edge_pseudo_normals_[hit.triangle][0]; break;
    case TriangleFeature::edge12: n = edge_pseudo_normals_[hit.triangle][1]; break;
    case TriangleFeature::edge20: n = edge_pseudo_normals_[hit.triangle][2]; break;
    case TriangleFeature::face: n = bvh_.mesh().face_normal(hit.triangle); break;
  }
  return dot(p - hit.closest.point, n) < 0.0 ? -d : d;
}

SampledGrid::SampledGrid(std::array<std::size_t, 3> resolution, Box3 bounds,
                         std::vector<double> values)
    : resolution_(resolution), bounds_(bounds), values_(std::move(values)) {
  if (resolution_[0] < 2 || resolution_[1] < 2 || resolution_[2] < 2)
    throw std::invalid_argument("grid resolution must be at least 2 per axis");
  if (!bounds_.valid()) throw std::invalid_argument("grid bounds must have positive volume");
  if (values_.size() != resolution_[0] * resolution_[1] * resolution_[2])
    throw std::invalid_argument("grid value count does not match its resolution");
}

double SampledGrid::value(const Vec3& p) const {
  std::array<std::size_t, 3> i{};
  std::array<double, 3> t{};
  for (int a = 0; a < 3; ++a) {
    const double cells = static_cast<double>(resolution_[a] - 1);
    const double u = std::clamp((p[a] - bounds_.lo[a]) / (bounds_.hi[a] - bounds_.lo[a]), 0.0, 1.0) * cells;
    const double cell = std::min(std::floor(u), cells - 1.0);
    i[a] = static_cast<std::size_t>(cell);
    t[a] = u - cell;
  }
  const std::size_t nx = resolution_[0], nxy = resolution_[0] * resolution_[1];
  auto at = [&](std::size_t dx, std::size_t dy, std::size_t dz) {
    return values_[(i[0] + dx) + nx * (i[1] + dy) + nxy * (i[2] + dz)];
  };
  auto mix = [](double a, double b, double s) { return a * (1.0 - s) + b * s; };
  const double c00 = mix(at(0, 0, 0), at(1, 0, 0), t[0]);
  const double c10 = mix(at(0, 1, 0), at(1, 1, 0), t[0]);
  const double c01 = mix(at(0, 0, 1), at(1, 0, 1), t[0]);
  const double c11 = mix(at(0, 1, 1), at(1, 1, 1), t[0]);
  return mix(mix(c00, c10, t[1]), mix(c01, c11, t[1]), t[2]);
}

namespace {

constexpr const char* kGridMagic = "mcgrids-grid 1";

double read_le_double(const char* bytes) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[b]);
  return std::bit_cast<double>(bits);
}

void write_le_double(std::ostream& out, double v) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(v);
  char bytes[8];
  for (char& byte : bytes) {
    byte = static_cast<char>(bits & 0xff);
    bits >>= 8;
  }
  out.write(bytes, 8);
}

}  // namespace

std::shared_ptr<SampledGrid> SampledGrid::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open grid file: " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != kGridMagic) throw std::runtime_error("not a grid file: " + path.string());
  std::array<std::size_t, 3> res{};
  Box3 box;
  bool have_res = false, have_bounds = false;
  while (std::getline(in, line)) {
    if (line == "end_header") break;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "resolution") {
      have_res = static_cast<bool>(ls >> res[0] >> res[1] >> res[2]);
    } else if (key == "bounds") {
      have_bounds = static_cast<bool>(ls >> box.lo.x >> box.lo.y >> box.lo.z >> box.hi.x >>
                                      box.hi.y >> box.hi.z);
    } else if (!key.empty() && key[0] != '#') {
      throw std::runtime_error("unknown grid header key: " + key);
    }
  }
  if (line != "end_header" || !have_res || !have_bounds)
    throw std::runtime_error("incomplete grid header: " + path.string());
  const std::size_t count = res[0] * res[1] * res[2];
  std::vector<char> raw(count * 8);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size())
    throw std::runtime_error("grid file truncated: " + path.string());
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) values[i] = read_le_double(raw.data() + 8 * i);
  return std::make_shared<SampledGrid>(res, box, std::move(values));
}

void SampledGrid::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write grid file: " + path.string());
  out << kGridMagic << '\n';
  out << "resolution " << resolution_[0] << ' ' << resolution_[1] << ' ' << resolution_[2] << '\n';
  out.precision(17);
  out << "bounds " << bounds_.lo.x << ' ' << bounds_.lo.y << ' ' << bounds_.lo.z << ' '
      << bounds_.hi.x << ' ' << bounds_.hi.y << ' ' << bounds_.hi.z << '\n';
  out << "end_header\n";
  for (double v : values_) write_le_double(out, v);
}

}  // namespace mcgrids
