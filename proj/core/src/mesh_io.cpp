#include "mcgrids/mesh_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mcgrids {
namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

void check_indices(const TriangleMesh& mesh) {
  for (const Triangle& t : mesh.triangles)
    for (std::uint32_t v : t)
      if (v >= mesh.vertices.size()) throw std::runtime_error("face index out of range");
}

// PLY scalar types.
enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

PlyType parse_ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::i8;
  if (s == "uchar" || s == "uint8") return PlyType::u8;
  if (s == "short" || s == "int16") return PlyType::i16;
  if (s == "ushort" || s == "uint16") return PlyType::u16;
  if (s == "int" || s == "int32") return PlyType::i32;
  if (s == "uint" || s == "uint32") return PlyType::u32;
  if (s == "float" || s == "float32") return PlyType::f32;
  if (s == "double" || s == "float64") return PlyType::f64;
  throw std::runtime_error("unknown PLY type: " + s);
}

std::size_t ply_size(PlyType t) {
  switch (t) {
    case PlyType::i8: case PlyType::u8: return 1;
    case PlyType::i16: case PlyType::u16: return 2;
    case PlyType::i32: case PlyType::u32: case PlyType::f32: return 4;
    case PlyType::f64: return 8;
  }
  return 0;
}

struct PlyProperty {
  std::string name;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
  PlyType type = PlyType::f32;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> props;
};

double read_binary(std::istream& in, PlyType t) {
  char buf[8];
  const std::size_t n = ply_size(t);
  if (!in.read(buf, static_cast<std::streamsize>(n))) throw std::runtime_error("PLY data truncated");
  // Host is little-endian on every supported platform.
  static_assert(std::endian::native == std::endian::little);
  switch (t) {
    case PlyType::i8: { std::int8_t v; std::memcpy(&v, buf, 1); return v; }
    case PlyType::u8: { std::uint8_t v; std::memcpy(&v, buf, 1); return v; }
    case PlyType::i16: { std::int16_t v; std::memcpy(&v, buf, 2); return v; }
    case PlyType::u16: { std::uint16_t v; std::memcpy(&v, buf, 2); return v; }
    case PlyType::i32: { std::int32_t v; std::memcpy(&v, buf, 4); return v; }
    case PlyType::u32: { std::uint32_t v; std::memcpy(&v, buf, 4); return v; }
    case PlyType::f32: { float v; std::memcpy(&v, buf, 4); return v; }
    case PlyType::f64: { double v; std::memcpy(&v, buf, 8); return v; }
  }
  return 0.0;
}

template <class T>
void put(std::ostream& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.write(buf, sizeof(T));
}

}  // namespace

TriangleMesh read_obj(std::istream& in) {
  TriangleMesh mesh;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    if (tag == "v") {
      Vec3 p;
      if (!(ls >> p.x >> p.y >> p.z))
        throw std::runtime_error("bad OBJ vertex on line " + std::to_string(lineno));
      mesh.vertices.push_back(p);
    } else if (tag == "f") {
      std::vector<std::uint32_t> poly;
      std::string tok;
      while (ls >> tok) {
        const long idx = std::stol(tok.substr(0, tok.find('/')));
        const long n = static_cast<long>(mesh.vertices.size());
        const long resolved = idx < 0 ? n + idx : idx - 1;
        if (idx == 0 || resolved < 0)
          throw std::runtime_error("bad OBJ face index on line " + std::to_string(lineno));
        poly.push_back(static_cast<std::uint32_t>(resolved));
      }
      for (std::size_t i = 1; i + 1 < poly.size(); ++i) mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
    }
  }
  check_indices(mesh);
  return mesh;
}

TriangleMesh read_ply(std::istream& in) {
  std::string line;
  std::getline(in, line);
  if (line.rfind("ply", 0) != 0) throw std::runtime_error("not a PLY file");
  bool binary = false;
  std::vector<PlyElement> elements;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "binary_little_endian") binary = true;
      else if (fmt != "ascii") throw std::runtime_error("unsupported PLY format: " + fmt);
    } else if (key == "element") {
      PlyElement e;
      ls >> e.name >> e.count;
      elements.push_back(e);
    } else if (key == "property") {
      if (elements.empty()) throw std::runtime_error("PLY property before element");
      PlyProperty p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string ct, it;
        ls >> ct >> it;
        p.is_list = true;
        p.count_type = parse_ply_type(ct);
        p.type = parse_ply_type(it);
      } else {
        p.type = parse_ply_type(type);
      }
      ls >> p.name;
      elements.back().props.push_back(p);
    } else if (key == "end_header") {
      break;
    }
  }
  if (line.rfind("end_header", 0) != 0) throw std::runtime_error("PLY header not terminated");

  TriangleMesh mesh;
  std::string token;
  auto scalar = [&](PlyType t) {
    if (binary) return read_binary(in, t);
    if (!(in >> token)) throw std::runtime_error("PLY data truncated");
    return std::stod(token);
  };
  for (const PlyElement& e : elements) {
    const bool is_vertex = e.name == "vertex", is_face = e.name == "face";
    for (std::size_t r = 0; r < e.count; ++r) {
      Vec3 p;
      for (const PlyProperty& prop : e.props) {
        if (prop.is_list) {
          const auto n = static_cast<std::size_t>(scalar(prop.count_type));
          std::vector<std::uint32_t> poly(n);
          for (std::size_t i = 0; i < n; ++i) poly[i] = static_cast<std::uint32_t>(scalar(prop.type));
          if (is_face && (prop.name == "vertex_indices" || prop.name == "vertex_index")) {
            for (std::size_t i = 1; i + 1 < n; ++i) mesh.triangles.push_back({poly[0], poly[i], poly[i + 1]});
          }
        } else {
          const double v = scalar(prop.type);
          if (is_vertex) {
            if (prop.name == "x") p.x = v;
            else if (prop.name == "y") p.y = v;
            else if (prop.name == "z") p.z = v;
          }
        }
      }
      if (is_vertex) mesh.vertices.push_back(p);
    }
  }
  check_indices(mesh);
  return mesh;
}

TriangleMesh read_mesh(const std::filesystem::path& path) {
  const std::string ext = lower_extension(path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open mesh file: " + path.string());
  if (ext == ".obj") return read_obj(in);
  if (ext == ".ply") return read_ply(in);
  throw std::runtime_error("unsupported mesh extension: " + ext);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh, bool normals) {
  const auto old = out.precision(9);
  for (const Vec3& v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
  if (normals) {
    for (const Vec3& n : mesh.vertex_normals()) out << "vn " << n.x << ' ' << n.y << ' ' << n.z << '\n';
    for (const Triangle& t : mesh.triangles)
      out << "f " << t[0] + 1 << "//" << t[0] + 1 << ' ' << t[1] + 1 << "//" << t[1] + 1 << ' '
          << t[2] + 1 << "//" << t[2] + 1 << '\n';
  } else {
    for (const Triangle& t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
  }
  out.precision(old);
}

void write_ply(std::ostream& out, const TriangleMesh& mesh, bool normals) {
  out << "ply\nformat binary_little_endian 1.0\n";
  out << "element vertex " << mesh.vertices.size() << '\n';
  out << "property float x\nproperty float y\nproperty float z\n";
  if (normals) out << "property float nx\nproperty float ny\nproperty float nz\n";
  out << "element face " << mesh.triangles.size() << '\n';
  out << "property list uchar int vertex_indices\nend_header\n";
  std::vector<Vec3> vn;
  if (normals) vn = mesh.vertex_normals();
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    put(out, static_cast<float>(v.x));
    put(out, static_cast<float>(v.y));
    put(out, static_cast<float>(v.z));
    if (normals) {
      put(out, static_cast<float>(vn[i].x));
      put(out, static_cast<float>(vn[i].y));
      put(out, static_cast<float>(vn[i].z));
    }
  }
  for (const Triangle& t : mesh.triangles) {
    put(out, static_cast<std::uint8_t>(3));
    for (std::uint32_t v : t) put(out, static_cast<std::int32_t>(v));
  }
}

void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh, bool normals) {
  const std::string ext = lower_extension(path);
  if (ext != ".obj" && ext != ".ply") throw std::runtime_error("unsupported mesh extension: " + ext);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write mesh file: " + path.string());
  if (ext == ".obj") write_obj(out, mesh, normals);
  else write_ply(out, mesh, normals);
  if (!out) throw std::runtime_error("failed writing mesh file: " + path.string());
}

}  // namespace mcgrids
