#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mcgrids/mesh_io.hpp"
#include "test_util.hpp"

using namespace mcgrids;
using namespace testutil;

namespace {

void check_same(const TriangleMesh& a, const TriangleMesh& b, double tol) {
  REQUIRE(a.vertices.size() == b.vertices.size());
  REQUIRE(a.triangles == b.triangles);
  for (std::size_t i = 0; i < a.vertices.size(); ++i) CHECK(norm(a.vertices[i] - b.vertices[i]) <= tol);
}

}  // namespace

TEST_CASE("obj round trip") {
  const TriangleMesh m = uv_sphere(0.75, 6, 9, {0.1, -0.2, 0.3});
  for (bool normals : {false, true}) {
    std::stringstream s;
    write_obj(s, m, normals);
    check_same(read_obj(s), m, 1e-8);  // nine significant digits
  }
}

TEST_CASE("obj polygons are fan-triangulated and negative indices resolve") {
  std::istringstream in(
      "# quad\nv 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\nf -4 -2 -1\n");
  const TriangleMesh m = read_obj(in);
  REQUIRE(m.triangles.size() == 3);
  CHECK(m.triangles[0] == Triangle{0, 1, 2});
  CHECK(m.triangles[1] == Triangle{0, 2, 3});
  CHECK(m.triangles[2] == Triangle{0, 2, 3});
  std::istringstream bad("v 0 0 0\nf 1 2 3\n");
  CHECK_THROWS_AS(read_obj(bad), std::runtime_error);
}

TEST_CASE("ply round trip in float precision") {
  const TriangleMesh m = uv_sphere(1.0, 8, 12);
  std::stringstream s;
  write_ply(s, m, true);
  check_same(read_ply(s), m, 1e-6);

  std::istringstream ascii(
      "ply\nformat ascii 1.0\nelement vertex 3\nproperty float x\nproperty float y\nproperty float z\n"
      "element face 1\nproperty list uchar int vertex_indices\nend_header\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  const TriangleMesh a = read_ply(ascii);
  CHECK(a.triangles.size() == 1);
  CHECK(a.vertices[1] == Vec3{1, 0, 0});
}

TEST_CASE("files by extension and byte determinism") {
  const auto dir = std::filesystem::temp_directory_path() / "mcgrids_mesh_io_test";
  std::filesystem::create_directories(dir);
  const TriangleMesh m = cube_mesh(2.0);
  for (const char* name : {"a.obj", "a.ply"}) {
    write_mesh(dir / name, m);
    check_same(read_mesh(dir / name), m, 1e-6);
    std::ostringstream x, y;
    x << std::ifstream(dir / name, std::ios::binary).rdbuf();
    write_mesh(dir / name, m);
    y << std::ifstream(dir / name, std::ios::binary).rdbuf();
    CHECK(x.str() == y.str());
  }
  CHECK_THROWS_AS(write_mesh(dir / "a.stl", m), std::runtime_error);
  CHECK_THROWS_AS(read_mesh(dir / "missing.obj"), std::runtime_error);
  std::filesystem::remove_all(dir);
}

TEST_CASE("topology of simple meshes") {
  const MeshTopology cube = analyze_topology(cube_mesh());
  CHECK(cube.vertices == 8);
  CHECK(cube.edges == 18);
  CHECK(cube.euler_characteristic() == 2);
  CHECK(cube.boundary_edges == 0);
  const MeshTopology square = analyze_topology(square_mesh(0, 2));
  CHECK(square.boundary_edges == 8);
  CHECK(square.euler_characteristic() == 1);
  CHECK(cube_mesh(2.0).area() == doctest::Approx(24.0));
}
