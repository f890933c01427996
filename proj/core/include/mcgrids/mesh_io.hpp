#pragma once

#include <filesystem>
#include <iosfwd>

#include "mcgrids/triangle_mesh.hpp"

namespace mcgrids {

/// Reads OBJ (polygons fan-triangulated) or PLY (ascii or binary little
/// endian) by extension. Attributes other than positions and faces are
/// ignored. Throws std::runtime_error on I/O or format errors.
TriangleMesh read_mesh(const std::filesystem::path& path);
TriangleMesh read_obj(std::istream& in);
TriangleMesh read_ply(std::istream& in);

/// Writes by extension (.obj or .ply). Output is byte-deterministic.
void write_mesh(const std::filesystem::path& path, const TriangleMesh& mesh, bool normals = false);
void write_obj(std::ostream& out, const TriangleMesh& mesh, bool normals = false);
/// Binary little-endian PLY with float32 positions (and normals) and int32
/// indices.
void write_ply(std::ostream& out, const TriangleMesh& mesh, bool normals = false);

}  // namespace mcgrids
