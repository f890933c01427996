#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "mcgrids/field.hpp"

namespace mcgrids {

/// A malformed field specification (a usage error, not an I/O error).
class FieldSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Builds a field from the mini-language
///
///   sphere:r=1            torus:R=1,r=0.25      box:hx=1,hy=1,hz=1
///   roundbox:hx=..,hy=..,hz=..,rr=..            gyroid:scale=..,thickness=..,e=..
///   const:v=1             plane:nx=..,ny=..,nz=..,d=..
///   slabbumps             mesh:path=bunny.obj[,sign=auto|pseudo|winding]
///   grid:path=field.grid  csg:union(A,B)  csg:intersect(A,B)  csg:subtract(A,B)
///
/// Primitives accept cx, cy, cz (translation), s (uniform scale) and rx, ry,
/// rz (degrees). Relative paths resolve against base_dir. Throws
/// FieldSpecError for bad syntax and std::runtime_error for unreadable files.
FieldPtr parse_field_spec(std::string_view spec, const std::filesystem::path& base_dir = {});

}  // namespace mcgrids
