#include "mcgrids/field_spec.hpp"

#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "mcgrids/mesh_io.hpp"
#include "mcgrids/mesh_sdf.hpp"

namespace mcgrids {
namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

// A comma at depth 0 separates two field specs when the following word is
// not a key (keys are followed by '=').
bool starts_field(std::string_view rest) {
  std::size_t i = 0;
  while (i < rest.size() && std::islower(static_cast<unsigned char>(rest[i]))) ++i;
  if (i == 0) return false;
  return i == rest.size() || rest[i] == ':' || rest[i] == '(' || rest[i] == ',';
}

std::vector<std::string> split_operands(std::string_view body) {
  std::vector<std::string> parts;
  int depth = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    const char c = body[i];
    if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == ',' && depth == 0 && starts_field(body.substr(i + 1))) {
      parts.push_back(trim(body.substr(start, i - start)));
      start = i + 1;
    }
    if (depth < 0) throw FieldSpecError("unbalanced parentheses in field spec");
  }
  if (depth != 0) throw FieldSpecError("unbalanced parentheses in field spec");
  parts.push_back(trim(body.substr(start)));
  return parts;
}

class Args {
 public:
  Args(const std::string& kind, std::string_view text) : kind_(kind) {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t end = text.find(',', start);
      if (end == std::string_view::npos) end = text.size();
      const std::string item = trim(text.substr(start, end - start));
      if (!item.empty()) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
          throw FieldSpecError(kind + ": expected key=value, got '" + item + "'");
        values_[trim(item.substr(0, eq))] = trim(item.substr(eq + 1));
      }
      start = end + 1;
    }
  }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    auto it = values_.find(key);
    if (it == values_.end()) {
      if (fallback) return *fallback;
      throw FieldSpecError(kind_ + ": missing parameter '" + key + "'");
    }
    used_.insert(key);
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw FieldSpecError(kind_ + ": parameter '" + key + "' is not a number");
    }
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    auto it = values_.find(key);
    if (it == values_.end()) {
      if (fallback) return *fallback;
      throw FieldSpecError(kind_ + ": missing parameter '" + key + "'");
    }
    used_.insert(key);
    return it->second;
  }

  Similarity transform() {
    const Vec3 t{number("cx", 0.0), number("cy", 0.0), number("cz", 0.0)};
    const Vec3 r{number("rx", 0.0), number("ry", 0.0), number("rz", 0.0)};
    const double s = number("s", 1.0);
    if (!(s > 0.0)) throw FieldSpecError(kind_ + ": scale must be positive");
    return Similarity::from_euler(r, t, s);
  }

  void finish() const {
    for (const auto& [k, v] : values_)
      if (!used_.count(k)) throw FieldSpecError(kind_ + ": unknown parameter '" + k + "'");
  }

 private:
  std::string kind_;
  std::map<std::string, std::string> values_;
  std::set<std::string> used_;
};

std::filesystem::path resolve(const std::string& p, const std::filesystem::path& base) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

}  // namespace

FieldPtr parse_field_spec(std::string_view spec_view, const std::filesystem::path& base_dir) {
  const std::string spec = trim(spec_view);
  if (spec.empty()) throw FieldSpecError("empty field spec");
  const std::size_t colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string rest = colon == std::string::npos ? "" : spec.substr(colon + 1);

  if (kind == "csg") {
    const std::size_t open = rest.find('(');
    if (open == std::string::npos || rest.back() != ')')
      throw FieldSpecError("csg: expected op(A,B)");
    const std::string op = trim(rest.substr(0, open));
    const std::vector<std::string> parts = split_operands(std::string_view(rest).substr(open + 1, rest.size() - open - 2));
    if (parts.size() != 2) throw FieldSpecError("csg: expected exactly two operands");
    CsgField::Op o;
    if (op == "union") o = CsgField::Op::unite;
    else if (op == "intersect") o = CsgField::Op::intersect;
    else if (op == "subtract") o = CsgField::Op::subtract;
    else throw FieldSpecError("csg: unknown operation '" + op + "'");
    return std::make_shared<CsgField>(o, parse_field_spec(parts[0], base_dir),
                                      parse_field_spec(parts[1], base_dir));
  }

  Args args(kind, rest);
  FieldPtr field;
  if (kind == "sphere") {
    const double r = args.number("r", 1.0);
    field = AnalyticField::sphere(r, args.transform());
  } else if (kind == "torus") {
    const double big = args.number("R", 1.0), small = args.number("r", 0.25);
    field = AnalyticField::torus(big, small, args.transform());
  } else if (kind == "box" || kind == "roundbox") {
    const double h = args.number("h", 1.0);
    const Vec3 he{args.number("hx", h), args.number("hy", h), args.number("hz", h)};
    if (kind == "box") {
      field = AnalyticField::box(he, args.transform());
    } else {
      const double rr = args.number("rr", 0.1);
      field = AnalyticField::rounded_box(he, rr, args.transform());
    }
  } else if (kind == "gyroid") {
    const double scale = args.number("scale", 6.0), thickness = args.number("thickness", 0.05);
    const double e = args.number("e", 1.0);
    field = AnalyticField::gyroid(scale, thickness, {e, e, e}, args.transform());
  } else if (kind == "const") {
    field = AnalyticField::constant(args.number("v"));
  } else if (kind == "plane") {
    field = AnalyticField::plane({args.number("nx", 0.0), args.number("ny", 0.0), args.number("nz", 1.0)},
                                 args.number("d", 0.0));
  } else if (kind == "slabbumps") {
    SlabBumpsField::Params p;
    p.slab_half_extents = {args.number("hx", p.slab_half_extents.x), args.number("hy", p.slab_half_extents.y),
                           args.number("hz", p.slab_half_extents.z)};
    p.slab_rounding = args.number("rr", p.slab_rounding);
    p.bump_radius = args.number("br", p.bump_radius);
    p.bump_spacing = args.number("spacing", p.bump_spacing);
    p.bump_region_x = args.number("bx", p.bump_region_x);
    field = std::make_shared<SlabBumpsField>(p);
  } else if (kind == "mesh") {
    const std::string path = args.text("path");
    const std::string sign = args.text("sign", std::string("auto"));
    MeshSdf::SignPolicy policy;
    if (sign == "auto") policy = MeshSdf::SignPolicy::automatic;
    else if (sign == "pseudo") policy = MeshSdf::SignPolicy::pseudo_normal;
    else if (sign == "winding") policy = MeshSdf::SignPolicy::winding_number;
    else throw FieldSpecError("mesh: sign must be auto, pseudo or winding");
    args.finish();
    return std::make_shared<MeshSdf>(read_mesh(resolve(path, base_dir)), policy);
  } else if (kind == "grid") {
    const std::string path = args.text("path");
    args.finish();
    return SampledGrid::load(resolve(path, base_dir));
  } else {
    throw FieldSpecError("unknown field kind '" + kind + "'");
  }
  args.finish();
  return field;
}

}  // namespace mcgrids
