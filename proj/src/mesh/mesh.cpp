#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "proom/image/maps.hpp"
#include "proom/image/png.hpp"
#include "proom/mesh/room_mesh.hpp"
#include "proom/util/text.hpp"

namespace proom::mesh {

std::string SurfaceTag::name() const {
  switch (kind) {
    case Kind::floor: return "floor";
    case Kind::ceiling: return "ceiling";
    default: return "wall_" + std::to_string(wall);
  }
}

SurfaceTag SurfaceTag::from_name(const std::string& name) {
  if (name == "floor") return floor();
  if (name == "ceiling") return ceiling();
  if (name.rfind("wall_", 0) == 0 && name.size() > 5 &&
      std::all_of(name.begin() + 5, name.end(), [](char c) { return c >= '0' && c <= '9'; }))
    return wall_of(std::stoi(name.substr(5)));
  throw MeshError("unknown surface group '" + name + "'");
}

void RoomMesh::validate() const {
  if (uvs.size() != vertices.size()) throw MeshError("uv count differs from vertex count");
  if (tags.size() != triangles.size()) throw MeshError("tag count differs from triangle count");
  const int n = static_cast<int>(vertices.size());
  for (const Triangle& t : triangles)
    for (int i : t)
      if (i < 0 || i >= n) throw MeshError("triangle index " + std::to_string(i) + " out of range");
  for (const Vec2& uv : uvs)
    if (!(uv.x() >= 0.0 && uv.x() <= 1.0 && uv.y() >= 0.0 && uv.y() <= 1.0))
      throw MeshError("uv outside [0,1]");
}

Bounds3 mesh_bounds(const RoomMesh& mesh) {
  if (mesh.vertices.empty()) throw MeshError("empty mesh has no bounds");
  Bounds3 b{mesh.vertices[0], mesh.vertices[0]};
  for (const Vec3& v : mesh.vertices) {
    b.min = b.min.cwiseMin(v);
    b.max = b.max.cwiseMax(v);
  }
  return b;
}

namespace {

Vec2 floor_centroid(const RoomMesh& mesh) {
  double area = 0;
  Vec2 acc = Vec2::Zero();
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (mesh.tags[t].kind != SurfaceTag::Kind::floor) continue;
    const auto& tri = mesh.triangles[t];
    const Vec2 a = mesh.vertices[tri[0]].head<2>(), b = mesh.vertices[tri[1]].head<2>(),
               c = mesh.vertices[tri[2]].head<2>();
    const double w = std::abs((b - a).x() * (c - a).y() - (b - a).y() * (c - a).x());
    area += w;
    acc += w * (a + b + c) / 3.0;
  }
  if (area <= 0) throw MeshError("mesh has no floor");
  return acc / area;
}

// Maps [lo, hi] onto [new_lo, new_lo + target] through the pivot, with the
// extremes landing exactly on the new bounds.
void scale_axis(std::vector<Vec3>& pts, int axis, double lo, double hi, double pivot, double target) {
  const double s = target / (hi - lo);
  const double new_lo = pivot + s * (lo - pivot);
  const double new_hi = new_lo + target;
  for (Vec3& p : pts) {
    double& x = p[axis];
    if (x == lo) x = new_lo;
    else if (x == hi) x = new_hi;
    else x = std::clamp(pivot + s * (x - pivot), new_lo, new_hi);
  }
}

std::string fmt9(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

double round9(double x) { return std::strtod(fmt9(x).c_str(), nullptr); }

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw MeshError("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& p, const std::string& data) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw MeshError("cannot write " + p.string());
  out << data;
  out.flush();
  if (!out) throw MeshError("write failed for " + p.string());
}

}  // namespace

RoomMesh scale_mesh(const RoomMesh& mesh, const ScaleTarget& target) {
  for (const auto& t : {target.x, target.y, target.height})
    if (t && !(*t > 0.0 && std::isfinite(*t))) throw MeshError("scale target must be positive");
  RoomMesh out = mesh;
  const Bounds3 b = mesh_bounds(mesh);
  const Vec2 c = floor_centroid(mesh);
  const std::optional<double> targets[3] = {target.x, target.y, target.height};
  const double pivots[3] = {c.x(), c.y(), b.min.z()};
  for (int axis = 0; axis < 3; ++axis) {
    if (!targets[axis]) continue;
    const double extent = b.max[axis] - b.min[axis];
    if (*targets[axis] == extent) continue;
    if (!(extent > 0)) throw MeshError("cannot scale a flat mesh");
    scale_axis(out.vertices, axis, b.min[axis], b.max[axis], pivots[axis], *targets[axis]);
  }
  return out;
}

std::string obj_text(const RoomMesh& mesh, const ExportOptions& options) {
  mesh.validate();
  std::string s;
  s += "# room mesh, " + std::to_string(mesh.vertex_count()) + " vertices, " +
       std::to_string(mesh.triangle_count()) + " triangles, " + (options.y_up ? "y-up" : "z-up") + "\n";
  s += "mtllib " + options.stem + ".mtl\n";
  s += "o " + options.stem + "\n";
  for (const Vec3& v : mesh.vertices) {
    if (options.y_up) s += "v " + fmt9(v.x()) + " " + fmt9(v.z()) + " " + fmt9(-v.y()) + "\n";
    else s += "v " + fmt9(v.x()) + " " + fmt9(v.y()) + " " + fmt9(v.z()) + "\n";
  }
  for (const Vec2& uv : mesh.uvs) s += "vt " + fmt9(uv.x()) + " " + fmt9(1.0 - uv.y()) + "\n";
  s += "usemtl " + mesh.material + "\n";
  std::optional<SurfaceTag> group;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!group || *group != mesh.tags[t]) {
      group = mesh.tags[t];
      s += "g " + group->name() + "\n";
    }
    s += "f";
    for (int i : mesh.triangles[t]) s += " " + std::to_string(i + 1) + "/" + std::to_string(i + 1);
    s += "\n";
  }
  return s;
}

std::string mtl_text(const RoomMesh& mesh, const ExportOptions& options) {
  return "newmtl " + mesh.material + "\nKa 1 1 1\nKd 1 1 1\nKs 0 0 0\nillum 1\nmap_Kd " + options.stem + ".png\n";
}

ExportedFiles export_mesh(const RoomMesh& mesh, const std::filesystem::path& directory,
                          const ExportOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw MeshError("cannot create " + directory.string() + ": " + ec.message());
  ExportedFiles files{directory / (options.stem + ".obj"), directory / (options.stem + ".mtl"),
                      directory / (options.stem + ".png")};
  write_text(files.obj, obj_text(mesh, options));
  write_text(files.mtl, mtl_text(mesh, options));
  write_text(files.texture, image::encode_texture_png(mesh.texture));
  return files;
}

RoomMesh parse_obj(const std::string& text, bool y_up) {
  RoomMesh mesh;
  std::optional<SurfaceTag> group;
  int line_no = 0;
  for (const std::string& raw : util::split_lines(text)) {
    ++line_no;
    const std::string_view line = util::trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::istringstream in{std::string(line)};
    std::string kw;
    in >> kw;
    auto fail = [&](const std::string& what) {
      return MeshError("OBJ line " + std::to_string(line_no) + ": " + what);
    };
    auto num = [&]() {
      std::string tok;
      double x;
      if (!(in >> tok) || !util::parse_number(tok, x)) throw fail("expected a number");
      return x;
    };
    if (kw == "v") {
      const double a = num(), b = num(), c = num();
      mesh.vertices.push_back(y_up ? Vec3(a, -c, b) : Vec3(a, b, c));
    } else if (kw == "vt") {
      const double u = num(), v = num();
      mesh.uvs.emplace_back(u, 1.0 - v);
    } else if (kw == "usemtl") {
      in >> mesh.material;
    } else if (kw == "g") {
      std::string name;
      in >> name;
      group = SurfaceTag::from_name(name);
    } else if (kw == "f") {
      if (!group) throw fail("face outside a surface group");
      Triangle t;
      for (int k = 0; k < 3; ++k) {
        std::string tok;
        if (!(in >> tok)) throw fail("faces must be triangles");
        const auto slash = tok.find('/');
        if (slash == std::string::npos || tok.substr(0, slash) != tok.substr(slash + 1))
          throw fail("face corners must use matching v/vt indices");
        double idx;
        if (!util::parse_number(tok.substr(0, slash), idx)) throw fail("bad face index");
        t[k] = static_cast<int>(idx) - 1;
      }
      std::string extra;
      if (in >> extra) throw fail("faces must be triangles");
      mesh.triangles.push_back(t);
      mesh.tags.push_back(*group);
    }
  }
  mesh.validate();
  return mesh;
}

RoomMesh import_mesh(const std::filesystem::path& obj_path, bool y_up) {
  const std::string text = read_text(obj_path);
  RoomMesh mesh = parse_obj(text, y_up);
  for (const std::string& raw : util::split_lines(text)) {
    const std::string_view line = util::trim(raw);
    if (line.rfind("mtllib ", 0) != 0) continue;
    const auto mtl_path = obj_path.parent_path() / std::string(util::trim(line.substr(7)));
    for (const std::string& mraw : util::split_lines(read_text(mtl_path))) {
      const std::string_view m = util::trim(mraw);
      if (m.rfind("map_Kd ", 0) != 0) continue;
      const auto tex = mtl_path.parent_path() / std::string(util::trim(m.substr(7)));
      try {
        mesh.texture = image::decode_texture_png(read_text(tex));
      } catch (const image::ImageError& e) {
        throw MeshError(tex.string() + ": " + e.what());
      }
    }
  }
  return mesh;
}

RoomMesh export_precision(const RoomMesh& mesh) {
  RoomMesh out = mesh;
  for (Vec3& v : out.vertices)
    for (int k = 0; k < 3; ++k) v[k] = round9(v[k]);
  for (Vec2& uv : out.uvs) uv = Vec2(round9(uv.x()), 1.0 - round9(1.0 - uv.y()));
  return out;
}

}  // namespace proom::mesh
