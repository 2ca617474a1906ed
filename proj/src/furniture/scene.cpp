#include "proom/furniture/scene.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace proom::furniture {

namespace {

FurnitureError manifest_error(const std::string& msg) { return FurnitureError(FurnitureError::Kind::manifest, msg); }

void read_obj(const std::filesystem::path& path, AssetEntry& e) {
  std::ifstream in(path);
  if (!in) throw manifest_error("cannot read asset " + path.string());
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    std::istringstream ss(line);
    std::string tag;
    ss >> tag;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw manifest_error(path.filename().string() + ":" + std::to_string(n) + ": bad vertex");
      e.vertices.emplace_back(x, y, z);
    } else if (tag == "f") {
      std::vector<int> idx;
      std::string tok;
      while (ss >> tok) idx.push_back(std::stoi(tok.substr(0, tok.find('/'))) - 1);
      for (std::size_t k = 1; k + 1 < idx.size(); ++k) e.faces.push_back({idx[0], idx[k], idx[k + 1]});
    }
  }
  if (e.vertices.empty()) throw manifest_error("asset " + path.string() + " has no vertices");
  for (const auto& f : e.faces) {
    for (int i : f) {
      if (i < 0 || i >= static_cast<int>(e.vertices.size())) throw manifest_error("bad face index in " + path.string());
    }
  }
  Vec3 lo = e.vertices[0], hi = e.vertices[0];
  for (const auto& v : e.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  e.dims = hi - lo;
  if ((e.dims.array() <= 0).any()) throw manifest_error("asset " + path.string() + " is flat");
}

}  // namespace

const AssetEntry& AssetManifest::at(const std::string& category) const {
  const auto it = entries.find(category);
  if (it == entries.end()) throw manifest_error("no asset for category \"" + category + "\"");
  return it->second;
}

AssetManifest load_asset_manifest(const std::filesystem::path& manifest_json) {
  std::ifstream in(manifest_json);
  if (!in) throw manifest_error("cannot read " + manifest_json.string());
  AssetManifest m;
  m.root = manifest_json.parent_path();
  try {
    const auto j = nlohmann::json::parse(in);
    for (const auto& [cat, v] : j.at("assets").items()) {
      AssetEntry e;
      e.category = cat;
      e.mesh = v.at("mesh").get<std::string>();
      read_obj(m.root / e.mesh, e);
      m.entries.emplace(cat, std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw manifest_error(manifest_json.string() + ": " + e.what());
  }
  return m;
}

Eigen::Matrix4d Placement::transform() const {
  Eigen::Affine3d t = Eigen::Translation3d(translation) * Eigen::AngleAxisd(rotation, Vec3::UnitZ()) *
                      Eigen::Scaling(scale);
  return t.matrix();
}

Vec3 Placement::apply(const Vec3& p) const {
  const double c = std::cos(rotation), s = std::sin(rotation);
  const Vec3 q = scale.cwiseProduct(p);
  return Vec3(c * q.x() - s * q.y(), s * q.x() + c * q.y(), q.z()) + translation;
}

Scene merge(const mesh::RoomMesh& room, const FurnitureLayout& layout, const AssetManifest& assets) {
  Scene scene;
  scene.room = room;
  scene.layout = layout;
  const mesh::Bounds3 b = mesh::mesh_bounds(room);
  const Vec2 room_center(0.5 * (b.min.x() + b.max.x()), 0.5 * (b.min.y() + b.max.y()));
  scene.offset = room_center - layout.room.center();
  const double floor_z = b.min.z();
  for (const FurnitureItem& it : layout.items) {
    const AssetEntry& a = assets.at(it.category);
    Placement p;
    p.item = it.selector();
    p.category = it.category;
    p.asset = a.mesh;
    p.scale = Vec3(it.length / a.dims.x(), it.width / a.dims.y(), it.height / a.dims.z());
    p.rotation = it.orientation * geometry::kPi / 180.0;
    // center the asset footprint on the item, lowest vertex on the floor
    Vec3 lo = a.vertices[0], hi = a.vertices[0];
    for (const auto& v : a.vertices) {
      lo = lo.cwiseMin(v);
      hi = hi.cwiseMax(v);
    }
    const Vec3 mid = 0.5 * (lo + hi);
    const double c = std::cos(p.rotation), s = std::sin(p.rotation);
    const double mx = p.scale.x() * mid.x(), my = p.scale.y() * mid.y();
    p.translation = Vec3(it.left + scene.offset.x() - (c * mx - s * my),
                         it.top + scene.offset.y() - (s * mx + c * my), floor_z - p.scale.z() * lo.z());
    scene.placements.push_back(std::move(p));
  }
  return scene;
}

double lowest_placed_z(const Scene& scene, const AssetManifest& assets) {
  double lo = INFINITY;
  for (const auto& p : scene.placements) {
    for (const auto& v : assets.at(p.category).vertices) lo = std::min(lo, p.apply(v).z());
  }
  return lo;
}

std::string scene_json(const Scene& scene, const std::string& room_ref) {
  using nlohmann::json;
  json j;
  j["room"] = room_ref;
  j["offset"] = {scene.offset.x(), scene.offset.y()};
  j["placements"] = json::array();
  for (const auto& p : scene.placements) {
    const Eigen::Matrix4d m = p.transform();
    json rows = json::array();
    for (int r = 0; r < 4; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
    j["placements"].push_back({{"item", p.item},
                               {"category", p.category},
                               {"asset", p.asset},
                               {"scale", {p.scale.x(), p.scale.y(), p.scale.z()}},
                               {"rotation_deg", p.rotation * 180.0 / geometry::kPi},
                               {"translation", {p.translation.x(), p.translation.y(), p.translation.z()}},
                               {"matrix", rows}});
  }
  return j.dump(2) + "\n";
}

}  // namespace proom::furniture
