#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Geometry>

#include "proom/furniture/layout.hpp"
#include "proom/mesh/room_mesh.hpp"

namespace proom::furniture {

/// Placeholder geometry for one category. `dims` are the mesh extents
/// (length along x, width along y, height along z).
struct AssetEntry {
  std::string category;
  std::string mesh;  // file name relative to the manifest directory
  Vec3 dims = Vec3::Ones();
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> faces;
};

struct AssetManifest {
  std::filesystem::path root;
  std::map<std::string, AssetEntry> entries;

  bool has(const std::string& category) const { return entries.count(category) > 0; }
  /// Throws FurnitureError(manifest) for an unknown category.
  const AssetEntry& at(const std::string& category) const;
};

/// manifest.json: {"assets": {"bed": {"mesh": "bed.obj"}, ...}}. Meshes are
/// plain OBJ (v and f lines); dims are measured from the vertices.
AssetManifest load_asset_manifest(const std::filesystem::path& manifest_json);

struct Placement {
  std::string item;      // selector, e.g. bed-0
  std::string category;
  std::string asset;     // mesh file name
  Vec3 scale = Vec3::Ones();
  double rotation = 0;   // radians about +z
  Vec3 translation = Vec3::Zero();

  /// translation * rotation * scale
  Eigen::Matrix4d transform() const;
  Vec3 apply(const Vec3& p) const;
};

struct Scene {
  mesh::RoomMesh room;
  FurnitureLayout layout;  // as merged, before translation
  Vec2 offset = Vec2::Zero();  // room plan-bbox center minus layout center
  std::vector<Placement> placements;
};

/// Aligns the layout center with the room's plan-bbox center, scales each
/// asset to its item's dimensions, rotates by the orientation and seats it on
/// the floor. Throws FurnitureError(manifest) for missing categories.
Scene merge(const mesh::RoomMesh& room, const FurnitureLayout& layout, const AssetManifest& assets);

/// Lowest placed vertex z over all placements.
double lowest_placed_z(const Scene& scene, const AssetManifest& assets);

/// {"room": ..., "offset": [x, y], "placements": [{item, category, asset, scale, rotation_deg, translation, matrix}]}
std::string scene_json(const Scene& scene, const std::string& room_ref);

}  // namespace proom::furniture
