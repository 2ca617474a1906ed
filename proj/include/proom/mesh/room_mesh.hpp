#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "proom/geometry/types.hpp"

namespace proom::mesh {

using geometry::Vec2;
using geometry::Vec3;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Which shape surface a triangle belongs to.
struct SurfaceTag {
  enum class Kind { floor, ceiling, wall };
  Kind kind = Kind::floor;
  int wall = -1;  // polygon edge index for walls

  static SurfaceTag floor() { return {Kind::floor, -1}; }
  static SurfaceTag ceiling() { return {Kind::ceiling, -1}; }
  static SurfaceTag wall_of(int i) { return {Kind::wall, i}; }

  std::string name() const;  // "floor", "ceiling", "wall_3"
  static SurfaceTag from_name(const std::string& name);
  bool operator==(const SurfaceTag&) const = default;
};

using Triangle = std::array<int, 3>;

/// Triangle mesh with one uv per vertex (seam vertices are duplicated).
/// v follows image rows: 0 at the top of the panorama.
struct RoomMesh {
  std::vector<Vec3> vertices;
  std::vector<Vec2> uvs;
  std::vector<Triangle> triangles;
  std::vector<SurfaceTag> tags;  // one per triangle
  std::string material = "room";
  geometry::TextureImage texture;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  /// Throws MeshError on out-of-range indices, size mismatches or uvs outside [0,1].
  void validate() const;
  bool operator==(const RoomMesh&) const = default;
};

struct Bounds3 {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
  Vec3 extent() const { return max - min; }
};

Bounds3 mesh_bounds(const RoomMesh& mesh);

/// Ear clipping of a simple counter-clockwise polygon. Vertices within 1e-9 m
/// of collinear never form ears.
std::vector<Triangle> ear_clip(std::span<const Vec2> polygon);

inline constexpr double kDefaultSubdivisionDegrees = 5.0;

/// Walls are per-edge vertical grids, split at equal azimuth steps and at
/// equal elevation steps seen from the closest point of the wall, then
/// bisected wherever an edge still spans more than `max_degrees`. Floor and
/// ceiling are ear clipped, get a vertex under/over the camera, and are
/// refined by edge bisection until no edge spans more than `max_degrees`.
geometry::RoomShape require_meshable(const geometry::RoomShape& shape);
RoomMesh build_empty_room(const geometry::RoomShape& shape, const geometry::CameraPose& cam,
                          const geometry::TextureImage& texture,
                          double max_degrees = kDefaultSubdivisionDegrees);

/// Distance from each vertex to the plane of its surface; the maximum over the mesh.
double max_surface_residual(const RoomMesh& mesh, const geometry::RoomShape& shape);

struct ScaleTarget {
  std::optional<double> x;  // plan bounding-box extent along x
  std::optional<double> y;
  std::optional<double> height;
};

/// Anisotropic scale about the floor centroid (height about the floor) so the
/// bounding box matches the targets. Axes whose target equals the current
/// extent are left untouched bit for bit.
RoomMesh scale_mesh(const RoomMesh& mesh, const ScaleTarget& target);

struct ExportOptions {
  std::string stem = "room";
  bool y_up = false;  // write (x, z, -y) instead of z-up coordinates
};

struct ExportedFiles {
  std::filesystem::path obj;
  std::filesystem::path mtl;
  std::filesystem::path texture;
};

/// Writes <stem>.obj, <stem>.mtl and <stem>.png; coordinates at 9 significant digits.
ExportedFiles export_mesh(const RoomMesh& mesh, const std::filesystem::path& directory,
                          const ExportOptions& options = {});
std::string obj_text(const RoomMesh& mesh, const ExportOptions& options = {});
std::string mtl_text(const RoomMesh& mesh, const ExportOptions& options = {});

/// Reads an OBJ written by export_mesh (and its MTL/texture when present).
RoomMesh import_mesh(const std::filesystem::path& obj_path, bool y_up = false);
RoomMesh parse_obj(const std::string& text, bool y_up = false);

/// The mesh as it reads back after export: coordinates rounded to 9 significant digits.
RoomMesh export_precision(const RoomMesh& mesh);

}  // namespace proom::mesh
