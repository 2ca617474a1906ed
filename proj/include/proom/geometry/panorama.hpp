#pragma once

#include <optional>

#include "proom/geometry/types.hpp"

namespace proom::geometry {

/// First intersection of a plan-view ray from the camera with the polygon
/// boundary. Ties between walls sharing a vertex go to the smaller wall index.
struct WallHit {
  double distance = 0.0;  // cs, horizontal distance to the wall
  int wall = -1;
  double along = 0.0;     // meters from the wall's start corner
};

std::optional<WallHit> cast_plan_ray(const RoomShape& shape, const Vec2& origin,
                                     double azimuth);
/// Throws GeometryError if the ray escapes (camera outside the polygon).
WallHit wall_hit(const RoomShape& shape, const CameraPose& cam, double azimuth);

/// Binary boundary raster of the visible wall-wall, wall-floor and
/// wall-ceiling edges.
LayoutMap gen_layout(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid);

/// Slant depth per pixel from the closed-form floor / ceiling / wall formulas.
DepthMap gen_depth(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid);

/// Connected regions of the non-boundary pixels (4-connected, periodic in x)
/// with the boundary pixels closed into neighbouring regions.
struct RegionMap {
  PanoramaGrid grid;
  std::vector<int> region;  // per pixel, row-major
  int region_count = 0;
  int ceiling_region = -1;  // the region holding row 0
  int floor_region = -1;    // the region holding row H-1
};

RegionMap segment_layout(const LayoutMap& layout, const PanoramaGrid& grid);
/// As above, but each boundary pixel only joins a region whose class matches
/// the surface its center sees; the regions themselves still come from the raster.
RegionMap segment_layout(const LayoutMap& layout, const PanoramaGrid& grid, const RoomShape& shape,
                         const CameraPose& cam);

/// Segments the boundary raster into ceiling / wall / floor regions and closes
/// the boundary pixels into their neighbours.
SemanticMap gen_semantic(const LayoutMap& layout, const PanoramaGrid& grid);

/// Shape-guided closing followed by painting the openings onto wall pixels.
SemanticMap gen_semantic(const LayoutMap& layout, const PanoramaGrid& grid,
                         const RoomShape& shape, const CameraPose& cam);

/// Relabels wall pixels whose ray meets a door or window rectangle.
void paint_openings(SemanticMap& semantic, const RoomShape& shape, const CameraPose& cam);

/// Per-column ceiling / floor boundary v coordinates.
Layout1D encode_layout_1d(const RoomShape& shape, const CameraPose& cam, int width);

/// Squared L2 distance over all 2W entries. Throws on width mismatch.
double layout_1d_distance(const Layout1D& a, const Layout1D& b);

struct OracleMaps {
  DepthMap depth;
  SemanticMap semantic;
};

/// Brute-force 3D ray casting against the floor, ceiling and wall rectangles.
/// Shares no code with the closed-form generators; intended for tests.
OracleMaps raycast_oracle(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid);

}  // namespace proom::geometry
