#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "proom/geometry/types.hpp"

namespace proom::geometry {

struct ShapeDiagnostic {
  std::string code;  // e.g. "self-intersection", "clockwise"
  std::string message;
};

struct ShapeValidation {
  std::optional<RoomShape> shape;  // set iff there are no errors
  std::vector<ShapeDiagnostic> warnings;
  std::vector<ShapeDiagnostic> errors;

  bool ok() const { return errors.empty(); }
  std::string error_summary() const;
};

/// Checks every RoomShape invariant. Clockwise polygons are reversed (wall
/// indices of openings are remapped) and reported as a warning.
ShapeValidation validate_shape(const RoomShape& shape);

/// Like validate_shape but throws GeometryError on any error.
RoomShape require_valid_shape(const RoomShape& shape);

double signed_area(std::span<const Vec2> polygon);
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c,
                        const Vec2& d);
/// Even-odd test; points within `eps` of the boundary count as inside.
bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p,
                      double eps = 1e-9);
/// Distance from p to the polygon boundary.
double boundary_distance(std::span<const Vec2> polygon, const Vec2& p);
Vec2 area_centroid(std::span<const Vec2> polygon);
/// Interior point farthest from the boundary (grid refinement search).
Vec2 pole_of_inaccessibility(std::span<const Vec2> polygon);

struct PlanBounds {
  Vec2 min = Vec2::Zero();
  Vec2 max = Vec2::Zero();
  Vec2 center() const { return 0.5 * (min + max); }
  Vec2 extent() const { return max - min; }
};
PlanBounds plan_bounds(std::span<const Vec2> polygon);

/// Camera at the plan centroid (pole of inaccessibility when the centroid is
/// outside), 1.6 m above the floor unless the ceiling is too low.
CameraPose default_camera(const RoomShape& shape);

/// Throws GeometryError unless the camera is strictly inside the polygon and
/// strictly between floor and ceiling.
void require_valid_camera(const RoomShape& shape, const CameraPose& cam);

/// Key/value text format:
///   ceiling_height = 2.8
///   floor_z = 0
///   corner = 0 0          (one line per corner, in order)
///   opening = door 0 1.0 0.9 0.0 2.1   (kind wall offset width sill height)
/// Blank lines and '#' comments are ignored.
std::string serialize_shape(const RoomShape& shape);
RoomShape parse_shape(const std::string& text);

}  // namespace proom::geometry
