#pragma once

#include "proom/geometry/types.hpp"

namespace proom::geometry {

/// Spherical coordinates, z up. theta is the azimuth of (x, y) measured from
/// +y towards +x, in (-pi, pi]; phi is the polar angle from +z, in [0, pi].
struct Spherical {
  double r = 0.0;
  double theta = 0.0;
  double phi = 0.0;
};

struct UV {
  double u = 0.0;
  double v = 0.0;
};

Spherical project_spherical(const Vec3& p);
UV spherical_to_uv(double theta, double phi);

/// Camera yaw split into a whole-pixel column shift and a quantized
/// sub-pixel remainder, so maps for yaws one pixel apart are exact rolls of
/// each other.
struct YawSplit {
  long long columns = 0;
  double fraction = 0.0;  // in [0, 1), multiple of 2^-20
};
YawSplit split_yaw(double yaw, int width);

/// Azimuth of the center of column `col` for the given yaw, in (-pi, pi].
double column_azimuth(int width, int col, double yaw);
/// Signed elevation of the center of `row`: pi/2 - (row + 0.5) / H * pi.
double row_elevation(int height, int row);

struct PixelRay {
  Vec3 direction;     // unit length
  double elevation;   // a, radians in (-pi/2, pi/2)
  double azimuth;     // theta, radians in (-pi, pi]
};

/// Throws GeometryError when (row, col) is outside the grid.
PixelRay pixel_to_ray(const PanoramaGrid& grid, int row, int col, const CameraPose& cam);

Vec3 direction_from_angles(double azimuth, double elevation);

/// Continuous image position of a world direction: `col` is the integer
/// column whose span contains the point and `col_frac` in [0,1) the offset
/// inside it; `row_pos` is phi / pi * H (pixel centers at r + 0.5).
struct ImagePosition {
  long long col = 0;
  double col_frac = 0.0;
  double row_pos = 0.0;
};
ImagePosition image_position(const PanoramaGrid& grid, const Vec3& direction_from_camera,
                             const YawSplit& yaw);

}  // namespace proom::geometry
