#include "proom/geometry/projection.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace proom::geometry {

namespace {
constexpr double kFractionSteps = 1048576.0;  // 2^20
}

Spherical project_spherical(const Vec3& p) {
  const double r = p.norm();
  if (!(r > 0.0) || !std::isfinite(r)) throw GeometryError("project_spherical: zero-length vector");
  Spherical s;
  s.r = r;
  if (p.x() == 0.0 && p.y() == 0.0) {
    s.theta = 0.0;
  } else {
    s.theta = std::atan2(p.x(), p.y());
    if (s.theta == -kPi) s.theta = kPi;
  }
  s.phi = std::acos(std::clamp(p.z() / r, -1.0, 1.0));
  return s;
}

UV spherical_to_uv(double theta, double phi) {
  if (!(theta > -kPi && theta <= kPi) || !(phi >= 0.0 && phi <= kPi))
    throw GeometryError("spherical_to_uv: angles out of range");
  return {(theta + kPi) / (2.0 * kPi), phi / kPi};
}

YawSplit split_yaw(double yaw, int width) {
  const double px = yaw * width / (2.0 * kPi);
  YawSplit s;
  double whole = std::floor(px);
  double frac = std::round((px - whole) * kFractionSteps) / kFractionSteps;
  if (frac >= 1.0) {
    whole += 1.0;
    frac = 0.0;
  }
  s.columns = static_cast<long long>(whole);
  s.fraction = frac;
  return s;
}

double column_azimuth(int width, int col, double yaw) {
  const YawSplit s = split_yaw(yaw, width);
  const long long j = ((col + s.columns) % width + width) % width;
  double theta = ((static_cast<double>(j) + 0.5 + s.fraction) / width) * 2.0 * kPi - kPi;
  if (theta > kPi) theta -= 2.0 * kPi;
  return theta;
}

double row_elevation(int height, int row) {
  return kPi / 2.0 - ((row + 0.5) / height) * kPi;
}

Vec3 direction_from_angles(double azimuth, double elevation) {
  const double c = std::cos(elevation);
  return {c * std::sin(azimuth), c * std::cos(azimuth), std::sin(elevation)};
}

PixelRay pixel_to_ray(const PanoramaGrid& grid, int row, int col, const CameraPose& cam) {
  if (row < 0 || row >= grid.height || col < 0 || col >= grid.width)
    throw GeometryError("pixel (" + std::to_string(row) + ", " + std::to_string(col) +
                        ") is outside the " + std::to_string(grid.width) + "x" +
                        std::to_string(grid.height) + " grid");
  PixelRay ray;
  ray.elevation = row_elevation(grid.height, row);
  ray.azimuth = column_azimuth(grid.width, col, cam.yaw);
  ray.direction = direction_from_angles(ray.azimuth, ray.elevation);
  return ray;
}

ImagePosition image_position(const PanoramaGrid& grid, const Vec3& dir, const YawSplit& yaw) {
  const Spherical s = project_spherical(dir);
  // yaw-independent column coordinate first, then the exact integer shift
  const double x = (s.theta + kPi) / (2.0 * kPi) * grid.width - yaw.fraction;
  const double whole = std::floor(x);
  ImagePosition pos;
  pos.col_frac = x - whole;
  const long long w = grid.width;
  pos.col = ((static_cast<long long>(whole) - yaw.columns) % w + w) % w;
  pos.row_pos = s.phi / kPi * grid.height;
  return pos;
}

}  // namespace proom::geometry
