#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace proom::geometry {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class OpeningKind { door, window };

/// A rectangle cut into one wall. `wall` i runs from corner i to corner i+1;
/// `offset` is measured along the wall from corner i to the near edge of the
/// opening. `sill` and `height` are relative to the floor.
struct Opening {
  OpeningKind kind = OpeningKind::door;
  int wall = 0;
  double offset = 0.0;
  double width = 0.0;
  double sill = 0.0;
  double height = 0.0;

  bool operator==(const Opening&) const = default;
};

/// Plan-view floor polygon (counter-clockwise, meters) extruded to a flat
/// ceiling `ceiling_height` above `floor_z`. Walls are vertical.
struct RoomShape {
  std::vector<Vec2> floor_corners;
  double ceiling_height = 2.8;
  double floor_z = 0.0;
  std::vector<Opening> openings;

  std::size_t wall_count() const { return floor_corners.size(); }
  const Vec2& corner(std::size_t i) const {
    return floor_corners[i % floor_corners.size()];
  }
  double ceiling_z() const { return floor_z + ceiling_height; }

  bool operator==(const RoomShape&) const = default;
};

/// Panorama camera. `height` is above the shape's floor_z; `yaw` rotates the
/// image azimuth origin.
struct CameraPose {
  Vec2 position = Vec2::Zero();
  double height = 1.6;
  double yaw = 0.0;

  bool operator==(const CameraPose&) const = default;
};

struct PanoramaGrid {
  int width = 1024;
  int height = 512;

  /// Throws GeometryError unless W = 2H, W >= 64 and both even.
  void validate() const;
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  bool operator==(const PanoramaGrid&) const = default;
};

PanoramaGrid make_grid(int width);

/// Row-major W x H raster on a panorama grid.
template <typename T>
struct Raster {
  PanoramaGrid grid{64, 32};
  std::vector<T> pixels;

  Raster() = default;
  explicit Raster(PanoramaGrid g, T fill = T{})
      : grid(g), pixels(g.pixel_count(), fill) {}

  int width() const { return grid.width; }
  int height() const { return grid.height; }
  T& at(int row, int col) {
    return pixels[static_cast<std::size_t>(row) * grid.width + col];
  }
  const T& at(int row, int col) const {
    return pixels[static_cast<std::size_t>(row) * grid.width + col];
  }
  bool operator==(const Raster&) const = default;
};

enum class SurfaceLabel : std::uint8_t {
  ceiling = 0,
  wall = 1,
  floor = 2,
  door = 3,
  window = 4,
};

const char* label_name(SurfaceLabel label);

struct Rgb8 {
  std::uint8_t r = 0, g = 0, b = 0;
  bool operator==(const Rgb8&) const = default;
};

using LayoutMap = Raster<std::uint8_t>;
using DepthMap = Raster<double>;
using SemanticMap = Raster<SurfaceLabel>;
using TextureImage = Raster<Rgb8>;

/// Per-column v coordinates of the ceiling-wall and floor-wall boundaries.
struct Layout1D {
  std::vector<double> ceiling_v;
  std::vector<double> floor_v;

  std::size_t width() const { return ceiling_v.size(); }
  bool operator==(const Layout1D&) const = default;
};

/// Rolls a raster so that out(r, c) = in(r, (c + shift) mod W).
template <typename T>
Raster<T> roll_columns(const Raster<T>& in, int shift) {
  Raster<T> out(in.grid);
  const int w = in.width();
  const int s = ((shift % w) + w) % w;
  for (int r = 0; r < in.height(); ++r) {
    for (int c = 0; c < w; ++c) out.at(r, c) = in.at(r, (c + s) % w);
  }
  return out;
}

}  // namespace proom::geometry
