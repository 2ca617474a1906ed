#pragma once

#include <cmath>
#include <random>

#include "proom/geometry/shape.hpp"

namespace proom::testing {

inline geometry::RoomShape rotated(geometry::RoomShape s, double angle, const geometry::Vec2& shift) {
  const double c = std::cos(angle), sn = std::sin(angle);
  for (auto& p : s.floor_corners) p = geometry::Vec2(c * p.x() - sn * p.y(), sn * p.x() + c * p.y()) + shift;
  return s;
}

inline geometry::RoomShape rectangle(double w, double l, double height) {
  geometry::RoomShape s;
  s.floor_corners = {{0, 0}, {w, 0}, {w, l}, {0, l}};
  s.ceiling_height = height;
  return s;
}

/// Width w (x) by length l (y) with an a x b notch removed from the (w, l) corner.
inline geometry::RoomShape l_shape(double w, double l, double a, double b, double height) {
  geometry::RoomShape s;
  s.floor_corners = {{0, 0}, {w, 0}, {w, l - b}, {w - a, l - b}, {w - a, l}, {0, l}};
  s.ceiling_height = height;
  return s;
}

struct RandomRoom {
  geometry::RoomShape shape;
  geometry::CameraPose camera;
};

inline RandomRoom random_room(std::mt19937_64& rng, bool l_shaped, bool random_yaw = true) {
  std::uniform_real_distribution<double> side(2.5, 8.0);
  std::uniform_real_distribution<double> height(2.4, 3.2);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> angle(-geometry::kPi, geometry::kPi);
  const double w = side(rng), l = side(rng), h = height(rng);
  geometry::RoomShape s;
  if (l_shaped) {
    const double a = w * (0.25 + 0.4 * unit(rng));
    const double b = l * (0.25 + 0.4 * unit(rng));
    s = l_shape(w, l, a, b, h);
  } else {
    s = rectangle(w, l, h);
  }
  s = rotated(s, angle(rng), geometry::Vec2(4.0 * unit(rng) - 2.0, 4.0 * unit(rng) - 2.0));
  RandomRoom room{s, geometry::default_camera(s)};
  if (random_yaw) room.camera.yaw = angle(rng);
  return room;
}

}  // namespace proom::testing
