#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "proom/geometry/types.hpp"

namespace proom::furniture {

using geometry::Vec2;
using geometry::Vec3;

class FurnitureError : public std::runtime_error {
 public:
  enum class Kind { syntax, duplicate, missing_property, invalid, not_found, containment, manifest };
  FurnitureError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct FurnitureItem {
  std::string category;
  int index = 0;
  double length = 0;  // along the item's local x
  double width = 0;   // along the item's local y
  double height = 0;
  double left = 0;  // footprint center, room x
  double top = 0;   // footprint center, room y
  double orientation = 0;  // degrees CCW, [0, 360)

  std::string selector() const { return category + "-" + std::to_string(index); }
  /// Footprint corners in CCW order.
  std::array<Vec2, 4> footprint() const;
  bool operator==(const FurnitureItem&) const = default;
};

/// Plan bounding box of the room: `length` along x, `width` along y,
/// centered at (left, top). `outline` optionally records the floor polygon.
struct RoomExtents {
  double length = 0;
  double width = 0;
  double left = 0;
  double top = 0;
  std::vector<Vec2> outline;

  Vec2 center() const { return {left, top}; }
  bool operator==(const RoomExtents&) const = default;
};

struct FurnitureLayout {
  RoomExtents room;
  std::vector<FurnitureItem> items;

  const FurnitureItem* find(const std::string& category, int index) const;
  /// Lowest index of `category`, if any.
  const FurnitureItem* find_first(const std::string& category) const;
  int next_index(const std::string& category) const;
  bool operator==(const FurnitureLayout&) const = default;
};

RoomExtents extents_of(const geometry::RoomShape& shape);

/// Stanza grammar:
///   room { length: 4.00m; width: 4.00m; left: 2.00m; top: 2.00m; [outline: x y, x y, ...;] }
///   bed-0 { length: 2.10m; width: 1.60m; height: 1.00m; left: 2.00m; top: 1.20m; orientation: 90deg; }
/// Lengths take an optional "m" suffix, orientation an optional "deg" suffix.
/// /* */ comments are allowed between stanzas. Item order is kept.
FurnitureLayout parse_furniture_css(const std::string& text);
std::string serialize_furniture_css(const FurnitureLayout& layout);

/// Raw stanza: selector and property text, in source order.
struct Stanza {
  std::string selector;
  std::vector<std::pair<std::string, std::string>> props;
  int line = 0;

  const std::string* get(const std::string& name) const;
};
std::vector<Stanza> parse_stanzas(const std::string& text);
/// Value with an optional unit suffix ("m" or "deg").
double css_value(const std::string& text, const std::string& unit);
/// Shortest text that reads back exactly, with at least two decimals.
std::string format_length(double meters);

struct Violation {
  enum class Kind { out_of_room, overlap };
  Kind kind;
  std::string item;
  std::string other;  // overlap partner
  std::string message;
};

/// Out-of-room corners (even-odd test, epsilon 1e-9) and pairwise footprint
/// overlaps, against the layout's outline or, without one, its extents.
std::vector<Violation> containment_report(const FurnitureLayout& layout);
std::vector<Violation> containment_report(const geometry::RoomShape& shape, const FurnitureLayout& layout);

bool footprints_overlap(const FurnitureItem& a, const FurnitureItem& b);
bool inside(const std::vector<Vec2>& polygon, const FurnitureItem& item);
/// The outline, or the extents rectangle when there is none.
std::vector<Vec2> room_polygon(const RoomExtents& room);

}  // namespace proom::furniture
