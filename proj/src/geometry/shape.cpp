#include "proom/geometry/shape.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "proom/util/text.hpp"

namespace proom::geometry {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({1.0, (b - a).norm() * (c - a).norm()});
  if (std::abs(v) <= 1e-12 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return p.x() >= std::min(a.x(), b.x()) - 1e-12 &&
         p.x() <= std::max(a.x(), b.x()) + 1e-12 &&
         p.y() >= std::min(a.y(), b.y()) - 1e-12 &&
         p.y() <= std::max(a.y(), b.y()) + 1e-12;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

void add(std::vector<ShapeDiagnostic>& list, std::string code, std::string msg) {
  list.push_back({std::move(code), std::move(msg)});
}

const char* kind_name(OpeningKind k) { return k == OpeningKind::door ? "door" : "window"; }

}  // namespace

std::string ShapeValidation::error_summary() const {
  std::string out;
  for (const auto& e : errors) {
    if (!out.empty()) out += "; ";
    out += e.code + ": " + e.message;
  }
  return out;
}

double signed_area(std::span<const Vec2> polygon) {
  double a = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) a += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * a;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

bool point_in_polygon(std::span<const Vec2> polygon, const Vec2& p, double eps) {
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (point_segment_distance(p, polygon[i], polygon[(i + 1) % n]) <= eps) return true;
  }
  bool inside = false;
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x) inside = !inside;
    }
  }
  return inside;
}

double boundary_distance(std::span<const Vec2> polygon, const Vec2& p) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i)
    best = std::min(best, point_segment_distance(p, polygon[i], polygon[(i + 1) % n]));
  return best;
}

Vec2 area_centroid(std::span<const Vec2> polygon) {
  const double area = signed_area(polygon);
  Vec2 c = Vec2::Zero();
  const std::size_t n = polygon.size();
  if (std::abs(area) < 1e-15) {
    for (const auto& p : polygon) c += p;
    return c / static_cast<double>(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = polygon[i];
    const Vec2& b = polygon[(i + 1) % n];
    const double w = cross(a, b);
    c += (a + b) * w;
  }
  return c / (6.0 * area);
}

Vec2 pole_of_inaccessibility(std::span<const Vec2> polygon) {
  PlanBounds bounds = plan_bounds(polygon);
  Vec2 best = bounds.center();
  double best_dist = point_in_polygon(polygon, best, 0.0) ? boundary_distance(polygon, best) : -1.0;
  Vec2 lo = bounds.min;
  Vec2 hi = bounds.max;
  constexpr int kSteps = 24;
  for (int iter = 0; iter < 8; ++iter) {
    const Vec2 step = (hi - lo) / kSteps;
    for (int i = 0; i <= kSteps; ++i) {
      for (int j = 0; j <= kSteps; ++j) {
        const Vec2 p(lo.x() + i * step.x(), lo.y() + j * step.y());
        if (!point_in_polygon(polygon, p, 0.0)) continue;
        const double d = boundary_distance(polygon, p);
        if (d > best_dist) {
          best_dist = d;
          best = p;
        }
      }
    }
    lo = best - 2.0 * step;
    hi = best + 2.0 * step;
  }
  return best;
}

PlanBounds plan_bounds(std::span<const Vec2> polygon) {
  PlanBounds b;
  if (polygon.empty()) return b;
  b.min = b.max = polygon.front();
  for (const auto& p : polygon) {
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  return b;
}

ShapeValidation validate_shape(const RoomShape& input) {
  ShapeValidation out;
  RoomShape shape = input;
  const std::size_t n = shape.floor_corners.size();

  if (n < 3) {
    add(out.errors, "too-few-corners", "a room needs at least 3 corners, got " + std::to_string(n));
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!shape.floor_corners[i].allFinite()) {
      add(out.errors, "non-finite", "corner " + std::to_string(i) + " is not finite");
      return out;
    }
  }
  if (!(shape.ceiling_height > 0.0) || !std::isfinite(shape.ceiling_height))
    add(out.errors, "non-positive-height", "ceiling_height must be > 0");
  if (!std::isfinite(shape.floor_z)) add(out.errors, "non-finite", "floor_z is not finite");

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = shape.floor_corners[i];
    const Vec2& b = shape.floor_corners[(i + 1) % n];
    if ((b - a).norm() <= 1e-9)
      add(out.errors, "degenerate-edge", "wall " + std::to_string(i) + " has zero length");
  }
  if (!out.errors.empty()) return out;

  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = shape.floor_corners[(i + n - 1) % n];
    const Vec2& b = shape.floor_corners[i];
    const Vec2& c = shape.floor_corners[(i + 1) % n];
    const double area2 = cross(b - a, c - b);
    if (std::abs(area2) <= 1e-9 * (b - a).norm() * (c - b).norm()) {
      add(out.errors, "collinear-corners",
          "corners " + std::to_string((i + n - 1) % n) + ", " + std::to_string(i) + ", " +
              std::to_string((i + 1) % n) + " are collinear");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_intersect(shape.floor_corners[i], shape.floor_corners[(i + 1) % n],
                             shape.floor_corners[j], shape.floor_corners[(j + 1) % n])) {
        add(out.errors, "self-intersection",
            "walls " + std::to_string(i) + " and " + std::to_string(j) + " intersect");
      }
    }
  }
  if (!out.errors.empty()) return out;

  const double area = signed_area(shape.floor_corners);
  if (std::abs(area) <= 1e-12) {
    add(out.errors, "zero-area", "polygon has zero area");
    return out;
  }
  if (area < 0) {
    std::vector<double> lengths(n);
    for (std::size_t i = 0; i < n; ++i)
      lengths[i] = (shape.corner(i + 1) - shape.corner(i)).norm();
    std::reverse(shape.floor_corners.begin(), shape.floor_corners.end());
    for (auto& o : shape.openings) {
      if (o.wall < 0 || o.wall >= static_cast<int>(n)) continue;
      const double len = lengths[o.wall];
      // old wall w becomes new wall n-2-w (mod n), traversed backwards
      o.wall = static_cast<int>((2 * n - 2 - o.wall) % n);
      o.offset = len - o.offset - o.width;
    }
    add(out.warnings, "clockwise", "corners were clockwise and have been reversed");
  }

  for (std::size_t k = 0; k < shape.openings.size(); ++k) {
    const Opening& o = shape.openings[k];
    const std::string tag = std::string(kind_name(o.kind)) + " " + std::to_string(k);
    if (o.wall < 0 || o.wall >= static_cast<int>(n)) {
      add(out.errors, "opening-wall", tag + " references a missing wall");
      continue;
    }
    const double len = (shape.corner(o.wall + 1) - shape.corner(o.wall)).norm();
    if (!(o.width > 0) || !(o.height > 0))
      add(out.errors, "opening-size", tag + " must have positive width and height");
    if (o.offset < -1e-9 || o.offset + o.width > len + 1e-9)
      add(out.errors, "opening-extent", tag + " extends past its wall");
    if (o.sill < -1e-9 || o.sill + o.height > shape.ceiling_height + 1e-9)
      add(out.errors, "opening-height", tag + " reaches above the ceiling or below the floor");
  }
  if (out.errors.empty()) out.shape = std::move(shape);
  return out;
}

RoomShape require_valid_shape(const RoomShape& shape) {
  auto v = validate_shape(shape);
  if (!v.ok()) throw GeometryError("invalid room shape: " + v.error_summary());
  return *v.shape;
}

CameraPose default_camera(const RoomShape& shape) {
  CameraPose cam;
  const auto& poly = shape.floor_corners;
  Vec2 c = area_centroid(poly);
  if (!point_in_polygon(poly, c, 0.0) || boundary_distance(poly, c) < 1e-6)
    c = pole_of_inaccessibility(poly);
  cam.position = c;
  cam.height = 1.6 < shape.ceiling_height - 0.05 ? 1.6 : 0.5 * shape.ceiling_height;
  cam.yaw = 0.0;
  return cam;
}

void require_valid_camera(const RoomShape& shape, const CameraPose& cam) {
  const auto& poly = shape.floor_corners;
  if (!cam.position.allFinite() || !point_in_polygon(poly, cam.position, 0.0) ||
      boundary_distance(poly, cam.position) <= 1e-9)
    throw GeometryError("camera is not strictly inside the floor polygon");
  if (!(cam.height > 0.0) || !(cam.height < shape.ceiling_height))
    throw GeometryError("camera height must lie strictly between floor and ceiling");
  if (!std::isfinite(cam.yaw)) throw GeometryError("camera yaw is not finite");
}

std::string serialize_shape(const RoomShape& shape) {
  using util::format_number;
  std::ostringstream os;
  os << "ceiling_height = " << format_number(shape.ceiling_height) << "\n";
  os << "floor_z = " << format_number(shape.floor_z) << "\n";
  for (const auto& p : shape.floor_corners)
    os << "corner = " << format_number(p.x()) << " " << format_number(p.y()) << "\n";
  for (const auto& o : shape.openings) {
    os << "opening = " << kind_name(o.kind) << " " << o.wall << " " << format_number(o.offset)
       << " " << format_number(o.width) << " " << format_number(o.sill) << " "
       << format_number(o.height) << "\n";
  }
  return os.str();
}

RoomShape parse_shape(const std::string& text) {
  RoomShape shape;
  shape.ceiling_height = 2.8;
  bool saw_corner = false;
  int line_no = 0;
  for (const auto& raw : util::split_lines(text)) {
    ++line_no;
    std::string_view line = raw;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = util::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const auto fail = [&](const std::string& what) {
      throw GeometryError("shape line " + std::to_string(line_no) + ": " + what);
    };
    if (eq == std::string_view::npos) fail("expected 'key = value'");
    const std::string key(util::trim(line.substr(0, eq)));
    std::istringstream values{std::string(util::trim(line.substr(eq + 1)))};
    std::vector<std::string> tokens;
    for (std::string t; values >> t;) tokens.push_back(t);
    auto num = [&](std::size_t i) {
      double v = 0;
      if (i >= tokens.size() || !util::parse_number(tokens[i], v)) fail("expected a number");
      return v;
    };
    if (key == "ceiling_height") {
      if (tokens.size() != 1) fail("ceiling_height takes one value");
      shape.ceiling_height = num(0);
    } else if (key == "floor_z") {
      if (tokens.size() != 1) fail("floor_z takes one value");
      shape.floor_z = num(0);
    } else if (key == "corner") {
      if (tokens.size() != 2) fail("corner takes two values");
      shape.floor_corners.emplace_back(num(0), num(1));
      saw_corner = true;
    } else if (key == "opening") {
      if (tokens.size() != 6) fail("opening takes: kind wall offset width sill height");
      Opening o;
      if (tokens[0] == "door") o.kind = OpeningKind::door;
      else if (tokens[0] == "window") o.kind = OpeningKind::window;
      else fail("unknown opening kind '" + tokens[0] + "'");
      const double wall = num(1);
      if (wall != std::floor(wall)) fail("wall index must be an integer");
      o.wall = static_cast<int>(wall);
      o.offset = num(2);
      o.width = num(3);
      o.sill = num(4);
      o.height = num(5);
      shape.openings.push_back(o);
    } else {
      fail("unknown key '" + key + "'");
    }
  }
  if (!saw_corner) throw GeometryError("shape text has no corners");
  return shape;
}

const char* label_name(SurfaceLabel label) {
  switch (label) {
    case SurfaceLabel::ceiling: return "ceiling";
    case SurfaceLabel::wall: return "wall";
    case SurfaceLabel::floor: return "floor";
    case SurfaceLabel::door: return "door";
    case SurfaceLabel::window: return "window";
  }
  return "unknown";
}

void PanoramaGrid::validate() const {
  if (width < 64 || height <= 0 || width != 2 * height || width % 2 != 0 || height % 2 != 0)
    throw GeometryError("panorama grid must satisfy W = 2H, W >= 64, both even; got " +
                        std::to_string(width) + "x" + std::to_string(height));
}

PanoramaGrid make_grid(int width) {
  PanoramaGrid g{width, width / 2};
  g.validate();
  return g;
}

}  // namespace proom::geometry
