#include "proom/geometry/panorama.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <string>

#include "proom/geometry/projection.hpp"
#include "proom/geometry/shape.hpp"

namespace proom::geometry {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

Vec2 plan_direction(double azimuth) { return {std::sin(azimuth), std::cos(azimuth)}; }

// Per-column wall hits for the whole grid.
std::vector<WallHit> column_hits(const RoomShape& shape, const CameraPose& cam, int width) {
  std::vector<WallHit> hits(static_cast<std::size_t>(width));
  for (int c = 0; c < width; ++c) hits[c] = wall_hit(shape, cam, column_azimuth(width, c, cam.yaw));
  return hits;
}

// Rasterizes sample points into a layout map; every pixel whose center lies
// within one pixel of a sample is set.
class BoundaryRasterizer {
 public:
  BoundaryRasterizer(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid)
      : shape_(shape), cam_(cam), grid_(grid), yaw_(split_yaw(cam.yaw, grid.width)), map_(grid, 0) {
    eye_ = Vec3(cam.position.x(), cam.position.y(), shape.floor_z + cam.height);
  }

  // Samples the straight 3D segment [a, b] adaptively so consecutive projected
  // samples are closer than kMaxStep pixels; hidden samples are skipped.
  void draw_segment(const Vec3& a, const Vec3& b, bool vertical_edge) {
    Sample sa = make_sample(a);
    Sample sb = make_sample(b);
    if (vertical_edge) {
      // a vertical edge is either entirely visible or entirely hidden
      const bool visible = plan_visible(a);
      if (!visible) return;
      sa.visible = sb.visible = true;
    } else {
      sa.visible = plan_visible(a);
      sb.visible = plan_visible(b);
    }
    mark(sa);
    mark(sb);
    refine(a, sa, b, sb, vertical_edge, sa.visible, 0);
  }

  LayoutMap take() { return std::move(map_); }

 private:
  static constexpr double kMaxStep = 0.25;

  struct Sample {
    ImagePosition pos;
    bool visible = false;
  };

  Sample make_sample(const Vec3& p) const {
    Sample s;
    s.pos = image_position(grid_, p - eye_, yaw_);
    return s;
  }

  bool plan_visible(const Vec3& p) const {
    const Vec2 rel(p.x() - cam_.position.x(), p.y() - cam_.position.y());
    const double dist = rel.norm();
    auto hit = cast_plan_ray(shape_, cam_.position, std::atan2(rel.x(), rel.y()));
    if (!hit) return false;
    return hit->distance >= dist - 1e-7 * (1.0 + dist);
  }

  double pixel_distance(const Sample& a, const Sample& b) const {
    const double w = grid_.width;
    double dx = (static_cast<double>(b.pos.col) + b.pos.col_frac) -
                (static_cast<double>(a.pos.col) + a.pos.col_frac);
    dx -= w * std::round(dx / w);
    const double dy = b.pos.row_pos - a.pos.row_pos;
    return std::sqrt(dx * dx + dy * dy);
  }

  void refine(const Vec3& a, const Sample& sa, const Vec3& b, const Sample& sb,
              bool vertical_edge, bool edge_visible, int depth) {
    if (depth > 40 || pixel_distance(sa, sb) < kMaxStep) return;
    const Vec3 m = 0.5 * (a + b);
    Sample sm = make_sample(m);
    sm.visible = vertical_edge ? edge_visible : plan_visible(m);
    mark(sm);
    refine(a, sa, m, sm, vertical_edge, edge_visible, depth + 1);
    refine(m, sm, b, sb, vertical_edge, edge_visible, depth + 1);
  }

  void mark(const Sample& s) {
    if (!s.visible) return;
    const int h = grid_.height;
    const long long w = grid_.width;
    const int r0 = static_cast<int>(std::floor(s.pos.row_pos - 1.5));
    const int r1 = static_cast<int>(std::floor(s.pos.row_pos + 0.5));
    for (int r = std::max(r0, 0); r <= std::min(r1, h - 1); ++r) {
      const double dy = (r + 0.5) - s.pos.row_pos;
      for (int k = -2; k <= 2; ++k) {
        const double dx = (k + 0.5) - s.pos.col_frac;
        if (dx * dx + dy * dy <= 1.0) {
          const long long c = ((s.pos.col + k) % w + w) % w;
          map_.at(r, static_cast<int>(c)) = 1;
        }
      }
    }
  }

  const RoomShape& shape_;
  const CameraPose& cam_;
  PanoramaGrid grid_;
  YawSplit yaw_;
  Vec3 eye_;
  LayoutMap map_;
};

}  // namespace

std::optional<WallHit> cast_plan_ray(const RoomShape& shape, const Vec2& origin, double azimuth) {
  const Vec2 d = plan_direction(azimuth);
  std::optional<WallHit> best;
  const std::size_t n = shape.wall_count();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = shape.corner(i);
    const Vec2 e = shape.corner(i + 1) - a;
    const double denom = cross(d, e);
    if (std::abs(denom) <= 1e-15 * e.norm()) continue;
    const Vec2 ao = a - origin;
    const double t = cross(ao, e) / denom;
    const double s = cross(ao, d) / denom;
    if (!(t > 1e-12) || s < -1e-12 || s > 1.0 + 1e-12) continue;
    // near-equal hits (shared vertex) keep the earlier, smaller-index wall
    if (!best || t < best->distance - 1e-12 * (1.0 + t)) {
      const double len = e.norm();
      best = WallHit{t, static_cast<int>(i), std::clamp(s, 0.0, 1.0) * len};
    }
  }
  return best;
}

WallHit wall_hit(const RoomShape& shape, const CameraPose& cam, double azimuth) {
  auto hit = cast_plan_ray(shape, cam.position, azimuth);
  if (!hit) throw GeometryError("camera is outside the room polygon (plan ray escaped)");
  return *hit;
}

LayoutMap gen_layout(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid) {
  grid.validate();
  require_valid_camera(shape, cam);
  BoundaryRasterizer raster(shape, cam, grid);
  const double zf = shape.floor_z;
  const double zc = shape.ceiling_z();
  const std::size_t n = shape.wall_count();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2& a = shape.corner(i);
    const Vec2& b = shape.corner(i + 1);
    raster.draw_segment({a.x(), a.y(), zf}, {a.x(), a.y(), zc}, true);
    raster.draw_segment({a.x(), a.y(), zf}, {b.x(), b.y(), zf}, false);
    raster.draw_segment({a.x(), a.y(), zc}, {b.x(), b.y(), zc}, false);
  }
  return raster.take();
}

DepthMap gen_depth(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid) {
  grid.validate();
  require_valid_camera(shape, cam);
  DepthMap depth(grid, 0.0);
  const double z_floor = -cam.height;
  const double z_ceiling = shape.ceiling_height - cam.height;
  const auto hits = column_hits(shape, cam, grid.width);
  for (int r = 0; r < grid.height; ++r) {
    const double a = row_elevation(grid.height, r);
    const double sin_a = std::sin(a);
    const double cos_a = std::cos(a);
    const double tan_a = std::tan(a);
    for (int c = 0; c < grid.width; ++c) {
      const double cs = hits[c].distance;
      const double z_hit = cs * tan_a;
      double d;
      if (z_hit > z_ceiling) d = std::abs(z_ceiling / sin_a);
      else if (z_hit < z_floor) d = std::abs(z_floor / sin_a);
      else d = std::abs(cs / cos_a);
      depth.at(r, c) = d;
    }
  }
  return depth;
}

namespace {

// Analytic ceiling / wall / floor class of every pixel center.
std::vector<SurfaceLabel> surface_classes(const RoomShape& shape, const CameraPose& cam,
                                          const PanoramaGrid& grid) {
  require_valid_camera(shape, cam);
  const double z_floor = -cam.height;
  const double z_ceiling = shape.ceiling_height - cam.height;
  const auto hits = column_hits(shape, cam, grid.width);
  std::vector<SurfaceLabel> out(grid.pixel_count(), SurfaceLabel::wall);
  for (int r = 0; r < grid.height; ++r) {
    const double tan_a = std::tan(row_elevation(grid.height, r));
    for (int c = 0; c < grid.width; ++c) {
      const double z_hit = hits[c].distance * tan_a;
      auto& px = out[static_cast<std::size_t>(r) * grid.width + c];
      if (z_hit > z_ceiling) px = SurfaceLabel::ceiling;
      else if (z_hit < z_floor) px = SurfaceLabel::floor;
    }
  }
  return out;
}

RegionMap segment_impl(const LayoutMap& layout, const PanoramaGrid& grid,
                       const std::vector<SurfaceLabel>* hint) {
  grid.validate();
  if (layout.grid != grid) throw GeometryError("gen_semantic: layout grid mismatch");
  const int w = grid.width;
  const int h = grid.height;
  const std::size_t npix = grid.pixel_count();

  RegionMap out;
  out.grid = grid;
  std::vector<int>& comp = out.region;
  comp.assign(npix, -1);
  int ncomp = 0;
  std::deque<std::size_t> queue;
  for (std::size_t start = 0; start < npix; ++start) {
    if (layout.pixels[start] != 0 || comp[start] >= 0) continue;
    comp[start] = ncomp;
    queue.push_back(start);
    while (!queue.empty()) {
      const std::size_t idx = queue.front();
      queue.pop_front();
      const int r = static_cast<int>(idx / w);
      const int c = static_cast<int>(idx % w);
      const std::array<std::pair<int, int>, 4> nbrs{
          {{r - 1, c}, {r + 1, c}, {r, (c + 1) % w}, {r, (c + w - 1) % w}}};
      for (auto [rr, cc] : nbrs) {
        if (rr < 0 || rr >= h) continue;
        const std::size_t j = static_cast<std::size_t>(rr) * w + cc;
        if (layout.pixels[j] != 0 || comp[j] >= 0) continue;
        comp[j] = ncomp;
        queue.push_back(j);
      }
    }
    ++ncomp;
  }
  out.region_count = ncomp;

  auto dominant_component = [&](int row) {
    std::vector<int> counts(static_cast<std::size_t>(ncomp), 0);
    for (int c = 0; c < w; ++c) {
      const int id = comp[static_cast<std::size_t>(row) * w + c];
      if (id >= 0) ++counts[id];
    }
    int best = -1;
    for (int i = 0; i < ncomp; ++i)
      if (counts[i] > 0 && (best < 0 || counts[i] > counts[best])) best = i;
    return best;
  };
  out.ceiling_region = dominant_component(0);
  out.floor_region = dominant_component(h - 1);
  if (out.ceiling_region < 0 || out.floor_region < 0)
    throw GeometryError("gen_semantic: boundary covers an entire pole row");
  if (out.ceiling_region == out.floor_region)
    throw GeometryError("gen_semantic: ceiling and floor regions merge; layout is not closed");

  auto priority = [&](int id) {
    // ties during closing prefer wall regions, then floor, then ceiling
    if (id == out.floor_region) return 1;
    if (id == out.ceiling_region) return 2;
    return 0;
  };

  auto class_of = [&](int id) {
    if (id == out.ceiling_region) return SurfaceLabel::ceiling;
    if (id == out.floor_region) return SurfaceLabel::floor;
    return SurfaceLabel::wall;
  };

  // Close boundary pixels into the nearest region (Euclidean distance between
  // pixel centers, periodic in x). Equidistant candidates: most pixels wins,
  // then wall over floor over ceiling. With a hint, only regions of the
  // hinted class are candidates; if none is in reach the hint is ignored.
  constexpr int kMaxRadius = 16;
  std::vector<int> closed = comp;
  std::vector<std::pair<int, int>> ties;
  auto gather = [&](int r, int c, const SurfaceLabel* want) {
    int best_d2 = std::numeric_limits<int>::max();
    ties.clear();
    for (int k = 1; k <= kMaxRadius && k * k <= best_d2; ++k) {
      for (int dr = -k; dr <= k; ++dr) {
        const int rr = r + dr;
        if (rr < 0 || rr >= h) continue;
        const bool edge_row = dr == -k || dr == k;
        for (int dc = -k; dc <= k; dc += edge_row ? 1 : 2 * k) {
          const int id = comp[static_cast<std::size_t>(rr) * w + ((c + dc) % w + w) % w];
          if (id < 0 || (want && class_of(id) != *want)) continue;
          const int d2 = dr * dr + dc * dc;
          if (d2 > best_d2) continue;
          if (d2 < best_d2) {
            best_d2 = d2;
            ties.clear();
          }
          auto it = std::find_if(ties.begin(), ties.end(), [&](const auto& t) { return t.first == id; });
          if (it == ties.end()) ties.emplace_back(id, 1);
          else ++it->second;
        }
      }
    }
  };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      if (comp[i] >= 0) continue;
      gather(r, c, hint ? &(*hint)[i] : nullptr);
      if (ties.empty() && hint) gather(r, c, nullptr);
      if (ties.empty()) throw GeometryError("gen_semantic: boundary band too thick to close");
      auto best = ties.begin();
      for (auto it = ties.begin() + 1; it != ties.end(); ++it) {
        if (it->second > best->second ||
            (it->second == best->second &&
             (priority(it->first) < priority(best->first) ||
              (priority(it->first) == priority(best->first) && it->first < best->first))))
          best = it;
      }
      closed[i] = best->first;
    }
  }
  comp = std::move(closed);
  return out;
}

SemanticMap label_regions(const RegionMap& regions) {
  const PanoramaGrid& grid = regions.grid;
  SemanticMap out(grid, SurfaceLabel::wall);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) {
    const int id = regions.region[i];
    if (id == regions.ceiling_region) out.pixels[i] = SurfaceLabel::ceiling;
    else if (id == regions.floor_region) out.pixels[i] = SurfaceLabel::floor;
  }
  return out;
}

}  // namespace

RegionMap segment_layout(const LayoutMap& layout, const PanoramaGrid& grid) {
  return segment_impl(layout, grid, nullptr);
}

RegionMap segment_layout(const LayoutMap& layout, const PanoramaGrid& grid, const RoomShape& shape,
                         const CameraPose& cam) {
  grid.validate();
  const auto hint = surface_classes(shape, cam, grid);
  return segment_impl(layout, grid, &hint);
}

SemanticMap gen_semantic(const LayoutMap& layout, const PanoramaGrid& grid) {
  return label_regions(segment_layout(layout, grid));
}

SemanticMap gen_semantic(const LayoutMap& layout, const PanoramaGrid& grid, const RoomShape& shape,
                         const CameraPose& cam) {
  SemanticMap m = label_regions(segment_layout(layout, grid, shape, cam));
  paint_openings(m, shape, cam);
  return m;
}

void paint_openings(SemanticMap& semantic, const RoomShape& shape, const CameraPose& cam) {
  if (shape.openings.empty()) return;
  require_valid_camera(shape, cam);
  const PanoramaGrid grid = semantic.grid;
  const auto hits = column_hits(shape, cam, grid.width);
  for (int r = 0; r < grid.height; ++r) {
    const double tan_a = std::tan(row_elevation(grid.height, r));
    for (int c = 0; c < grid.width; ++c) {
      SurfaceLabel& l = semantic.at(r, c);
      if (l != SurfaceLabel::wall) continue;
      const WallHit& hit = hits[c];
      const double z = cam.height + hit.distance * tan_a;  // above the floor
      for (const auto& o : shape.openings) {
        if (o.wall != hit.wall) continue;
        if (hit.along >= o.offset && hit.along <= o.offset + o.width && z >= o.sill &&
            z <= o.sill + o.height) {
          l = o.kind == OpeningKind::door ? SurfaceLabel::door : SurfaceLabel::window;
          break;
        }
      }
    }
  }
}

Layout1D encode_layout_1d(const RoomShape& shape, const CameraPose& cam, int width) {
  const PanoramaGrid grid = make_grid(width);
  require_valid_camera(shape, cam);
  const double z_floor = -cam.height;
  const double z_ceiling = shape.ceiling_height - cam.height;
  Layout1D out;
  out.ceiling_v.resize(static_cast<std::size_t>(width));
  out.floor_v.resize(static_cast<std::size_t>(width));
  const auto hits = column_hits(shape, cam, grid.width);
  for (int c = 0; c < width; ++c) {
    const double cs = hits[c].distance;
    out.ceiling_v[c] = std::acos(z_ceiling / std::sqrt(cs * cs + z_ceiling * z_ceiling)) / kPi;
    out.floor_v[c] = std::acos(z_floor / std::sqrt(cs * cs + z_floor * z_floor)) / kPi;
  }
  return out;
}

double layout_1d_distance(const Layout1D& a, const Layout1D& b) {
  if (a.ceiling_v.size() != b.ceiling_v.size() || a.floor_v.size() != b.floor_v.size() ||
      a.ceiling_v.size() != a.floor_v.size())
    throw GeometryError("layout_1d_distance: width mismatch");
  // ceiling entries first, then floor entries
  double sum = 0.0;
  for (std::size_t i = 0; i < a.ceiling_v.size(); ++i) {
    const double d = a.ceiling_v[i] - b.ceiling_v[i];
    sum += d * d;
  }
  for (std::size_t i = 0; i < a.floor_v.size(); ++i) {
    const double d = a.floor_v[i] - b.floor_v[i];
    sum += d * d;
  }
  return sum;
}

OracleMaps raycast_oracle(const RoomShape& shape, const CameraPose& cam, const PanoramaGrid& grid) {
  grid.validate();
  OracleMaps out{DepthMap(grid, 0.0), SemanticMap(grid, SurfaceLabel::wall)};
  const Vec3 eye(cam.position.x(), cam.position.y(), shape.floor_z + cam.height);
  const double zf = shape.floor_z;
  const double zc = shape.ceiling_z();
  const std::size_t n = shape.wall_count();

  for (int r = 0; r < grid.height; ++r) {
    for (int c = 0; c < grid.width; ++c) {
      const Vec3 d = pixel_to_ray(grid, r, c, cam).direction;
      double best_t = std::numeric_limits<double>::infinity();
      SurfaceLabel best_label = SurfaceLabel::wall;

      auto try_plane = [&](double z, SurfaceLabel label) {
        if (d.z() == 0.0) return;
        const double t = (z - eye.z()) / d.z();
        if (!(t > 0.0) || t >= best_t) return;
        const Vec3 p = eye + t * d;
        if (!point_in_polygon(shape.floor_corners, Vec2(p.x(), p.y()), 1e-9)) return;
        best_t = t;
        best_label = label;
      };
      try_plane(zf, SurfaceLabel::floor);
      try_plane(zc, SurfaceLabel::ceiling);

      for (std::size_t i = 0; i < n; ++i) {
        const Vec2 a = shape.corner(i);
        const Vec2 b = shape.corner(i + 1);
        const Vec3 normal(-(b.y() - a.y()), b.x() - a.x(), 0.0);
        const double denom = normal.dot(d);
        if (denom == 0.0) continue;
        const double t = normal.dot(Vec3(a.x(), a.y(), zf) - eye) / denom;
        if (!(t > 0.0) || t >= best_t) continue;
        const Vec3 p = eye + t * d;
        const Vec2 ab = b - a;
        const double s = (Vec2(p.x(), p.y()) - a).dot(ab) / ab.squaredNorm();
        if (s < -1e-12 || s > 1.0 + 1e-12 || p.z() < zf - 1e-12 || p.z() > zc + 1e-12) continue;
        best_t = t;
        best_label = SurfaceLabel::wall;
        const double along = s * ab.norm();
        const double height = p.z() - zf;
        for (const auto& o : shape.openings) {
          if (o.wall != static_cast<int>(i)) continue;
          if (along >= o.offset && along <= o.offset + o.width && height >= o.sill &&
              height <= o.sill + o.height) {
            best_label = o.kind == OpeningKind::door ? SurfaceLabel::door : SurfaceLabel::window;
            break;
          }
        }
      }
      out.depth.at(r, c) = best_t;
      out.semantic.at(r, c) = best_label;
    }
  }
  return out;
}

}  // namespace proom::geometry
