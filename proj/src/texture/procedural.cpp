#include "proom/texture/procedural.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "proom/geometry/projection.hpp"

namespace proom::texture {

using geometry::DepthMap;
using geometry::kPi;
using geometry::PanoramaGrid;
using geometry::Rgb8;
using geometry::SemanticMap;
using geometry::SurfaceLabel;
using geometry::TextureImage;

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double hash01(std::int64_t a, std::int64_t b, std::uint64_t salt) {
  const std::uint64_t h = mix64(mix64(static_cast<std::uint64_t>(a) ^ salt) ^ static_cast<std::uint64_t>(b));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

bool is_wall_like(SurfaceLabel l) {
  return l == SurfaceLabel::wall || l == SurfaceLabel::door || l == SurfaceLabel::window;
}

struct Color {
  double r = 0, g = 0, b = 0;
};

Color to_color(const Rgb8& c) { return {double(c.r), double(c.g), double(c.b)}; }

// Pattern value at surface coordinates (h >= 0 across the seam-symmetric
// axis, v along the other axis), for a feature size `p`.
Color pattern_at(const SurfaceStyle& s, double p, double h, double v) {
  const Color base = to_color(s.base);
  const Color second = to_color(s.secondary);
  switch (s.pattern) {
    case Pattern::stripes: {
      const auto k = static_cast<std::int64_t>(std::floor(h / (0.5 * p) + 0.5));
      return (k % 2 == 0) ? base : second;
    }
    case Pattern::planks: {
      const auto k = static_cast<std::int64_t>(std::floor(h / p + 0.5));
      const double across = h / p - static_cast<double>(k);  // in [-0.5, 0.5)
      if (std::abs(std::abs(across) - 0.5) < 0.03) return second;
      const double length = 6.0 * p;
      const double offset = hash01(k, 17, 0x51ed) * length;
      const double along = (v - offset) / length;
      if (std::abs(along - std::round(along)) * length < 0.03 * p) return second;
      const double tint = 1.0 + 0.06 * (hash01(k, 29, 0x7a11) - 0.5);
      return {base.r * tint, base.g * tint, base.b * tint};
    }
    case Pattern::tiles: {
      const double gu = h / p + 0.5;
      const double gv = v / p;
      const double grout = 0.04;
      if (std::abs(gu - std::round(gu)) < grout * 0.5 || std::abs(gv - std::round(gv)) < grout * 0.5)
        return second;
      return base;
    }
    case Pattern::speckle: {
      const auto i = static_cast<std::int64_t>(std::floor(h / p + 0.5));
      const auto j = static_cast<std::int64_t>(std::floor(v / p));
      if (hash01(i, j, 0x5bec) < 0.35) {
        const double dx = h / p - static_cast<double>(i);
        const double dy = v / p - static_cast<double>(j) - 0.5;
        if (dx * dx + dy * dy < 0.09) return second;
      }
      return base;
    }
    default:
      return base;
  }
}

double median(std::vector<double> v, double fallback) {
  if (v.empty()) return fallback;
  std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
  return v[v.size() / 2];
}

}  // namespace

TextureImage gen_texture_procedural(const SemanticMap& semantic, const DepthMap& depth, const TextureSpec& spec,
                                    std::uint64_t seed) {
  const PanoramaGrid grid = semantic.grid;
  grid.validate();
  if (depth.grid != grid) throw geometry::GeometryError("gen_texture: depth and semantic grids differ");
  const int w = grid.width;
  const int h = grid.height;

  std::vector<double> sin_row(h), tan_row(h);
  for (int r = 0; r < h; ++r) {
    const double a = geometry::row_elevation(h, r);
    sin_row[r] = std::sin(a);
    tan_row[r] = std::tan(a);
  }

  // camera height above the floor from the nadir rows
  std::vector<double> samples;
  for (int c = 0; c < w; ++c)
    if (semantic.at(h - 1, c) == SurfaceLabel::floor) samples.push_back(-depth.at(h - 1, c) * sin_row[h - 1]);
  const double cam_h = median(samples, 1.6);
  samples.clear();
  for (int c = 0; c < w; ++c)
    if (semantic.at(0, c) == SurfaceLabel::ceiling) samples.push_back(depth.at(0, c) * sin_row[0]);
  const double ceil_above = median(samples, 1.2);

  // plan distance of the wall in each column, from the wall pixel closest to the horizon
  std::vector<double> cs(w, -1.0);
  for (int c = 0; c < w; ++c) {
    for (int k = 0; k < h; ++k) {
      const int r = (k % 2 == 0) ? h / 2 - 1 - k / 2 : h / 2 + k / 2;
      if (r < 0 || r >= h || !is_wall_like(semantic.at(r, c))) continue;
      cs[c] = depth.at(r, c) * std::cos(geometry::row_elevation(h, r));
      break;
    }
  }
  for (int c = 0; c < w; ++c) {
    if (cs[c] >= 0) continue;
    for (int k = 1; k < w; ++k) {
      const int cc = (c + k) % w;
      if (cs[cc] >= 0) {
        cs[c] = cs[cc];
        break;
      }
    }
    if (cs[c] < 0) cs[c] = 1.0;
  }
  std::vector<geometry::Vec2> plan(w);
  for (int c = 0; c < w; ++c) {
    const double theta = geometry::column_azimuth(w, c, 0.0);
    plan[c] = cs[c] * geometry::Vec2(std::sin(theta), std::cos(theta));
  }
  // arc length with the seam at s = 0
  std::vector<double> arc(w);
  const double seam_gap = (plan[0] - plan[w - 1]).norm();
  arc[0] = 0.5 * seam_gap;
  for (int c = 1; c < w; ++c) arc[c] = arc[c - 1] + (plan[c] - plan[c - 1]).norm();
  const double perimeter = arc[w - 1] + 0.5 * seam_gap;
  auto wall_period = [&](double p) {
    const double n = std::max(1.0, std::round(perimeter / p));
    return perimeter / n;
  };
  auto wall_arc = [&](int c, double dx) {
    const double prev = c > 0 ? arc[c - 1] : arc[w - 1] - perimeter;
    const double next = c < w - 1 ? arc[c + 1] : arc[0] + perimeter;
    double s = arc[c] + dx * 0.5 * (next - prev);
    s = std::remainder(s, perimeter);
    return std::abs(s);
  };

  const SurfaceStyle* styles[5] = {&spec.ceiling, &spec.walls, &spec.floor, &spec.door, &spec.window};
  double wall_p[5];
  for (int i = 0; i < 5; ++i) wall_p[i] = wall_period(styles[i]->scale);

  constexpr double kSub[3] = {-1.0 / 3.0, 0.0, 1.0 / 3.0};
  const double pix_az = 2.0 * kPi / w;
  const double pix_el = kPi / h;
  TextureImage out(grid);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const SurfaceLabel label = semantic.at(r, c);
      const int li = static_cast<int>(label);
      const SurfaceStyle& style = *styles[li];
      if (style.pattern == Pattern::solid) {
        out.at(r, c) = style.base;
        continue;
      }
      Color acc;
      double nh = 0, nv = 0;  // pixel-center coordinates for the noise lattice
      for (double dy : kSub) {
        const double a = kPi / 2 - (r + 0.5 + dy) * pix_el;
        for (double dx : kSub) {
          double hc, vc;
          if (label == SurfaceLabel::floor || label == SurfaceLabel::ceiling) {
            const double plane = label == SurfaceLabel::floor ? -cam_h : ceil_above;
            const double rho = plane / std::tan(a);
            const double theta = -kPi + (c + 0.5 + dx) * pix_az;
            hc = std::abs(rho * std::sin(theta));
            vc = -rho * std::cos(theta);
          } else {
            hc = wall_arc(c, dx);
            vc = cs[c] * std::tan(a) + cam_h;
          }
          if (dx == 0.0 && dy == 0.0) {
            nh = hc;
            nv = vc;
          }
          const double p = (label == SurfaceLabel::floor || label == SurfaceLabel::ceiling) ? style.scale : wall_p[li];
          const Color col = pattern_at(style, p, hc, vc);
          acc.r += col.r;
          acc.g += col.g;
          acc.b += col.b;
        }
      }
      const double cell = 0.02;
      const double noise = 3.0 * (hash01(static_cast<std::int64_t>(std::floor(nh / cell)),
                                         static_cast<std::int64_t>(std::floor(nv / cell)), mix64(seed) ^ li) -
                                  0.5);
      auto chan = [&](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v / 9.0 + noise), 0L, 255L));
      };
      out.at(r, c) = {chan(acc.r), chan(acc.g), chan(acc.b)};
    }
  }
  return out;
}

}  // namespace proom::texture
