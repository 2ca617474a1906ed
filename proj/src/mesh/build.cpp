#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <unordered_map>

#include "proom/geometry/projection.hpp"
#include "proom/geometry/shape.hpp"
#include "proom/mesh/room_mesh.hpp"

namespace proom::mesh {

using geometry::kPi;

namespace {

double cross2(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double orient(const Vec2& a, const Vec2& b, const Vec2& p) { return cross2(b - a, p - a); }

Vec2 rotate(const Vec2& v, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * v.x() - s * v.y(), s * v.x() + c * v.y()};
}

// Planar triangulation with an edge index, used for floor and ceiling.
class PlanMesh {
 public:
  std::vector<Vec2> points;
  std::vector<Triangle> tris;

  PlanMesh(std::vector<Vec2> pts, std::vector<Triangle> t) : points(std::move(pts)), tris(std::move(t)) {
    for (int i = 0; i < static_cast<int>(tris.size()); ++i) index(i);
  }

  bool has_edge(int a, int b) const { return edges_.count(key(a, b)) > 0; }

  std::vector<std::pair<int, int>> edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(edges_.size());
    for (const auto& [k, _] : edges_) out.push_back(k);
    return out;
  }

  // Splits edge (a, b) at p; returns the new vertex and the opposite vertices.
  int split_edge(int a, int b, const Vec2& p, std::vector<int>* opposite = nullptr) {
    const auto it = edges_.find(key(a, b));
    if (it == edges_.end()) throw MeshError("split_edge: no such edge");
    const std::vector<int> owners = it->second;
    const int m = static_cast<int>(points.size());
    points.push_back(p);
    for (int t : owners) {
      unindex(t);
      Triangle tri = tris[t];
      // rotate so the split edge is (tri[0], tri[1])
      while (!((tri[0] == a && tri[1] == b) || (tri[0] == b && tri[1] == a)))
        tri = {tri[1], tri[2], tri[0]};
      const int x = tri[0], y = tri[1], c = tri[2];
      tris[t] = {x, m, c};
      tris.push_back({m, y, c});
      index(t);
      index(static_cast<int>(tris.size()) - 1);
      if (opposite) opposite->push_back(c);
    }
    return m;
  }

  // Inserts p, which must lie inside the triangulation; returns its index.
  int insert_point(const Vec2& p) {
    constexpr double eps = 1e-12;
    for (int t = 0; t < static_cast<int>(tris.size()); ++t) {
      const Triangle tri = tris[t];
      const Vec2 &a = points[tri[0]], &b = points[tri[1]], &c = points[tri[2]];
      const double area = orient(a, b, c);
      const double w[3] = {orient(b, c, p) / area, orient(c, a, p) / area, orient(a, b, p) / area};
      if (w[0] < -eps || w[1] < -eps || w[2] < -eps) continue;
      for (int k = 0; k < 3; ++k) {
        if (w[k] <= eps) return split_edge(tri[(k + 1) % 3], tri[(k + 2) % 3], p);
      }
      unindex(t);
      const int m = static_cast<int>(points.size());
      points.push_back(p);
      tris[t] = {tri[0], tri[1], m};
      tris.push_back({tri[1], tri[2], m});
      tris.push_back({tri[2], tri[0], m});
      index(t);
      index(static_cast<int>(tris.size()) - 2);
      index(static_cast<int>(tris.size()) - 1);
      return m;
    }
    throw MeshError("point lies outside the floor triangulation");
  }

 private:
  static std::pair<int, int> key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

  void index(int t) {
    for (int k = 0; k < 3; ++k) edges_[key(tris[t][k], tris[t][(k + 1) % 3])].push_back(t);
  }
  void unindex(int t) {
    for (int k = 0; k < 3; ++k) {
      auto it = edges_.find(key(tris[t][k], tris[t][(k + 1) % 3]));
      auto& v = it->second;
      v.erase(std::find(v.begin(), v.end(), t));
      if (v.empty()) edges_.erase(it);
    }
  }

  std::map<std::pair<int, int>, std::vector<int>> edges_;
};

struct Patch {
  std::vector<Vec3> points;
  std::vector<Triangle> tris;
  SurfaceTag tag;
  int pole = -1;
  double pole_v = 0.0;
};

// Maps world directions to texture coordinates for one camera and texture grid.
struct UvFrame {
  Vec3 eye;
  double shift = 0.0;  // texture column offset from the yaw, in turns
  Vec2 seam_dir;

  UvFrame(const geometry::CameraPose& cam, double floor_z, const geometry::PanoramaGrid& grid) {
    eye = {cam.position.x(), cam.position.y(), floor_z + cam.height};
    const auto ys = geometry::split_yaw(cam.yaw, grid.width);
    shift = (static_cast<double>(ys.columns) + ys.fraction) / grid.width;
    shift -= std::floor(shift);
    const double theta = -kPi + 2.0 * kPi * shift;
    seam_dir = {std::sin(theta), std::cos(theta)};
  }

  bool on_seam(const Vec3& p) const {
    const Vec2 d(p.x() - eye.x(), p.y() - eye.y());
    return std::abs(cross2(seam_dir, d)) <= 1e-9 && seam_dir.dot(d) > 0.0;
  }
  double u(const Vec3& p) const {
    const auto s = geometry::project_spherical(p - eye);
    double t = (s.theta + kPi) / (2.0 * kPi) - shift;
    t -= std::floor(t);
    return t >= 1.0 ? 0.0 : t;
  }
  double v(const Vec3& p) const { return geometry::project_spherical(p - eye).phi / kPi; }
};

void append_patch(RoomMesh& mesh, const Patch& patch, const UvFrame& frame) {
  enum class Kind { regular, seam, pole };
  const int n = static_cast<int>(patch.points.size());
  std::vector<Kind> kind(n, Kind::regular);
  std::vector<double> u(n, 0.0), v(n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (i == patch.pole) {
      kind[i] = Kind::pole;
      v[i] = patch.pole_v;
      continue;
    }
    if (frame.on_seam(patch.points[i])) kind[i] = Kind::seam;
    else u[i] = frame.u(patch.points[i]);
    v[i] = frame.v(patch.points[i]);
  }
  std::map<std::pair<int, double>, int> copies;
  auto emit = [&](int i, double uu) {
    const auto [it, fresh] = copies.try_emplace({i, uu}, static_cast<int>(mesh.vertices.size()));
    if (fresh) {
      mesh.vertices.push_back(patch.points[i]);
      mesh.uvs.emplace_back(uu, v[i]);
    }
    return it->second;
  };
  for (const Triangle& t : patch.tris) {
    double tu[3];
    double sum = 0;
    int regular = 0;
    for (int k = 0; k < 3; ++k) {
      if (kind[t[k]] == Kind::regular) {
        sum += u[t[k]];
        ++regular;
      }
    }
    if (regular == 0) throw MeshError("triangle has no vertex off the seam");
    const double side = (sum / regular) < 0.5 ? 0.0 : 1.0;
    for (int k = 0; k < 3; ++k) tu[k] = kind[t[k]] == Kind::seam ? side : u[t[k]];
    for (int k = 0; k < 3; ++k) {
      if (kind[t[k]] != Kind::pole) continue;
      tu[k] = 0.5 * (tu[(k + 1) % 3] + tu[(k + 2) % 3]);
    }
    mesh.triangles.push_back({emit(t[0], tu[0]), emit(t[1], tu[1]), emit(t[2], tu[2])});
    mesh.tags.push_back(patch.tag);
  }
}

// Azimuth and elevation extent of a horizontal plan segment at height dz
// relative to the eye.
std::pair<double, double> plan_edge_span(const Vec2& ra, const Vec2& rb, double dz) {
  const double la = ra.norm(), lb = rb.norm();
  const double az = (la == 0.0 || lb == 0.0) ? 0.0 : std::atan2(std::abs(cross2(ra, rb)), ra.dot(rb));
  const Vec2 e = rb - ra;
  const double t = e.squaredNorm() > 0 ? std::clamp(-ra.dot(e) / e.squaredNorm(), 0.0, 1.0) : 0.0;
  const double rmin = (ra + t * e).norm();
  const double rmax = std::max(la, lb);
  const double h = std::abs(dz);
  const double el_near = rmin == 0.0 ? kPi / 2 : std::atan(h / rmin);
  return {az, el_near - std::atan(h / rmax)};
}

Patch wall_patch(const geometry::RoomShape& shape, int i, const UvFrame& frame, double max_rad) {
  const Vec2 cam(frame.eye.x(), frame.eye.y());
  const Vec2 a = shape.corner(i), b = shape.corner(i + 1);
  const Vec2 e = b - a;
  const Vec2 ra = a - cam, rb = b - cam;
  const double sweep = std::atan2(cross2(ra, rb), ra.dot(rb));

  auto t_along = [&](const Vec2& dir) { return -cross2(dir, ra) / cross2(dir, e); };
  std::vector<double> ts;
  const int n = std::abs(sweep) < 1e-12 ? 1 : std::max(1, int(std::ceil(std::abs(sweep) / max_rad - 1e-9)));
  const double step = sweep / n;
  for (int k = 0; k <= n; ++k) ts.push_back(k == 0 ? 0.0 : k == n ? 1.0 : t_along(rotate(ra, k * step)));
  if (std::abs(sweep) >= 1e-12) {
    const double beta = std::atan2(cross2(ra, frame.seam_dir), ra.dot(frame.seam_dir));
    const double f = beta / sweep;
    if (f > 0.0 && f < 1.0) {
      const double ts_seam = t_along(frame.seam_dir);
      const long k = std::lround(beta / step);
      if (std::abs(beta - k * step) < 1e-9 && k > 0 && k < n) ts[k] = ts_seam;
      else ts.insert(std::upper_bound(ts.begin(), ts.end(), ts_seam), ts_seam);
    }
  }

  const double tf = std::clamp((cam - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
  const double dmin = (a + tf * e - cam).norm();
  const double zf = shape.floor_z, zc = shape.ceiling_z(), cz = frame.eye.z();
  const double lo = std::atan((cz - zf) / dmin), hi = std::atan((zc - cz) / dmin);
  const int rows = std::max(1, int(std::ceil((lo + hi) / max_rad - 1e-9)));
  std::vector<double> zs(rows + 1);
  for (int k = 0; k <= rows; ++k)
    zs[k] = k == 0 ? zf : k == rows ? zc : cz + dmin * std::tan(-lo + k * (lo + hi) / rows);

  // refine where a grazing view or a distant column still spans too much
  auto vertical_span = [&](double z1, double z2, double rho) {
    return std::abs(std::atan2(z2 - cz, rho) - std::atan2(z1 - cz, rho));
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t j = 0; j + 1 < ts.size();) {
      const Vec2 qa = a + ts[j] * e - cam, qb = a + ts[j + 1] * e - cam;
      bool split = false;
      for (double z : zs) split = split || plan_edge_span(qa, qb, z - cz).second > max_rad;
      if (split) {
        ts.insert(ts.begin() + j + 1, 0.5 * (ts[j] + ts[j + 1]));
        changed = true;
      } else {
        ++j;
      }
    }
    for (std::size_t k = 0; k + 1 < zs.size();) {
      bool split = false;
      for (double t : ts) split = split || vertical_span(zs[k], zs[k + 1], (a + t * e - cam).norm()) > max_rad;
      if (split) {
        zs.insert(zs.begin() + k + 1, 0.5 * (zs[k] + zs[k + 1]));
        changed = true;
      } else {
        ++k;
      }
    }
  }
  const int m = static_cast<int>(zs.size()) - 1;

  Patch p;
  p.tag = SurfaceTag::wall_of(i);
  const int cols = static_cast<int>(ts.size());
  for (int j = 0; j < cols; ++j) {
    const Vec2 q = a + ts[j] * e;
    for (int k = 0; k <= m; ++k) p.points.emplace_back(q.x(), q.y(), zs[k]);
  }
  auto at = [&](int j, int k) { return j * (m + 1) + k; };
  auto elev = [&](int idx) {
    const Vec3 d = p.points[idx] - frame.eye;
    return std::atan2(d.z(), std::hypot(d.x(), d.y()));
  };
  const Vec3 inward(-e.y(), e.x(), 0.0);
  auto add = [&](int x, int y, int z) {
    const Vec3 nrm = (p.points[y] - p.points[x]).cross(p.points[z] - p.points[x]);
    if (nrm.dot(inward) < 0) std::swap(y, z);
    p.tris.push_back({x, y, z});
  };
  for (int j = 0; j + 1 < cols; ++j) {
    for (int k = 0; k < m; ++k) {
      const int p00 = at(j, k), p10 = at(j + 1, k), p01 = at(j, k + 1), p11 = at(j + 1, k + 1);
      if (std::abs(elev(p11) - elev(p00)) <= std::abs(elev(p01) - elev(p10))) {
        add(p00, p10, p11);
        add(p00, p11, p01);
      } else {
        add(p00, p10, p01);
        add(p10, p11, p01);
      }
    }
  }
  return p;
}

Patch flat_patch(const geometry::RoomShape& shape, bool ceiling, const UvFrame& frame, double max_rad) {
  const Vec2 cam(frame.eye.x(), frame.eye.y());
  PlanMesh pm(shape.floor_corners, ear_clip(shape.floor_corners));
  const int pole = pm.insert_point(cam);

  // cut every edge crossing the seam ray so no triangle straddles it
  auto side = [&](int i) { return cross2(frame.seam_dir, pm.points[i] - cam); };
  for (const auto& [a, b] : pm.edge_list()) {
    if (!pm.has_edge(a, b)) continue;
    const double sa = side(a), sb = side(b);
    if (!((sa > 1e-9 && sb < -1e-9) || (sa < -1e-9 && sb > 1e-9))) continue;
    const Vec2 x = pm.points[a] + (sa / (sa - sb)) * (pm.points[b] - pm.points[a]);
    if (frame.seam_dir.dot(x - cam) <= 0.0) continue;
    pm.split_edge(a, b, x);
  }

  const double dz = (ceiling ? shape.ceiling_z() : shape.floor_z) - frame.eye.z();
  auto violates = [&](int a, int b) {
    const auto [az, el] = plan_edge_span(pm.points[a] - cam, pm.points[b] - cam, dz);
    return az > max_rad || el > max_rad;
  };
  std::deque<std::pair<int, int>> work;
  for (const auto& e : pm.edge_list()) work.push_back(e);
  while (!work.empty()) {
    const auto [a, b] = work.front();
    work.pop_front();
    if (!pm.has_edge(a, b) || !violates(a, b)) continue;
    std::vector<int> opposite;
    const int m = pm.split_edge(a, b, 0.5 * (pm.points[a] + pm.points[b]), &opposite);
    work.emplace_back(a, m);
    work.emplace_back(m, b);
    for (int c : opposite) work.emplace_back(m, c);
  }

  Patch p;
  p.tag = ceiling ? SurfaceTag::ceiling() : SurfaceTag::floor();
  const double z = ceiling ? shape.ceiling_z() : shape.floor_z;
  for (const Vec2& q : pm.points) p.points.emplace_back(q.x(), q.y(), z);
  p.tris = pm.tris;
  if (ceiling)
    for (auto& t : p.tris) std::swap(t[1], t[2]);
  p.pole = pole;
  p.pole_v = ceiling ? 0.0 : 1.0;
  return p;
}

}  // namespace

std::vector<Triangle> ear_clip(std::span<const Vec2> polygon) {
  const int n = static_cast<int>(polygon.size());
  if (n < 3) throw MeshError("ear_clip: polygon needs at least 3 vertices");
  std::vector<int> ring(n);
  for (int i = 0; i < n; ++i) ring[i] = i;
  std::vector<Triangle> out;
  while (ring.size() > 3) {
    const int m = static_cast<int>(ring.size());
    bool clipped = false;
    for (int i = 0; i < m && !clipped; ++i) {
      const int ia = ring[(i + m - 1) % m], ib = ring[i], ic = ring[(i + 1) % m];
      const Vec2 &a = polygon[ia], &b = polygon[ib], &c = polygon[ic];
      const double base = (c - a).norm();
      if (base == 0.0 || orient(a, b, c) / base <= 1e-9) continue;
      bool blocked = false;
      for (int j : ring) {
        if (j == ia || j == ib || j == ic) continue;
        const Vec2& q = polygon[j];
        if (orient(a, b, q) >= -1e-12 && orient(b, c, q) >= -1e-12 && orient(c, a, q) >= -1e-12) {
          blocked = true;
          break;
        }
      }
      if (blocked) continue;
      out.push_back({ia, ib, ic});
      ring.erase(ring.begin() + i);
      clipped = true;
    }
    if (!clipped) throw MeshError("ear_clip: no ear found (polygon not simple or not counter-clockwise)");
  }
  out.push_back({ring[0], ring[1], ring[2]});
  return out;
}

geometry::RoomShape require_meshable(const geometry::RoomShape& shape) {
  for (std::size_t i = 0; i < shape.wall_count(); ++i) {
    if ((shape.corner(i + 1) - shape.corner(i)).norm() <= 1e-9)
      throw MeshError("wall " + std::to_string(i) + " has zero length");
  }
  try {
    return geometry::require_valid_shape(shape);
  } catch (const geometry::GeometryError& e) {
    throw MeshError(e.what());
  }
}

RoomMesh build_empty_room(const geometry::RoomShape& input, const geometry::CameraPose& cam,
                          const geometry::TextureImage& texture, double max_degrees) {
  const geometry::RoomShape shape = require_meshable(input);
  try {
    geometry::require_valid_camera(shape, cam);
    texture.grid.validate();
  } catch (const geometry::GeometryError& e) {
    throw MeshError(e.what());
  }
  if (texture.pixels.size() != texture.grid.pixel_count()) throw MeshError("texture pixel count does not match its grid");
  if (!(max_degrees > 0.0)) throw MeshError("subdivision angle must be positive");
  const double max_rad = max_degrees * kPi / 180.0;
  const UvFrame frame(cam, shape.floor_z, texture.grid);

  RoomMesh mesh;
  mesh.texture = texture;
  append_patch(mesh, flat_patch(shape, false, frame, max_rad), frame);
  append_patch(mesh, flat_patch(shape, true, frame, max_rad), frame);
  for (int i = 0; i < static_cast<int>(shape.wall_count()); ++i)
    append_patch(mesh, wall_patch(shape, i, frame, max_rad), frame);
  return mesh;
}

double max_surface_residual(const RoomMesh& mesh, const geometry::RoomShape& shape) {
  double worst = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const SurfaceTag tag = mesh.tags[t];
    for (int idx : mesh.triangles[t]) {
      const Vec3& p = mesh.vertices[idx];
      const Vec2 q(p.x(), p.y());
      double r;
      if (tag.kind == SurfaceTag::Kind::wall) {
        const Vec2 a = shape.corner(tag.wall), b = shape.corner(tag.wall + 1);
        const Vec2 e = b - a;
        const double s = std::clamp((q - a).dot(e) / e.squaredNorm(), 0.0, 1.0);
        const double plan = (a + s * e - q).norm();
        const double over = std::max({0.0, shape.floor_z - p.z(), p.z() - shape.ceiling_z()});
        r = std::hypot(plan, over);
      } else {
        const double z = tag.kind == SurfaceTag::Kind::floor ? shape.floor_z : shape.ceiling_z();
        const double outside = geometry::point_in_polygon(shape.floor_corners, q)
                                   ? 0.0
                                   : geometry::boundary_distance(shape.floor_corners, q);
        r = std::hypot(p.z() - z, outside);
      }
      worst = std::max(worst, r);
    }
  }
  return worst;
}

}  // namespace proom::mesh
