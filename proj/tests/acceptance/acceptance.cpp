#include <chrono>
#include <cmath>
#include <cstring>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "proom/dsl/program.hpp"
#include "proom/dsl/runtime.hpp"
#include "proom/furniture/generate.hpp"
#include "proom/furniture/layout.hpp"
#include "proom/geometry/panorama.hpp"
#include "proom/geometry/projection.hpp"
#include "proom/geometry/shape.hpp"
#include "proom/mesh/room_mesh.hpp"
#include "proom/pipeline/modules.hpp"
#include "proom/session/service.hpp"
#include "proom/util/text.hpp"
#include "../support/files.hpp"
#include "../support/map_checks.hpp"
#include "../support/program_corpus.hpp"
#include "../support/random_rooms.hpp"

using namespace proom;
using namespace proom::geometry;

namespace {

const char* kCanonical = "Create a 5m by 4m bedroom with a wooden floor and light gray walls, and furnish it";

// Collects the first few failed checks of a criterion.
struct Checker {
  std::vector<std::string> failures;
  std::string detail;

  void operator()(bool ok, const std::string& what) {
    if (!ok && failures.size() < 5) failures.push_back(what);
    if (!ok && failures.size() == 5) failures.push_back("...");
  }
  bool ok() const { return failures.empty(); }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(3);
  os << v;
  return os.str();
}

struct Corpus {
  std::vector<testing::RandomRoom> rooms;
  PanoramaGrid grid = make_grid(256);
};

const Corpus& corpus() {
  static const Corpus c = [] {
    Corpus out;
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 50; ++i) out.rooms.push_back(testing::random_room(rng, i >= 25));
    return out;
  }();
  return c;
}

void depth_equivalence(Checker& check) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& c = corpus();
  double worst = 0;
  std::size_t checked = 0;
  int rects = 0, ls = 0;
  for (std::size_t i = 0; i < c.rooms.size(); ++i) {
    const auto& room = c.rooms[i];
    (room.shape.floor_corners.size() == 4 ? rects : ls)++;
    const double h = room.shape.ceiling_height;
    check(h >= 2.4 && h <= 3.2, "room " + std::to_string(i) + " height " + fmt(h));
    const auto depth = gen_depth(room.shape, room.camera, c.grid);
    const auto oracle = raycast_oracle(room.shape, room.camera, c.grid);
    for (int r = 0; r < c.grid.height; ++r)
      for (int col = 0; col < c.grid.width; ++col) {
        if (testing::near_change(oracle.semantic, r, col, 1)) continue;
        const double o = oracle.depth.at(r, col);
        worst = std::max(worst, std::abs(depth.at(r, col) - o) / o);
        ++checked;
      }
  }
  const double elapsed = seconds_since(t0);
  check(rects == 25 && ls == 25, "corpus is not 25 rectangles and 25 L-shapes");
  check(worst <= 1e-6, "worst relative depth error " + fmt(worst));
  check(elapsed < 30.0, "runtime " + fmt(elapsed) + " s");
  check(checked > 0, "no pixels checked");
  check.detail = "worst rel err " + fmt(worst) + " over " + std::to_string(checked) + " px, " + fmt(elapsed) + " s";
}

void semantic_equivalence(Checker& check) {
  const auto& c = corpus();
  double lowest = 1;
  for (std::size_t i = 0; i < c.rooms.size(); ++i) {
    const auto& room = c.rooms[i];
    const auto layout = gen_layout(room.shape, room.camera, c.grid);
    const auto sem = gen_semantic(layout, c.grid, room.shape, room.camera);
    const auto oracle = raycast_oracle(room.shape, room.camera, c.grid);
    const double agree = testing::semantic_agreement(sem, oracle.semantic);
    lowest = std::min(lowest, agree);
    check(agree >= 0.99, "room " + std::to_string(i) + " agreement " + fmt(agree));
    for (int col = 0; col < c.grid.width; ++col) {
      check(sem.at(0, col) == SurfaceLabel::ceiling, "room " + std::to_string(i) + " top pole not ceiling");
      check(sem.at(c.grid.height - 1, col) == SurfaceLabel::floor, "room " + std::to_string(i) + " bottom pole not floor");
    }
  }
  check.detail = "lowest agreement " + fmt(lowest);
}

void projection_round_trip(Checker& check) {
  const PanoramaGrid g = make_grid(256);
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> row(0, g.height - 1), col(0, g.width - 1);
  std::uniform_real_distribution<double> yaw(-kPi, kPi), scale(0.1, 20.0);
  double worst = 0;
  for (int i = 0; i < 100000; ++i) {
    const int r = row(rng), cc = col(rng);
    CameraPose cam;
    if (i % 2) cam.yaw = yaw(rng);
    const auto ray = pixel_to_ray(g, r, cc, cam);
    double du, dv;
    if (i % 2 == 0) {
      const auto s = project_spherical(ray.direction * scale(rng));
      const auto uv = spherical_to_uv(s.theta, s.phi);
      du = uv.u * g.width - (cc + 0.5);
      dv = uv.v * g.height - (r + 0.5);
    } else {
      const auto pos = image_position(g, ray.direction * scale(rng), split_yaw(cam.yaw, g.width));
      du = static_cast<double>(pos.col) + pos.col_frac - (cc + 0.5);
      dv = pos.row_pos - (r + 0.5);
    }
    du = std::remainder(du, g.width);
    worst = std::max({worst, std::abs(du), std::abs(dv)});
  }
  check(worst < 0.5, "worst round-trip error " + fmt(worst) + " px");

  const auto y = project_spherical({0, 1, 0});
  check(y.r == 1.0 && y.theta == 0.0 && std::abs(y.phi - kPi / 2) <= 1e-15, "project_spherical(0,1,0)");
  const auto z = project_spherical({0, 0, 1});
  check(z.r == 1.0 && z.theta == 0.0 && z.phi == 0.0, "project_spherical(0,0,1)");
  // mpmath: r = 2, theta = phi = 0.785398163397448309615660845820
  const auto d = project_spherical({1, 1, std::sqrt(2.0)});
  check(std::abs(d.r - 2.0) <= 2e-15 && std::abs(d.theta - 0.785398163397448309615660845820) < 1e-15 &&
            std::abs(d.phi - 0.785398163397448309615660845820) < 1e-15,
        "project_spherical(1,1,sqrt2)");
  check(project_spherical({0, -1, 0}).theta == kPi, "project_spherical(0,-1,0) theta");
  bool threw = false;
  try {
    project_spherical({0, 0, 0});
  } catch (const GeometryError&) {
    threw = true;
  }
  check(threw, "project_spherical(0,0,0) accepted");
  const auto c0 = spherical_to_uv(0.0, kPi / 2);
  check(c0.u == 0.5 && c0.v == 0.5, "spherical_to_uv(0, pi/2)");
  const auto q = spherical_to_uv(kPi / 4, kPi / 4);
  check(std::abs(q.u - 0.625) <= 1e-15 && std::abs(q.v - 0.25) <= 1e-15, "spherical_to_uv(pi/4, pi/4)");
  check.detail = "worst " + fmt(worst) + " px over 100000 pixels";
}

void seam_invariance(Checker& check) {
  std::mt19937_64 rng(5);
  const PanoramaGrid g = make_grid(256);
  for (int i = 0; i < 10; ++i) {
    const auto room = testing::random_room(rng, i % 2 == 0);
    CameraPose shifted = room.camera;
    shifted.yaw += 2 * kPi / g.width;
    const std::string tag = "room " + std::to_string(i) + ": ";
    const auto l0 = gen_layout(room.shape, room.camera, g);
    const auto l1 = gen_layout(room.shape, shifted, g);
    check(l1 == roll_columns(l0, 1), tag + "layout");
    check(gen_depth(room.shape, shifted, g) == roll_columns(gen_depth(room.shape, room.camera, g), 1), tag + "depth");
    check(gen_semantic(l1, g) == roll_columns(gen_semantic(l0, g), 1), tag + "semantic");
    check(gen_semantic(l1, g, room.shape, shifted) == roll_columns(gen_semantic(l0, g, room.shape, room.camera), 1),
          tag + "shape-guided semantic");
  }
  check.detail = "10 rooms at 256x128";
}

void layout_1d(Checker& check) {
  const auto& c = corpus();
  double worst = 0;
  for (std::size_t i = 0; i < c.rooms.size(); ++i) {
    const auto& room = c.rooms[i];
    const auto sem = gen_semantic(gen_layout(room.shape, room.camera, c.grid), c.grid, room.shape, room.camera);
    const auto enc = encode_layout_1d(room.shape, room.camera, c.grid.width);
    const double e = testing::worst_transition_error(sem, enc);
    worst = std::max(worst, e);
    check(e <= 1.0, "room " + std::to_string(i) + " transition error " + fmt(e));
    check(layout_1d_distance(enc, enc) == 0.0, "room " + std::to_string(i) + " self distance");
  }

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 200; ++t) {
    Layout1D x, y;
    for (int k = 0; k < 64; ++k) {
      x.ceiling_v.push_back(u(rng));
      x.floor_v.push_back(u(rng));
    }
    y = x;
    if (t % 2) {
      const std::size_t k = rng() % 64;
      (t % 4 == 1 ? y.ceiling_v : y.floor_v)[k] = u(rng);
    } else if (t % 4 == 2) {
      for (auto& v : y.ceiling_v) v = u(rng);
      for (auto& v : y.floor_v) v = u(rng);
    }
    double brute = 0;
    for (int k = 0; k < 64; ++k) {
      const double a = x.ceiling_v[k] - y.ceiling_v[k];
      brute += a * a;
    }
    for (int k = 0; k < 64; ++k) {
      const double b = x.floor_v[k] - y.floor_v[k];
      brute += b * b;
    }
    const double d = layout_1d_distance(x, y);
    check(d == brute, "distance " + fmt(d) + " vs brute force " + fmt(brute));
    const bool equal = x.ceiling_v == y.ceiling_v && x.floor_v == y.floor_v;
    check((d == 0.0) == equal, "zero distance does not match equality");
  }
  check.detail = "worst transition error " + fmt(worst) + " px";
}

bool has_code(const std::vector<dsl::Diagnostic>& list, const std::string& code) {
  for (const auto& d : list)
    if (d.code == code) return true;
  return false;
}

void dsl_criterion(Checker& check, const pipeline::Engine& engine) {
  int round_trips = 0;
  for (const auto& p : testing::program_corpus(20, 99)) {
    const std::string text = dsl::serialize_program(p);
    const auto back = dsl::parse_program(text);
    const bool ok = back.ok() && *back.program == p && dsl::serialize_program(*back.program) == text;
    check(ok, "corpus program does not round-trip:\n" + text);
    round_trips += ok;
  }

  const auto reg = pipeline::signature_registry();
  const auto ub = dsl::parse_program(testing::read_file(testing::fixture("dsl/use_before_assignment.vprog")));
  check(has_code(ub.diagnostics, "use-before-assignment"), "use-before-assignment fixture");
  const auto dup = dsl::parse_program(testing::read_file(testing::fixture("dsl/duplicate_assignment.vprog")));
  check(has_code(dup.diagnostics, "duplicate-assignment"), "duplicate-assignment fixture");
  const auto unk = dsl::parse_program(testing::read_file(testing::fixture("dsl/unknown_module.vprog")));
  check(unk.ok() && has_code(dsl::typecheck(*unk.program, reg), "unknown-module"), "unknown-module fixture");
  const auto canon = dsl::parse_program(testing::read_file(testing::fixture("dsl/canonical.vprog")));
  const auto canon_diags = canon.ok() ? dsl::typecheck(*canon.program, reg) : canon.diagnostics;
  check(canon_diags.empty(), "canonical fixture: " + dsl::format_diagnostics(canon_diags));

  const auto run = [&](const std::string& text, const dsl::Environment& env) {
    const auto names = env.names();
    const auto parsed = dsl::parse_program(text, std::set<std::string>(names.begin(), names.end()));
    return dsl::execute(*parsed.program, env, engine.registry());
  };
  const auto base = run("SHAPE9=GenShape(instruction='a 6m by 6m room')\n"
                        "LAYOUT9=GenLayout(shape=SHAPE9)\n"
                        "DEPTH9=GenDepth(shape=SHAPE9)\n"
                        "SEMANTIC9=GenSemantic(layout=LAYOUT9)\n"
                        "TEXTURE9=GenTexture(layout=LAYOUT9, depth=DEPTH9, semantic=SEMANTIC9, instruction='x')\n",
                        {});
  check(base.ok(), "five-line program failed");
  const auto bad = run("SHAPE0=GenShape(instruction='a 4m by 3m office')\n"
                       "DEPTH0=GenDepth(shape=SHAPE0)\n"
                       "ROOM0=GenEmptyRoom(texture=TEXTURE9, depth=DEPTH0)\n"
                       "LAYOUT0=GenLayout(shape=SHAPE0)\n",
                       base.env);
  check(!bad.ok() && bad.failure->line == 3, "failure not reported at line 3");
  check(bad.executed == 2, "executed " + std::to_string(bad.executed) + " statements, expected 2");
  check(bad.env.contains("DEPTH0") && !bad.env.contains("ROOM0") && !bad.env.contains("LAYOUT0"),
        "bindings after the failing line");
  check(base.env.size() == 5, "input environment modified");
  check.detail = std::to_string(round_trips) + "/20 round trips, stop at line 3 after 2 statements";
}

pipeline::EngineOptions engine_options(int width) {
  pipeline::EngineOptions o;
  o.data_dir = PROOM_DATA_DIR;
  o.config.grid = make_grid(width);
  return o;
}

const session::BindingRecord* find_binding(const std::vector<session::BindingRecord>& m, const std::string& name) {
  for (const auto& b : m)
    if (b.name == name) return &b;
  return nullptr;
}

void end_to_end(Checker& check) {
  const auto dir = testing::scratch_dir("acceptance-e2e");
  const auto t0 = std::chrono::steady_clock::now();
  pipeline::Engine engine(engine_options(512));
  session::SessionStore store(dir);
  session::SessionService service(store, engine);
  const std::string id = store.create("canonical").id;
  const auto step = service.run_instruction(id, kCanonical);
  const double elapsed = seconds_since(t0);
  check(elapsed < 10.0, "took " + fmt(elapsed) + " s");
  if (!step.ok()) {
    check(false, "step failed: " + step.error);
    return;
  }

  const auto parsed = dsl::parse_program(step.program);
  check(parsed.ok() && dsl::typecheck(*parsed.program, pipeline::signature_registry()).empty(),
        "stored program does not parse and typecheck");

  const auto env = store.load_env(id);
  int maps = 0;
  for (const auto& [name, type] : {std::pair{"LAYOUT0", dsl::SemType::layout}, {"DEPTH0", dsl::SemType::depth},
                                   {"SEMANTIC0", dsl::SemType::semantic}}) {
    const bool ok = env.contains(name) && env.at(name).type == type;
    check(ok, std::string("missing map ") + name);
    maps += ok;
  }
  if (!env.contains("TEXTURE0") || !env.contains("SHAPE0") || !env.contains("FURNITURE0")) {
    check(false, "missing TEXTURE0, SHAPE0 or FURNITURE0");
    return;
  }
  const auto& tex = pipeline::as_texture(env.at("TEXTURE0"));
  const double wrap = texture::wrap_continuity_error(tex.image);
  check(tex.image.grid == PanoramaGrid{512, 256}, "texture is not 512x256");
  check(wrap <= texture::kWrapThreshold, "wrap error " + fmt(wrap) + "/255");

  const auto obj = store.session_dir(id) / "exports/step-1/ROOM0/room.obj";
  double bx = 0, by = 0;
  if (std::filesystem::exists(obj)) {
    const auto bb = mesh::mesh_bounds(mesh::import_mesh(obj));
    bx = bb.extent().x();
    by = bb.extent().y();
  }
  check(bx == 5.0 && by == 4.0, "exported bbox " + fmt(bx) + " x " + fmt(by));

  const auto& shape = pipeline::as_shape(env.at("SHAPE0"));
  const auto& furn = pipeline::as_furniture(env.at("FURNITURE0"));
  int outside = 0;
  for (const auto& v : furniture::containment_report(shape, furn))
    outside += v.kind == furniture::Violation::Kind::out_of_room;
  check(!furn.items.empty(), "no furniture");
  check(outside == 0, std::to_string(outside) + " out-of-room violations");
  check.detail = fmt(elapsed) + " s, " + std::to_string(maps) + " maps, wrap " + fmt(wrap) + "/255, bbox " + fmt(bx) +
                 " x " + fmt(by) + " m, " + std::to_string(furn.items.size()) + " items";
}

void edit_determinism(Checker& check) {
  const auto dir = testing::scratch_dir("acceptance-replay");
  pipeline::Engine engine(engine_options(256));
  session::SessionStore store(dir);
  session::SessionService service(store, engine);
  const std::string id = store.create("edits").id;
  const std::vector<std::string> steps = {kCanonical, "change the floor to red tiles",
                                          "replace the table with a wardrobe"};
  for (const auto& s : steps) {
    const auto rec = service.run_instruction(id, s);
    check(rec.ok(), "step failed: " + s);
  }
  const auto m1 = store.manifest(id, 1), m2 = store.manifest(id, 2);
  const auto* s1 = find_binding(m1, "SHAPE0");
  const auto* s2 = find_binding(m2, "SHAPE0");
  check(s1 && s2 && s1->files == s2->files && s2->step == 1, "texture edit changed SHAPE0");
  const auto created = store.step(id, 2).created;
  for (const auto& n : created)
    check(n.rfind("TEXTURE", 0) == 0 || n.rfind("ROOM", 0) == 0 || n.rfind("SCENE", 0) == 0,
          "texture edit created " + n);

  const auto r = service.replay(id, "edits-replay");
  for (const auto& m : r.mismatches) check(false, m);
  check(r.identical(), "replay differs");
  std::size_t files = 0;
  for (const auto& b : store.manifest(id)) files += b.files.size();
  check.detail = "3 steps, " + std::to_string(files) + " artifact digests reproduced";
}

void mesh_criterion(Checker& check) {
  std::mt19937_64 rng(31);
  double worst = 0;
  for (int i = 0; i < 12; ++i) {
    const auto room = testing::random_room(rng, i % 2 == 1);
    const auto m = mesh::build_empty_room(room.shape, room.camera, TextureImage(make_grid(256), Rgb8{128, 128, 128}));
    worst = std::max(worst, mesh::max_surface_residual(m, room.shape));
  }
  check(worst <= 1e-6, "residual " + fmt(worst));

  const RoomShape s = testing::l_shape(6, 5, 2.5, 2, 2.7);
  TextureImage tex(make_grid(128), Rgb8{128, 128, 128});
  tex.at(3, 7) = {1, 2, 3};
  const auto m = mesh::build_empty_room(s, default_camera(s), tex);
  const auto dir = testing::scratch_dir("acceptance-mesh");
  const auto files = mesh::export_mesh(m, dir);
  const auto back = mesh::import_mesh(files.obj);
  check(back == mesh::export_precision(m), "import differs from the exported mesh");
  check(back.texture == tex, "texture lost");
  check(mesh::obj_text(back) == mesh::obj_text(m), "re-export differs");

  const auto sq = mesh::build_empty_room(testing::rectangle(4, 4, 2.8), CameraPose{{2, 2}, 1.6, 0},
                                         TextureImage(make_grid(256), Rgb8{128, 128, 128}));
  for (const auto& [x, y, z] : {std::tuple{6.0, 4.0, 2.8}, {5.0, 4.0, 3.0}, {3.5, 7.25, 2.5}}) {
    const auto e = mesh::mesh_bounds(mesh::scale_mesh(sq, {x, y, z})).extent();
    check(e.x() == x && e.y() == y && e.z() == z, "scale_mesh bbox " + fmt(e.x()) + " x " + fmt(e.y()) + " x " + fmt(e.z()));
  }
  std::uniform_real_distribution<double> dim(1.5, 9.0);
  double worst_scale = 0;
  for (int i = 0; i < 20; ++i) {
    const auto room = testing::random_room(rng, i % 2 == 1);
    const auto r = mesh::build_empty_room(room.shape, room.camera, TextureImage(make_grid(128), Rgb8{90, 90, 90}), 10.0);
    const double tx = dim(rng), ty = dim(rng), tz = 0.5 * dim(rng);
    const auto e = mesh::mesh_bounds(mesh::scale_mesh(r, {tx, ty, tz})).extent();
    worst_scale = std::max({worst_scale, std::abs(e.x() - tx), std::abs(e.y() - ty), std::abs(e.z() - tz)});
  }
  check(worst_scale <= 1e-9, "rotated-room scale error " + fmt(worst_scale));
  check.detail = "residual " + fmt(worst) + " m, scale error " + fmt(worst_scale) + " m";
}

std::set<std::string> stanzas(const furniture::FurnitureLayout& l) {
  const auto lines = util::split_lines(furniture::serialize_furniture_css(l));
  return {lines.begin(), lines.end()};
}

std::pair<int, int> stanza_diff(const furniture::FurnitureLayout& a, const furniture::FurnitureLayout& b) {
  const auto la = stanzas(a), lb = stanzas(b);
  int only_a = 0, only_b = 0;
  for (const auto& s : la) only_a += lb.count(s) == 0;
  for (const auto& s : lb) only_b += la.count(s) == 0;
  return {only_a, only_b};
}

void furniture_criterion(Checker& check, const pipeline::Engine& engine) {
  using furniture::FurnitureItem;
  using furniture::FurnitureLayout;
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> pos(-5.0, 9.0), size(0.05, 3.0), deg(0.0, 360.0);
  const std::vector<std::string> cats = {"bed", "chair", "table", "wardrobe", "shelf_unit"};
  for (int n = 0; n < 50; ++n) {
    FurnitureLayout l;
    l.room = {size(rng) + 2, size(rng) + 2, pos(rng), pos(rng), {}};
    if (n % 3 == 0) l.room.outline = {{pos(rng), pos(rng)}, {pos(rng), pos(rng)}, {pos(rng), pos(rng)}};
    const int count = static_cast<int>(rng() % 9);
    for (int i = 0; i < count; ++i) {
      const std::string& cat = cats[rng() % cats.size()];
      l.items.push_back(FurnitureItem{cat, l.next_index(cat), size(rng), size(rng), size(rng), pos(rng), pos(rng),
                                      n % 2 ? deg(rng) : std::floor(deg(rng))});
    }
    const std::string text = furniture::serialize_furniture_css(l);
    const auto back = furniture::parse_furniture_css(text);
    check(back == l && furniture::serialize_furniture_css(back) == text, "CSS round trip:\n" + text);
  }

  const auto& sv = engine.services();
  const furniture::FurnitureContext ctx{sv.chat, sv.prompts, sv.furniture_bank, sv.assets};
  const RoomShape shape = testing::rectangle(5, 4, 2.8);
  const auto five = furniture::gen_furniture(shape, "bedroom", ctx).layout;
  const auto edit = [&](const std::string& cmd) {
    return furniture::edit_furniture(five, furniture::parse_edit_command(cmd), ctx).layout;
  };
  check(stanza_diff(five, edit("remove the table")) == std::pair{1, 0}, "remove changed more than one stanza");
  check(stanza_diff(five, edit("add a desk")) == std::pair{0, 1}, "add changed more than one stanza");
  check(stanza_diff(five, edit("replace the table with a wardrobe")) == std::pair{1, 1},
        "replace changed more than one stanza");

  double worst_seat = 0;
  int placements = 0;
  for (const auto& offset : {Vec2(0, 0), Vec2(1.25, -3.5), Vec2(-7.1, 2.3)}) {
    RoomShape moved = shape;
    for (auto& p : moved.floor_corners) p += offset;
    moved.floor_z = offset.x() * 0.1;
    const auto m = mesh::build_empty_room(moved, default_camera(moved), TextureImage(make_grid(128), Rgb8{1, 2, 3}), 15);
    const auto scene = furniture::merge(m, five, sv.assets);
    const auto bb = mesh::mesh_bounds(m);
    const Vec2 center((bb.min.x() + bb.max.x()) / 2, (bb.min.y() + bb.max.y()) / 2);
    const Vec2 delta = center - Vec2(five.room.left, five.room.top);
    check(scene.offset == delta, "offset is not the center delta");
    for (std::size_t i = 0; i < scene.placements.size(); ++i) {
      const auto& p = scene.placements[i];
      const auto& item = five.items[i];
      check(p.translation.x() == item.left + delta.x() && p.translation.y() == item.top + delta.y(),
            p.item + " translation is not item center plus delta");
      double lowest = 1e300;
      for (const auto& v : sv.assets.at(p.category).vertices) lowest = std::min(lowest, p.apply(v).z());
      worst_seat = std::max(worst_seat, std::abs(lowest - moved.floor_z));
      ++placements;
    }
  }
  check(worst_seat <= 1e-6, "placement " + fmt(worst_seat) + " m off the floor");
  check.detail = "50 CSS round trips, " + std::to_string(placements) + " placements, seat error " + fmt(worst_seat) + " m";
}

}  // namespace

int main() {
  pipeline::Engine engine(engine_options(128));
  const std::vector<std::pair<std::string, std::function<void(Checker&)>>> criteria = {
      {"depth-formula equivalence", depth_equivalence},
      {"semantic equivalence", semantic_equivalence},
      {"projection round-trip", projection_round_trip},
      {"seam invariance", seam_invariance},
      {"layout-1d", layout_1d},
      {"dsl", [&](Checker& c) { dsl_criterion(c, engine); }},
      {"end-to-end mock pipeline", end_to_end},
      {"edit loop determinism", edit_determinism},
      {"mesh", mesh_criterion},
      {"furniture", [&](Checker& c) { furniture_criterion(c, engine); }},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Checker c;
    try {
      fn(c);
    } catch (const std::exception& e) {
      c(false, std::string("exception: ") + e.what());
    }
    if (c.ok()) {
      std::cout << "PASS " << name << " (" << c.detail << ")\n";
    } else {
      ++failed;
      std::cout << "FAIL " << name << ":";
      for (const auto& f : c.failures) std::cout << " " << f << ";";
      std::cout << "\n";
    }
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed\n";
  return failed ? 1 : 0;
}
