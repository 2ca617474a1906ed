#include <chrono>
#include <random>
#include <thread>

#include "doctest.h"
#include "proom/geometry/panorama.hpp"
#include "proom/geometry/shape.hpp"
#include "proom/image/maps.hpp"
#include "proom/texture/backend.hpp"
#include "proom/texture/colors.hpp"
#include "proom/texture/procedural.hpp"
#include "proom/texture/spec.hpp"
#include "../support/random_rooms.hpp"
#include "../support/stub_server.hpp"

using namespace proom::geometry;
using namespace proom::texture;

namespace {

Rgb8 css(const char* name) { return *named_color(name); }

struct Maps {
  LayoutMap layout;
  DepthMap depth;
  SemanticMap semantic;
};

Maps maps_for(const RoomShape& s, const CameraPose& cam, int width) {
  const PanoramaGrid g = make_grid(width);
  Maps m{gen_layout(s, cam, g), gen_depth(s, cam, g), {}};
  m.semantic = gen_semantic(m.layout, g, s, cam);
  return m;
}

Maps square_maps(int width = 256) {
  CameraPose cam;
  cam.position = {2, 2};
  return maps_for(proom::testing::rectangle(4, 4, 2.8), cam, width);
}

TextureSpec random_spec(std::mt19937_64& rng) {
  const std::vector<const char*> colors{"red", "navy", "beige", "olivedrab", "white", "black", "peru", "teal"};
  auto pick_color = [&] { return css(colors[rng() % colors.size()]); };
  auto pick_style = [&] {
    const auto p = static_cast<Pattern>(rng() % 5);
    SurfaceStyle s = make_style(pick_color(), p);
    s.secondary = pick_color();
    s.scale = 0.05 + 0.6 * std::uniform_real_distribution<double>(0, 1)(rng);
    return s;
  };
  TextureSpec spec = TextureSpec::defaults();
  spec.floor = pick_style();
  spec.walls = pick_style();
  spec.ceiling = pick_style();
  spec.door = pick_style();
  spec.window = pick_style();
  return spec;
}

// wrap error restricted to rows whose end columns carry the same label
double same_label_wrap_error(const TextureImage& img, const SemanticMap& sem) {
  const int w = img.width();
  double sum = 0;
  int rows = 0;
  for (int r = 0; r < img.height(); ++r) {
    if (sem.at(r, 0) != sem.at(r, w - 1)) continue;
    const auto& a = img.at(r, w - 1);
    const auto& b = img.at(r, 0);
    sum += std::abs(a.r - b.r) + std::abs(a.g - b.g) + std::abs(a.b - b.b);
    ++rows;
  }
  return rows ? sum / (3.0 * rows) : 0.0;
}

}  // namespace

TEST_CASE("named colors") {
  CHECK(css("lightblue") == Rgb8{173, 216, 230});
  CHECK(css("white") == Rgb8{255, 255, 255});
  CHECK(css("rebeccapurple") == Rgb8{102, 51, 153});
  CHECK_FALSE(named_color("notacolor").has_value());
  CHECK(color_name({128, 128, 128}) == "gray");
  CHECK(color_name({1, 2, 3}) == "#010203");
}

TEST_CASE("parse_texture_spec: annotation sentence") {
  const auto s = parse_texture_spec(
      "The walls are painted in a light blue color, the ceiling is white, and the floor is made of wood");
  CHECK(s.walls.base == css("lightblue"));
  CHECK(s.walls.pattern == Pattern::solid);
  CHECK(s.ceiling.base == css("white"));
  CHECK(s.ceiling.pattern == Pattern::solid);
  CHECK(s.floor.base == css("brown"));
  CHECK(s.floor.pattern == Pattern::planks);
  CHECK(s.notes.empty());

  const auto w = parse_texture_spec("the floor is made of wood with a pattern of brown stripes");
  CHECK(w.floor.pattern == Pattern::planks);
  CHECK(w.floor.base == css("brown"));
}

TEST_CASE("parse_texture_spec: defaults, keywords and scale") {
  const auto d = parse_texture_spec("");
  CHECK(d == TextureSpec::defaults());
  CHECK(d.floor.pattern == Pattern::planks);
  CHECK(d.floor.base == css("brown"));
  CHECK(d.walls.pattern == Pattern::solid);
  CHECK(d.walls.base == css("lightgray"));
  CHECK(d.ceiling.base == css("white"));

  const auto t = parse_texture_spec("red tiles floor, 0.3m");
  CHECK(t.floor.pattern == Pattern::tiles);
  CHECK(t.floor.scale == 0.3);
  CHECK(t.floor.base == css("red"));
  CHECK(t.walls == d.walls);

  const auto cm = parse_texture_spec("walls with 30 cm navy and white stripes");
  CHECK(cm.walls.pattern == Pattern::stripes);
  CHECK(cm.walls.scale == doctest::Approx(0.3));
  CHECK(cm.walls.base == css("navy"));
  CHECK(cm.walls.secondary == css("white"));

  const auto both = parse_texture_spec("walls and ceiling are beige");
  CHECK(both.walls.base == css("beige"));
  CHECK(both.ceiling.base == css("beige"));

  const auto full = parse_texture_spec("Create a 5m by 4m bedroom with a wooden floor and light gray walls, and furnish it");
  CHECK(full.floor.pattern == Pattern::planks);
  CHECK(full.floor.scale == default_scale(Pattern::planks));
  CHECK(full.walls.base == css("lightgray"));
  CHECK(full.unparsed == std::vector<std::string>{"and furnish it"});

  const auto hex = parse_texture_spec("ceiling #102030");
  CHECK(hex.ceiling.base == Rgb8{16, 32, 48});

  const auto unknown = parse_texture_spec("walls in a glorptastic color");
  CHECK(unknown.walls == d.walls);
  REQUIRE(unknown.notes.size() == 1);
  CHECK(unknown.notes[0].find("glorptastic") != std::string::npos);

  const auto light = parse_texture_spec("light brown walls");
  CHECK(light.walls.base != css("brown"));
  CHECK(light.walls.base.r > css("brown").r);
}

TEST_CASE("parse_texture_spec over a previous spec only touches mentioned surfaces") {
  const auto first = parse_texture_spec("wooden floor and light gray walls");
  const auto edited = parse_texture_spec("change the floor to red tiles", first);
  CHECK(edited.floor.pattern == Pattern::tiles);
  CHECK(edited.floor.base == css("red"));
  CHECK(edited.walls == first.walls);
  CHECK(edited.ceiling == first.ceiling);
  CHECK(edited.text == "wooden floor and light gray walls\nchange the floor to red tiles");

  const auto recolor = parse_texture_spec("make the floor gray", edited);
  CHECK(recolor.floor.pattern == Pattern::tiles);
  CHECK(recolor.floor.base == css("gray"));
}

TEST_CASE("wrap_continuity_error") {
  TextureImage img(make_grid(64), Rgb8{10, 20, 30});
  CHECK(wrap_continuity_error(img) == 0.0);
  for (int r = 0; r < img.height(); ++r) {
    img.at(r, 0) = {0, 0, 0};
    img.at(r, img.width() - 1) = {255, 255, 255};
  }
  CHECK(wrap_continuity_error(img) == 255.0);
}

TEST_CASE("procedural solid spec paints each label with its color") {
  const Maps m = square_maps();
  TextureSpec spec = TextureSpec::defaults();
  spec.floor = make_style(css("olive"), Pattern::solid);
  spec.walls = make_style(css("lightgray"), Pattern::solid);
  spec.ceiling = make_style(css("white"), Pattern::solid);
  const auto img = gen_texture_procedural(m.semantic, m.depth, spec, 5);
  double sum[3] = {0, 0, 0};
  std::size_t n = 0;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    CHECK(img.pixels[i] == style_for(spec, m.semantic.pixels[i]).base);
    if (m.semantic.pixels[i] == SurfaceLabel::floor) {
      sum[0] += img.pixels[i].r;
      sum[1] += img.pixels[i].g;
      sum[2] += img.pixels[i].b;
      ++n;
    }
  }
  CHECK(sum[0] / n == 128.0);
  CHECK(sum[1] / n == 128.0);
  CHECK(sum[2] / n == 0.0);
}

TEST_CASE("procedural textures are deterministic and seam-continuous") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 20; ++i) {
    const auto room = proom::testing::random_room(rng, i % 2 == 1);
    const Maps m = maps_for(room.shape, room.camera, 256);
    const TextureSpec spec = random_spec(rng);
    const auto a = gen_texture_procedural(m.semantic, m.depth, spec, 1);
    CAPTURE(i);
    // columns 0 and W-1 can see different surfaces near steep boundaries;
    // the pattern itself must not add a seam
    CHECK(same_label_wrap_error(a, m.semantic) <= kWrapThreshold);
    CHECK(gen_texture_procedural(m.semantic, m.depth, spec, 1) == a);
  }
}

TEST_CASE("wrap continuity over random specs and seeds") {
  std::mt19937_64 rng(2);
  CameraPose cam54;
  cam54.position = {2.5, 2};
  const Maps rooms[] = {square_maps(256), maps_for(proom::testing::rectangle(5, 4, 2.8), cam54, 512),
                        maps_for(proom::testing::l_shape(6, 5, 2.5, 2, 2.7),
                                 default_camera(proom::testing::l_shape(6, 5, 2.5, 2, 2.7)), 256)};
  for (int i = 0; i < 20; ++i) {
    const TextureSpec spec = random_spec(rng);
    for (const auto& m : rooms) {
      const auto img = gen_texture_procedural(m.semantic, m.depth, spec, rng());
      CAPTURE(i);
      CHECK(wrap_continuity_error(img) <= kWrapThreshold);
    }
  }
}

TEST_CASE("seeds move per-surface means by at most 2 levels") {
  const Maps m = square_maps();
  const auto spec = parse_texture_spec("oak planks floor, speckled walls, tiled ceiling");
  auto means = [&](std::uint64_t seed) {
    const auto img = gen_texture_procedural(m.semantic, m.depth, spec, seed);
    std::array<double, 9> out{};
    std::array<int, 3> count{};
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const int l = static_cast<int>(m.semantic.pixels[i]);
      if (l > 2) continue;
      out[3 * l] += img.pixels[i].r;
      out[3 * l + 1] += img.pixels[i].g;
      out[3 * l + 2] += img.pixels[i].b;
      ++count[l];
    }
    for (int k = 0; k < 9; ++k) out[k] /= count[k / 3];
    return out;
  };
  const auto a = means(1);
  const auto b = means(987654321);
  CHECK(gen_texture_procedural(m.semantic, m.depth, spec, 1) != gen_texture_procedural(m.semantic, m.depth, spec, 2));
  for (int k = 0; k < 9; ++k) CHECK(std::abs(a[k] - b[k]) <= 2.0);
}

TEST_CASE("procedural rejects mismatched grids") {
  const Maps m = square_maps(128);
  const DepthMap wrong(make_grid(64), 1.0);
  CHECK_THROWS(gen_texture_procedural(m.semantic, wrong, TextureSpec::defaults(), 0));
  ProceduralBackend backend;
  const TextureSpec spec = TextureSpec::defaults();
  TextureRequest req{m.layout, wrong, m.semantic, spec, "", 0};
  try {
    backend.generate(req);
    FAIL("expected an error");
  } catch (const TextureError& e) {
    CHECK(e.kind() == TextureError::Kind::input);
  }
}

TEST_CASE("remote backend contract against stub services") {
  const Maps m = square_maps(128);
  const TextureSpec spec = parse_texture_spec("white walls");
  const TextureRequest req{m.layout, m.depth, m.semantic, spec, "white walls", 42};
  const auto good = gen_texture_procedural(m.semantic, m.depth, spec, 42);

  httplib::Server server;
  std::string seen_text, seen_seed;
  bool layout_ok = false, semantic_ok = false, depth_ok = false;
  server.Post("/ok", [&](const httplib::Request& rq, httplib::Response& rs) {
    seen_text = rq.get_file_value("text").content;
    seen_seed = rq.get_file_value("seed").content;
    layout_ok = proom::image::decode_layout_png(rq.get_file_value("layout").content) == m.layout;
    semantic_ok = proom::image::decode_semantic_png(rq.get_file_value("semantic").content) == m.semantic;
    depth_ok = proom::image::decode_depth_png(rq.get_file_value("depth").content).grid == m.depth.grid;
    rs.set_content(proom::image::encode_texture_png(good), "image/png");
  });
  server.Post("/small", [&](const httplib::Request&, httplib::Response& rs) {
    rs.set_content(proom::image::encode_texture_png(TextureImage(make_grid(64))), "image/png");
  });
  server.Post("/slow", [&](const httplib::Request&, httplib::Response& rs) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    rs.set_content(proom::image::encode_texture_png(good), "image/png");
  });
  server.Post("/prose", [&](const httplib::Request&, httplib::Response& rs) {
    rs.set_content("here is your texture!", "text/plain");
  });
  server.Post("/seam", [&](const httplib::Request&, httplib::Response& rs) {
    TextureImage bad(m.semantic.grid, Rgb8{128, 128, 128});
    for (int r = 0; r < bad.height(); ++r) bad.at(r, 0) = {0, 0, 0};
    rs.set_content(proom::image::encode_texture_png(bad), "image/png");
  });
  server.Post("/error", [&](const httplib::Request&, httplib::Response& rs) { rs.status = 500; });
  proom::testing::StubServer stub(server);

  auto kind_of = [&](const std::string& path, int timeout_ms = 5000) {
    try {
      RemoteBackend(stub.url(path), std::chrono::milliseconds(timeout_ms)).generate(req);
    } catch (const TextureError& e) {
      return std::string(error_kind_name(e.kind()));
    }
    return std::string("ok");
  };

  CHECK(RemoteBackend(stub.url("/ok"), std::chrono::seconds(5)).generate(req) == good);
  CHECK(seen_text == "white walls");
  CHECK(seen_seed == "42");
  CHECK(layout_ok);
  CHECK(semantic_ok);
  CHECK(depth_ok);
  CHECK(kind_of("/small") == "dimension-mismatch");
  CHECK(kind_of("/slow", 300) == "timeout");
  CHECK(kind_of("/prose") == "malformed-response");
  CHECK(kind_of("/error") == "malformed-response");
  CHECK(kind_of("/seam") == "wrap-continuity");

  const int dead_port = proom::testing::unused_port();
  try {
    RemoteBackend("http://127.0.0.1:" + std::to_string(dead_port) + "/x", std::chrono::seconds(2)).generate(req);
    FAIL("expected a network error");
  } catch (const TextureError& e) {
    CHECK(e.kind() == TextureError::Kind::network);
  }
}
