#include "proom/pipeline/codec.hpp"

#include <cstdint>
#include <cstring>

#include <json.hpp>

#include "proom/geometry/shape.hpp"
#include "proom/image/maps.hpp"
#include "proom/texture/colors.hpp"

namespace proom::pipeline {

using dsl::RuntimeValue;
using dsl::SemType;
using nlohmann::json;

namespace {

const char kMeshMagic[] = "PRMESH1";

class Writer {
 public:
  void raw(const void* p, std::size_t n) { out_.append(static_cast<const char*>(p), n); }
  void u32(std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    raw(b, 4);
  }
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    raw(b, 8);
  }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    raw(s.data(), s.size());
  }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(const std::string& s) : s_(s) {}
  const unsigned char* take(std::size_t n) {
    if (pos_ + n > s_.size()) throw CodecError("mesh binary is truncated");
    const auto* p = reinterpret_cast<const unsigned char*>(s_.data() + pos_);
    pos_ += n;
    return p;
  }
  std::uint32_t u32() {
    const unsigned char* b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64() {
    const unsigned char* b = take(8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }
  std::string str() {
    const std::uint32_t n = u32();
    const unsigned char* p = take(n);
    return std::string(reinterpret_cast<const char*>(p), n);
  }
  std::uint32_t count(std::size_t item_bytes) {
    const std::uint32_t n = u32();
    if (static_cast<std::uint64_t>(n) * item_bytes > s_.size() - pos_) throw CodecError("mesh binary is truncated");
    return n;
  }
  bool done() const { return pos_ == s_.size(); }

 private:
  const std::string& s_;
  std::size_t pos_ = 0;
};

std::string hex(const geometry::Rgb8& c) {
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", c.r, c.g, c.b);
  return buf;
}

geometry::Rgb8 parse_hex(const std::string& s) {
  if (s.size() != 7 || s[0] != '#') throw CodecError("bad color " + s);
  const auto byte = [&](int i) {
    return static_cast<std::uint8_t>(std::stoi(s.substr(1 + 2 * i, 2), nullptr, 16));
  };
  return {byte(0), byte(1), byte(2)};
}

json style_json(const texture::SurfaceStyle& s) {
  return {{"base", hex(s.base)},
          {"pattern", texture::pattern_name(s.pattern)},
          {"scale", s.scale},
          {"secondary", hex(s.secondary)}};
}

texture::SurfaceStyle parse_style(const json& j) {
  texture::SurfaceStyle s;
  s.base = parse_hex(j.at("base").get<std::string>());
  const auto p = texture::pattern_from_name(j.at("pattern").get<std::string>());
  if (!p) throw CodecError("unknown pattern " + j.at("pattern").get<std::string>());
  s.pattern = *p;
  s.scale = j.at("scale").get<double>();
  s.secondary = parse_hex(j.at("secondary").get<std::string>());
  return s;
}

json camera_json(const geometry::CameraPose& c) {
  return {{"position", {c.position.x(), c.position.y()}}, {"height", c.height}, {"yaw", c.yaw}};
}

geometry::CameraPose parse_camera(const json& j) {
  geometry::CameraPose c;
  c.position = {j.at("position").at(0).get<double>(), j.at("position").at(1).get<double>()};
  c.height = j.at("height").get<double>();
  c.yaw = j.at("yaw").get<double>();
  return c;
}

std::string meta(const geometry::RoomShape& shape, const geometry::CameraPose& cam, const json& extra = json::object()) {
  json j = extra;
  j["shape"] = geometry::serialize_shape(shape);
  j["camera"] = camera_json(cam);
  return j.dump(2) + "\n";
}

struct Meta {
  geometry::RoomShape shape;
  geometry::CameraPose camera;
  json doc;
};

Meta parse_meta(const std::string& text) {
  json j = json::parse(text);
  return {geometry::parse_shape(j.at("shape").get<std::string>()), parse_camera(j.at("camera")), j};
}

ArtifactFile file(std::string role, std::string media, std::string ext, std::string bytes) {
  return {std::move(role), std::move(media), std::move(ext), std::move(bytes)};
}

ArtifactFile json_file(std::string role, const std::string& text) {
  return file(std::move(role), "application/json", "json", text);
}

std::vector<ArtifactFile> mesh_files(const mesh::RoomMesh& m) {
  return {file("mesh", "application/octet-stream", "prmesh", encode_mesh_binary(m)),
          file("obj", "model/obj", "obj", mesh::obj_text(m)),
          file("mtl", "model/mtl", "mtl", mesh::mtl_text(m)),
          file("texture", "image/png", "png", image::encode_texture_png(m.texture))};
}

std::string scene_document(const furniture::Scene& scene) {
  json j = json::parse(furniture::scene_json(scene, "room.obj"));
  j["layout"] = furniture::serialize_furniture_css(scene.layout);
  for (std::size_t i = 0; i < scene.placements.size(); ++i) j["placements"][i]["rotation"] = scene.placements[i].rotation;
  return j.dump(2) + "\n";
}

furniture::Scene parse_scene_document(const std::string& text, mesh::RoomMesh room) {
  const json j = json::parse(text);
  furniture::Scene s;
  s.room = std::move(room);
  s.layout = furniture::parse_furniture_css(j.at("layout").get<std::string>());
  s.offset = {j.at("offset").at(0).get<double>(), j.at("offset").at(1).get<double>()};
  for (const json& p : j.at("placements")) {
    furniture::Placement pl;
    pl.item = p.at("item").get<std::string>();
    pl.category = p.at("category").get<std::string>();
    pl.asset = p.at("asset").get<std::string>();
    const auto& sc = p.at("scale");
    pl.scale = {sc.at(0).get<double>(), sc.at(1).get<double>(), sc.at(2).get<double>()};
    pl.rotation = p.at("rotation").get<double>();
    const auto& t = p.at("translation");
    pl.translation = {t.at(0).get<double>(), t.at(1).get<double>(), t.at(2).get<double>()};
    s.placements.push_back(std::move(pl));
  }
  return s;
}

const std::string& need(const std::map<std::string, std::string>& files, const std::string& role) {
  auto it = files.find(role);
  if (it == files.end()) throw CodecError("missing '" + role + "' file");
  return it->second;
}

}  // namespace

std::string texture_spec_json(const texture::TextureSpec& spec) {
  json j;
  j["floor"] = style_json(spec.floor);
  j["walls"] = style_json(spec.walls);
  j["ceiling"] = style_json(spec.ceiling);
  j["door"] = style_json(spec.door);
  j["window"] = style_json(spec.window);
  j["text"] = spec.text;
  j["unparsed"] = spec.unparsed;
  j["notes"] = spec.notes;
  return j.dump(2) + "\n";
}

texture::TextureSpec parse_texture_spec_json(const std::string& text) {
  const json j = json::parse(text);
  texture::TextureSpec s;
  s.floor = parse_style(j.at("floor"));
  s.walls = parse_style(j.at("walls"));
  s.ceiling = parse_style(j.at("ceiling"));
  s.door = parse_style(j.at("door"));
  s.window = parse_style(j.at("window"));
  s.text = j.at("text").get<std::string>();
  s.unparsed = j.at("unparsed").get<std::vector<std::string>>();
  s.notes = j.at("notes").get<std::vector<std::string>>();
  return s;
}

std::string encode_mesh_binary(const mesh::RoomMesh& m) {
  m.validate();
  Writer w;
  w.raw(kMeshMagic, 8);  // includes the terminating zero
  w.u32(static_cast<std::uint32_t>(m.vertices.size()));
  for (const auto& v : m.vertices) {
    w.f64(v.x());
    w.f64(v.y());
    w.f64(v.z());
  }
  w.u32(static_cast<std::uint32_t>(m.uvs.size()));
  for (const auto& uv : m.uvs) {
    w.f64(uv.x());
    w.f64(uv.y());
  }
  w.u32(static_cast<std::uint32_t>(m.triangles.size()));
  for (std::size_t t = 0; t < m.triangles.size(); ++t) {
    for (int i : m.triangles[t]) w.i32(i);
    w.i32(static_cast<std::int32_t>(m.tags[t].kind));
    w.i32(m.tags[t].wall);
  }
  w.str(m.material);
  w.u32(static_cast<std::uint32_t>(m.texture.width()));
  w.u32(static_cast<std::uint32_t>(m.texture.height()));
  for (const auto& px : m.texture.pixels) {
    const std::uint8_t rgb[3] = {px.r, px.g, px.b};
    w.raw(rgb, 3);
  }
  return w.take();
}

mesh::RoomMesh decode_mesh_binary(const std::string& bytes) {
  Reader r(bytes);
  if (std::memcmp(r.take(8), kMeshMagic, 8) != 0) throw CodecError("not a PRMESH1 file");
  mesh::RoomMesh m;
  const std::uint32_t nv = r.count(24);
  m.vertices.reserve(nv);
  for (std::uint32_t i = 0; i < nv; ++i) {
    const double x = r.f64(), y = r.f64(), z = r.f64();
    m.vertices.emplace_back(x, y, z);
  }
  const std::uint32_t nu = r.count(16);
  m.uvs.reserve(nu);
  for (std::uint32_t i = 0; i < nu; ++i) {
    const double u = r.f64(), v = r.f64();
    m.uvs.emplace_back(u, v);
  }
  const std::uint32_t nt = r.count(20);
  m.triangles.reserve(nt);
  m.tags.reserve(nt);
  for (std::uint32_t i = 0; i < nt; ++i) {
    mesh::Triangle t;
    for (int& k : t) k = r.i32();
    const std::int32_t kind = r.i32();
    if (kind < 0 || kind > 2) throw CodecError("bad surface tag in mesh binary");
    m.triangles.push_back(t);
    m.tags.push_back({static_cast<mesh::SurfaceTag::Kind>(kind), r.i32()});
  }
  m.material = r.str();
  const std::uint32_t w = r.u32(), h = r.u32();
  m.texture = geometry::TextureImage(geometry::PanoramaGrid{static_cast<int>(w), static_cast<int>(h)});
  const unsigned char* px = r.take(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < m.texture.pixels.size(); ++i) m.texture.pixels[i] = {px[3 * i], px[3 * i + 1], px[3 * i + 2]};
  if (!r.done()) throw CodecError("trailing bytes in mesh binary");
  try {
    m.validate();
  } catch (const mesh::MeshError& e) {
    throw CodecError(std::string("invalid mesh binary: ") + e.what());
  }
  return m;
}

std::vector<ArtifactFile> encode_value(const RuntimeValue& v) {
  switch (v.type) {
    case SemType::text:
      return {file("text", "text/plain; charset=utf-8", "txt", v.text())};
    case SemType::number:
      return {json_file("json", json(v.number()).dump() + "\n")};
    case SemType::number_list:
      return {json_file("json", json(v.numbers()).dump() + "\n")};
    case SemType::shape:
      return {file("shape", "text/plain; charset=utf-8", "shape", geometry::serialize_shape(as_shape(v)))};
    case SemType::layout: {
      const auto& l = as_layout(v);
      return {file("png", "image/png", "png", image::encode_layout_png(l.map)), json_file("meta", meta(l.shape, l.camera))};
    }
    case SemType::depth: {
      const auto& d = as_depth(v);
      return {file("exact", "application/octet-stream", "prdepth", image::encode_depth_sidecar(d.map)),
              file("png", "image/png", "png", image::encode_depth_png(d.map)), json_file("meta", meta(d.shape, d.camera))};
    }
    case SemType::semantic: {
      const auto& s = as_semantic(v);
      return {file("png", "image/png", "png", image::encode_semantic_png(s.map)), json_file("meta", meta(s.shape, s.camera))};
    }
    case SemType::texture: {
      const auto& t = as_texture(v);
      return {file("png", "image/png", "png", image::encode_texture_png(t.image)),
              json_file("spec", texture_spec_json(t.spec)),
              json_file("meta", meta(t.shape, t.camera, {{"seed", t.seed}}))};
    }
    case SemType::room_mesh:
      return mesh_files(as_mesh(v));
    case SemType::furniture:
      return {file("css", "text/css; charset=utf-8", "css", furniture::serialize_furniture_css(as_furniture(v)))};
    case SemType::scene: {
      const auto& s = as_scene(v);
      return {json_file("scene", scene_document(s)),
              file("mesh", "application/octet-stream", "prmesh", encode_mesh_binary(s.room))};
    }
    case SemType::session: {
      const auto& s = as_session(v);
      return {json_file("json", json{{"id", s.id}, {"step", s.step}, {"names", s.names}}.dump(2) + "\n")};
    }
  }
  throw CodecError("unknown value type");
}

std::vector<std::string> required_roles(SemType type) {
  switch (type) {
    case SemType::text: return {"text"};
    case SemType::number:
    case SemType::number_list:
    case SemType::session: return {"json"};
    case SemType::shape: return {"shape"};
    case SemType::layout:
    case SemType::semantic: return {"png", "meta"};
    case SemType::depth: return {"exact", "meta"};
    case SemType::texture: return {"png", "spec", "meta"};
    case SemType::room_mesh: return {"mesh"};
    case SemType::furniture: return {"css"};
    case SemType::scene: return {"scene", "mesh"};
  }
  return {};
}

RuntimeValue decode_value(SemType type, const std::map<std::string, std::string>& files) {
  try {
    switch (type) {
      case SemType::text:
        return {type, need(files, "text")};
      case SemType::number:
        return {type, json::parse(need(files, "json")).get<double>()};
      case SemType::number_list:
        return {type, json::parse(need(files, "json")).get<dsl::NumberList>()};
      case SemType::shape:
        return RuntimeValue::object(type, geometry::parse_shape(need(files, "shape")));
      case SemType::layout: {
        Meta m = parse_meta(need(files, "meta"));
        return RuntimeValue::object(type, LayoutValue{m.shape, m.camera, image::decode_layout_png(need(files, "png"))});
      }
      case SemType::depth: {
        Meta m = parse_meta(need(files, "meta"));
        return RuntimeValue::object(type, DepthValue{m.shape, m.camera, image::decode_depth_sidecar(need(files, "exact"))});
      }
      case SemType::semantic: {
        Meta m = parse_meta(need(files, "meta"));
        return RuntimeValue::object(type,
                                    SemanticValue{m.shape, m.camera, image::decode_semantic_png(need(files, "png"))});
      }
      case SemType::texture: {
        Meta m = parse_meta(need(files, "meta"));
        return RuntimeValue::object(
            type, TextureValue{m.shape, m.camera, image::decode_texture_png(need(files, "png")),
                               parse_texture_spec_json(need(files, "spec")), m.doc.at("seed").get<std::uint64_t>()});
      }
      case SemType::room_mesh:
        return RuntimeValue::object(type, decode_mesh_binary(need(files, "mesh")));
      case SemType::furniture:
        return RuntimeValue::object(type, furniture::parse_furniture_css(need(files, "css")));
      case SemType::scene:
        return RuntimeValue::object(type,
                                    parse_scene_document(need(files, "scene"), decode_mesh_binary(need(files, "mesh"))));
      case SemType::session: {
        const json j = json::parse(need(files, "json"));
        return RuntimeValue::object(type, SessionValue{j.at("id").get<std::string>(), j.at("step").get<int>(),
                                                       j.at("names").get<std::vector<std::string>>()});
      }
    }
  } catch (const CodecError&) {
    throw;
  } catch (const std::exception& e) {
    throw CodecError(std::string("cannot decode ") + dsl::type_name(type) + ": " + e.what());
  }
  throw CodecError("unknown value type");
}

}  // namespace proom::pipeline
