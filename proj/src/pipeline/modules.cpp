#include "proom/pipeline/modules.hpp"

#include "proom/geometry/panorama.hpp"
#include "proom/geometry/shape.hpp"
#include "proom/llm/generate.hpp"

namespace proom::pipeline {

using dsl::CallContext;
using dsl::DslError;
using dsl::Parameter;
using dsl::RuntimeValue;
using dsl::SemType;
using dsl::Signature;

const geometry::RoomShape& as_shape(const RuntimeValue& v) { return v.as<geometry::RoomShape>(); }
const LayoutValue& as_layout(const RuntimeValue& v) { return v.as<LayoutValue>(); }
const DepthValue& as_depth(const RuntimeValue& v) { return v.as<DepthValue>(); }
const SemanticValue& as_semantic(const RuntimeValue& v) { return v.as<SemanticValue>(); }
const TextureValue& as_texture(const RuntimeValue& v) { return v.as<TextureValue>(); }
const mesh::RoomMesh& as_mesh(const RuntimeValue& v) { return v.as<mesh::RoomMesh>(); }
const furniture::FurnitureLayout& as_furniture(const RuntimeValue& v) { return v.as<furniture::FurnitureLayout>(); }
const furniture::Scene& as_scene(const RuntimeValue& v) { return v.as<furniture::Scene>(); }
const SessionValue& as_session(const RuntimeValue& v) { return v.as<SessionValue>(); }

namespace {

struct ModuleDef {
  const char* name;
  Signature signature;
};

Parameter req(const char* name, SemType t) { return {name, t, true}; }
Parameter opt(const char* name, SemType t) { return {name, t, false}; }

const std::vector<ModuleDef>& definitions() {
  using T = SemType;
  static const std::vector<ModuleDef> defs = {
      {"GenShape", {{req("instruction", T::text)}, T::shape}},
      {"GenLayout", {{req("shape", T::shape)}, T::layout}},
      {"GenDepth", {{req("shape", T::shape)}, T::depth}},
      {"GenSemantic", {{req("layout", T::layout)}, T::semantic}},
      {"GenTexture",
       {{req("layout", T::layout), req("depth", T::depth), req("semantic", T::semantic), req("instruction", T::text)},
        T::texture}},
      {"GenEmptyRoom", {{req("texture", T::texture), req("depth", T::depth), opt("size", T::number_list)}, T::room_mesh}},
      {"GenFurniture", {{req("shape", T::shape), opt("room_type", T::text)}, T::furniture}},
      {"EditShape", {{req("shape", T::shape), req("instruction", T::text)}, T::shape}},
      {"EditLayout", {{req("layout", T::layout), opt("shape", T::shape), opt("instruction", T::text)}, T::layout}},
      {"EditDepth", {{req("depth", T::depth), opt("shape", T::shape), opt("instruction", T::text)}, T::depth}},
      {"EditSemantic",
       {{req("semantic", T::semantic), opt("layout", T::layout), opt("instruction", T::text)}, T::semantic}},
      {"EditTexture",
       {{req("texture", T::texture), opt("instruction", T::text), opt("layout", T::layout), opt("depth", T::depth),
         opt("semantic", T::semantic)},
        T::texture}},
      {"EditEmptyRoom",
       {{req("room", T::room_mesh), opt("texture", T::texture), opt("depth", T::depth), opt("size", T::number_list)},
        T::room_mesh}},
      {"EditFurniture", {{req("furniture", T::furniture), req("instruction", T::text)}, T::furniture}},
      {"LoadRoom", {{req("session", T::text)}, T::session}},
      {"Merge", {{req("room", T::room_mesh), req("furniture", T::furniture)}, T::scene}},
  };
  return defs;
}

const Signature& signature_of(const std::string& name) {
  for (const auto& d : definitions()) {
    if (name == d.name) return d.signature;
  }
  throw DslError("no module " + name);
}

LayoutValue render_layout(const geometry::RoomShape& shape, const PipelineConfig& cfg) {
  const geometry::CameraPose cam = geometry::default_camera(shape);
  return {shape, cam, geometry::gen_layout(shape, cam, cfg.grid)};
}

DepthValue render_depth(const geometry::RoomShape& shape, const PipelineConfig& cfg) {
  const geometry::CameraPose cam = geometry::default_camera(shape);
  return {shape, cam, geometry::gen_depth(shape, cam, cfg.grid)};
}

SemanticValue render_semantic(const LayoutValue& layout) {
  return {layout.shape, layout.camera,
          geometry::gen_semantic(layout.map, layout.map.grid, layout.shape, layout.camera)};
}

void require_same_scene(const geometry::RoomShape& a, const geometry::CameraPose& ca, const geometry::RoomShape& b,
                        const geometry::CameraPose& cb, const char* what) {
  if (!(a == b) || !(ca == cb)) throw DslError(std::string(what) + " were rendered from different rooms");
}

texture::TextureSpec fold(const texture::TextureSpec& base, const std::string& instruction) {
  return texture::parse_texture_spec(instruction, base);
}

TextureValue paint(const Services& s, const LayoutValue& layout, const DepthValue& depth,
                   const SemanticValue& semantic, texture::TextureSpec spec, const std::string& text,
                   std::uint64_t seed) {
  require_same_scene(layout.shape, layout.camera, depth.shape, depth.camera, "layout and depth");
  require_same_scene(layout.shape, layout.camera, semantic.shape, semantic.camera, "layout and semantic");
  const texture::TextureRequest req{layout.map, depth.map, semantic.map, spec, text, seed};
  TextureValue out{layout.shape, layout.camera, s.texture.generate(req), std::move(spec), seed};
  return out;
}

mesh::RoomMesh sized(mesh::RoomMesh m, const CallContext& ctx) {
  if (!ctx.has("size")) return m;
  const auto& n = ctx.arg("size").numbers();
  if (n.size() != 2 && n.size() != 3)
    throw DslError("size takes [length, width] or [length, width, height] in meters");
  mesh::ScaleTarget t{n[0], n[1], n.size() == 3 ? std::optional<double>(n[2]) : std::nullopt};
  return mesh::scale_mesh(m, t);
}

// A shape from an explicit `shape` argument or by editing `base` with `instruction`.
geometry::RoomShape target_shape(const Services& s, const CallContext& ctx, const geometry::RoomShape& base) {
  if (ctx.has("shape")) return ctx.get<geometry::RoomShape>("shape");
  if (ctx.has("instruction"))
    return llm::edit_shape(base, ctx.arg("instruction").text(), s.chat, s.prompts, s.config.decode);
  throw DslError(ctx.statement.module + " needs a shape or an instruction");
}

furniture::FurnitureContext furniture_context(const Services& s) {
  return {s.chat, s.prompts, s.furniture_bank, s.assets, s.config.decode};
}

using Handler = std::function<RuntimeValue(const Services&, CallContext&)>;

const std::vector<std::pair<std::string, Handler>>& handlers() {
  using T = SemType;
  static const std::vector<std::pair<std::string, Handler>> hs = {
      {"GenShape",
       [](const Services& s, CallContext& c) {
         return RuntimeValue::object(
             T::shape, llm::gen_shape(c.arg("instruction").text(), s.chat, s.prompts, s.config.decode));
       }},
      {"GenLayout",
       [](const Services& s, CallContext& c) {
         return RuntimeValue::object(T::layout, render_layout(c.get<geometry::RoomShape>("shape"), s.config));
       }},
      {"GenDepth",
       [](const Services& s, CallContext& c) {
         return RuntimeValue::object(T::depth, render_depth(c.get<geometry::RoomShape>("shape"), s.config));
       }},
      {"GenSemantic",
       [](const Services&, CallContext& c) {
         return RuntimeValue::object(T::semantic, render_semantic(c.get<LayoutValue>("layout")));
       }},
      {"GenTexture",
       [](const Services& s, CallContext& c) {
         const std::string& text = c.arg("instruction").text();
         return RuntimeValue::object(
             T::texture, paint(s, c.get<LayoutValue>("layout"), c.get<DepthValue>("depth"),
                               c.get<SemanticValue>("semantic"), texture::parse_texture_spec(text), text, s.config.seed));
       }},
      {"GenEmptyRoom",
       [](const Services& s, CallContext& c) {
         const auto& tex = c.get<TextureValue>("texture");
         const auto& depth = c.get<DepthValue>("depth");
         require_same_scene(tex.shape, tex.camera, depth.shape, depth.camera, "texture and depth");
         mesh::RoomMesh m = mesh::build_empty_room(depth.shape, depth.camera, tex.image, s.config.mesh_degrees);
         return RuntimeValue::object(T::room_mesh, sized(std::move(m), c));
       }},
      {"GenFurniture",
       [](const Services& s, CallContext& c) {
         auto r = furniture::gen_furniture(c.get<geometry::RoomShape>("shape"), c.text_or("room_type", "bedroom"),
                                           furniture_context(s));
         return RuntimeValue::object(T::furniture, std::move(r.layout));
       }},
      {"EditShape",
       [](const Services& s, CallContext& c) {
         return RuntimeValue::object(T::shape, llm::edit_shape(c.get<geometry::RoomShape>("shape"),
                                                              c.arg("instruction").text(), s.chat, s.prompts,
                                                              s.config.decode));
       }},
      {"EditLayout",
       [](const Services& s, CallContext& c) {
         const auto& prior = c.get<LayoutValue>("layout");
         return RuntimeValue::object(T::layout, render_layout(target_shape(s, c, prior.shape), s.config));
       }},
      {"EditDepth",
       [](const Services& s, CallContext& c) {
         const auto& prior = c.get<DepthValue>("depth");
         return RuntimeValue::object(T::depth, render_depth(target_shape(s, c, prior.shape), s.config));
       }},
      {"EditSemantic",
       [](const Services& s, CallContext& c) {
         const auto& prior = c.get<SemanticValue>("semantic");
         if (c.has("layout")) return RuntimeValue::object(T::semantic, render_semantic(c.get<LayoutValue>("layout")));
         return RuntimeValue::object(T::semantic, render_semantic(render_layout(target_shape(s, c, prior.shape), s.config)));
       }},
      {"EditTexture",
       [](const Services& s, CallContext& c) {
         const auto& prior = c.get<TextureValue>("texture");
         const int maps = c.has("layout") + c.has("depth") + c.has("semantic");
         if (maps != 0 && maps != 3) throw DslError("EditTexture takes all of layout, depth and semantic, or none");
         if (maps == 0 && !c.has("instruction")) throw DslError("EditTexture needs an instruction or new maps");
         texture::TextureSpec spec = prior.spec;
         std::string text = prior.spec.text;
         if (c.has("instruction")) {
           text = c.arg("instruction").text();
           spec = fold(prior.spec, text);
         }
         if (maps == 3)
           return RuntimeValue::object(T::texture, paint(s, c.get<LayoutValue>("layout"), c.get<DepthValue>("depth"),
                                                         c.get<SemanticValue>("semantic"), spec, text, prior.seed));
         // same room: re-render its maps
         PipelineConfig cfg = s.config;
         cfg.grid = prior.image.grid;
         const LayoutValue layout = render_layout(prior.shape, cfg);
         return RuntimeValue::object(T::texture, paint(s, layout, render_depth(prior.shape, cfg),
                                                       render_semantic(layout), spec, text, prior.seed));
       }},
      {"EditEmptyRoom",
       [](const Services& s, CallContext& c) {
         const auto& prior = c.get<mesh::RoomMesh>("room");
         if (!c.has("texture") && !c.has("depth") && !c.has("size"))
           throw DslError("EditEmptyRoom needs a texture, a depth map or a size");
         if (c.has("depth")) {
           const auto& depth = c.get<DepthValue>("depth");
           geometry::TextureImage image = prior.texture;
           if (c.has("texture")) {
             const auto& tex = c.get<TextureValue>("texture");
             require_same_scene(tex.shape, tex.camera, depth.shape, depth.camera, "texture and depth");
             image = tex.image;
           }
           return RuntimeValue::object(
               T::room_mesh, sized(mesh::build_empty_room(depth.shape, depth.camera, image, s.config.mesh_degrees), c));
         }
         mesh::RoomMesh m = prior;
         if (c.has("texture")) m.texture = c.get<TextureValue>("texture").image;
         return RuntimeValue::object(T::room_mesh, sized(std::move(m), c));
       }},
      {"EditFurniture",
       [](const Services& s, CallContext& c) {
         auto r = furniture::edit_furniture(c.get<furniture::FurnitureLayout>("furniture"),
                                            furniture::parse_edit_command(c.arg("instruction").text()),
                                            furniture_context(s));
         return RuntimeValue::object(T::furniture, std::move(r.layout));
       }},
      {"LoadRoom",
       [](const Services& s, CallContext& c) {
         if (!s.load_room) throw DslError("LoadRoom: no session store is attached");
         SessionValue info;
         info.id = c.arg("session").text();
         const dsl::Environment env = s.load_room(info.id, info);
         for (const std::string& n : env.names()) {
           c.exports.emplace_back(n, env.at(n));
           info.names.push_back(n);
         }
         return RuntimeValue::object(T::session, std::move(info));
       }},
      {"Merge",
       [](const Services& s, CallContext& c) {
         return RuntimeValue::object(T::scene, furniture::merge(c.get<mesh::RoomMesh>("room"),
                                                                c.get<furniture::FurnitureLayout>("furniture"),
                                                                s.assets));
       }},
  };
  return hs;
}

}  // namespace

const std::vector<std::string>& module_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& d : definitions()) n.push_back(d.name);
    return n;
  }();
  return names;
}

dsl::ModuleRegistry make_registry(const Services& services) {
  dsl::ModuleRegistry r;
  for (const auto& [name, h] : handlers()) {
    r.register_module(name, signature_of(name), [&services, h = h](CallContext& c) { return h(services, c); });
  }
  return r;
}

dsl::ModuleRegistry signature_registry() {
  dsl::ModuleRegistry r;
  for (const auto& d : definitions()) {
    r.register_module(d.name, d.signature, [name = std::string(d.name)](CallContext&) -> RuntimeValue {
      throw DslError(name + " has no handler in the signature registry");
    });
  }
  return r;
}

}  // namespace proom::pipeline
