#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "proom/dsl/runtime.hpp"
#include "proom/furniture/scene.hpp"
#include "proom/geometry/types.hpp"
#include "proom/mesh/room_mesh.hpp"
#include "proom/texture/spec.hpp"

namespace proom::pipeline {

// Payloads of the runtime values. Panorama maps remember the shape and camera
// they were rendered from so downstream modules can rebuild geometry.

struct LayoutValue {
  geometry::RoomShape shape;
  geometry::CameraPose camera;
  geometry::LayoutMap map;
};

struct DepthValue {
  geometry::RoomShape shape;
  geometry::CameraPose camera;
  geometry::DepthMap map;
};

struct SemanticValue {
  geometry::RoomShape shape;
  geometry::CameraPose camera;
  geometry::SemanticMap map;
};

struct TextureValue {
  geometry::RoomShape shape;
  geometry::CameraPose camera;
  geometry::TextureImage image;
  texture::TextureSpec spec;
  std::uint64_t seed = 0;
};

struct SessionValue {
  std::string id;
  int step = 0;                    // last committed step that was loaded
  std::vector<std::string> names;  // bindings brought in
};

// Typed accessors; they throw dsl::DslError on a payload mismatch.
const geometry::RoomShape& as_shape(const dsl::RuntimeValue& v);
const LayoutValue& as_layout(const dsl::RuntimeValue& v);
const DepthValue& as_depth(const dsl::RuntimeValue& v);
const SemanticValue& as_semantic(const dsl::RuntimeValue& v);
const TextureValue& as_texture(const dsl::RuntimeValue& v);
const mesh::RoomMesh& as_mesh(const dsl::RuntimeValue& v);
const furniture::FurnitureLayout& as_furniture(const dsl::RuntimeValue& v);
const furniture::Scene& as_scene(const dsl::RuntimeValue& v);
const SessionValue& as_session(const dsl::RuntimeValue& v);

}  // namespace proom::pipeline
