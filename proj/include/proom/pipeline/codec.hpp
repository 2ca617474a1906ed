#pragma once

#include <map>
#include <string>
#include <vector>

#include "proom/dsl/runtime.hpp"
#include "proom/pipeline/values.hpp"

namespace proom::pipeline {

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One file of an encoded value. `role` is unique within the value.
struct ArtifactFile {
  std::string role;
  std::string media_type;
  std::string extension;  // without the dot
  std::string bytes;
};

/// Roles per type (the first one is the primary file):
///   Text: text             Number, NumberList: json      RoomShape: shape
///   LayoutMap: png, meta   DepthMap: exact, png, meta    SemanticMap: png, meta
///   TextureImage: png, spec, meta
///   RoomMesh: mesh, obj, mtl, texture
///   FurnitureLayout: css   Scene: scene, mesh            Session: json
/// Decoding reads only the lossless roles, so decode(encode(v)) == v.
std::vector<ArtifactFile> encode_value(const dsl::RuntimeValue& value);
dsl::RuntimeValue decode_value(dsl::SemType type, const std::map<std::string, std::string>& files);

/// Roles decode_value needs for `type`.
std::vector<std::string> required_roles(dsl::SemType type);

// Individual codecs.
std::string texture_spec_json(const texture::TextureSpec& spec);
texture::TextureSpec parse_texture_spec_json(const std::string& text);

/// "PRMESH1", then uint32 LE counts and float64/int32 LE arrays: vertices,
/// uvs, triangles, tags (kind, wall), material, texture grid and RGB bytes.
std::string encode_mesh_binary(const mesh::RoomMesh& mesh);
mesh::RoomMesh decode_mesh_binary(const std::string& bytes);

}  // namespace proom::pipeline
