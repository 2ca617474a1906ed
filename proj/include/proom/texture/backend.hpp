#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>

#include "proom/geometry/types.hpp"
#include "proom/texture/spec.hpp"

namespace proom::texture {

/// Mean absolute per-channel difference between column W-1 and column 0,
/// on the 0-255 scale.
double wrap_continuity_error(const geometry::TextureImage& image);

/// Default acceptance threshold for wrap_continuity_error: 2 levels (2/255).
inline constexpr double kWrapThreshold = 2.0;

class TextureError : public std::runtime_error {
 public:
  enum class Kind { network, timeout, malformed, dimension, wrap, input };
  TextureError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

const char* error_kind_name(TextureError::Kind kind);

struct TextureRequest {
  const geometry::LayoutMap& layout;
  const geometry::DepthMap& depth;
  const geometry::SemanticMap& semantic;
  const TextureSpec& spec;  // already folded from the instruction text
  std::string text;         // the instruction as given
  std::uint64_t seed = 0;
};

struct BackendInfo {
  std::string name;
  bool deterministic = true;
  bool needs_network = false;
};

class TextureBackend {
 public:
  virtual ~TextureBackend() = default;
  virtual BackendInfo info() const = 0;
  /// Returns an image on the request's grid or throws TextureError.
  virtual geometry::TextureImage generate(const TextureRequest& request) const = 0;
};

class ProceduralBackend : public TextureBackend {
 public:
  BackendInfo info() const override { return {"procedural", true, false}; }
  geometry::TextureImage generate(const TextureRequest& request) const override;
};

/// HTTP multipart client; see docs/texture-protocol.md.
class RemoteBackend : public TextureBackend {
 public:
  RemoteBackend(std::string endpoint, std::chrono::milliseconds timeout,
                double wrap_threshold = kWrapThreshold);
  BackendInfo info() const override { return {"remote", false, true}; }
  geometry::TextureImage generate(const TextureRequest& request) const override;

 private:
  std::string endpoint_;
  std::chrono::milliseconds timeout_;
  double wrap_threshold_;
};

/// Checks grid agreement and seam continuity of a backend result.
void validate_texture(const geometry::TextureImage& image, const geometry::PanoramaGrid& grid,
                      double wrap_threshold = kWrapThreshold);

}  // namespace proom::texture
