#include "proom/texture/backend.hpp"

#include <httplib.h>

#include <cmath>
#include <cstdlib>

#include "proom/image/maps.hpp"
#include "proom/texture/procedural.hpp"

namespace proom::texture {

double wrap_continuity_error(const geometry::TextureImage& image) {
  const int w = image.width();
  const int h = image.height();
  if (w < 2 || h < 1) return 0.0;
  double sum = 0;
  for (int r = 0; r < h; ++r) {
    const auto& a = image.at(r, w - 1);
    const auto& b = image.at(r, 0);
    sum += std::abs(int(a.r) - int(b.r)) + std::abs(int(a.g) - int(b.g)) + std::abs(int(a.b) - int(b.b));
  }
  return sum / (3.0 * h);
}

const char* error_kind_name(TextureError::Kind kind) {
  switch (kind) {
    case TextureError::Kind::network: return "network";
    case TextureError::Kind::timeout: return "timeout";
    case TextureError::Kind::malformed: return "malformed-response";
    case TextureError::Kind::dimension: return "dimension-mismatch";
    case TextureError::Kind::wrap: return "wrap-continuity";
    default: return "invalid-input";
  }
}

void validate_texture(const geometry::TextureImage& image, const geometry::PanoramaGrid& grid,
                      double wrap_threshold) {
  if (image.grid != grid)
    throw TextureError(TextureError::Kind::dimension,
                       "texture is " + std::to_string(image.width()) + "x" + std::to_string(image.height()) +
                           ", maps are " + std::to_string(grid.width) + "x" + std::to_string(grid.height));
  const double err = wrap_continuity_error(image);
  if (err > wrap_threshold)
    throw TextureError(TextureError::Kind::wrap,
                       "seam discontinuity " + std::to_string(err) + " exceeds " + std::to_string(wrap_threshold));
}

namespace {

void check_inputs(const TextureRequest& req) {
  if (req.depth.grid != req.semantic.grid || req.layout.grid != req.semantic.grid)
    throw TextureError(TextureError::Kind::input, "layout, depth and semantic maps must share one grid");
}

}  // namespace

geometry::TextureImage ProceduralBackend::generate(const TextureRequest& req) const {
  check_inputs(req);
  return gen_texture_procedural(req.semantic, req.depth, req.spec, req.seed);
}

RemoteBackend::RemoteBackend(std::string endpoint, std::chrono::milliseconds timeout, double wrap_threshold)
    : endpoint_(std::move(endpoint)), timeout_(timeout), wrap_threshold_(wrap_threshold) {}

geometry::TextureImage RemoteBackend::generate(const TextureRequest& req) const {
  check_inputs(req);
  // split "http://host:port/path" into client base and path
  const auto scheme = endpoint_.find("://");
  const auto path_start = endpoint_.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  const std::string base = endpoint_.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint_.substr(path_start);

  httplib::Client client(base);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());

  httplib::MultipartFormDataItems items{
      {"layout", image::encode_layout_png(req.layout), "layout.png", "image/png"},
      {"depth", image::encode_depth_png(req.depth), "depth.png", "image/png"},
      {"semantic", image::encode_semantic_png(req.semantic), "semantic.png", "image/png"},
      {"text", req.text, "", "text/plain; charset=utf-8"},
      {"spec", describe_spec(req.spec), "", "text/plain; charset=utf-8"},
      {"seed", std::to_string(req.seed), "", "text/plain"},
  };
  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(path, items);
  const auto elapsed = std::chrono::steady_clock::now() - start;
  if (!res) {
    const auto err = res.error();
    if (err == httplib::Error::ConnectionTimeout ||
        (err == httplib::Error::Read && elapsed >= timeout_ * 9 / 10))
      throw TextureError(TextureError::Kind::timeout, "texture service did not answer within " +
                                                          std::to_string(timeout_.count()) + " ms");
    throw TextureError(TextureError::Kind::network, "texture service: " + httplib::to_string(err));
  }
  if (res->status != 200)
    throw TextureError(TextureError::Kind::malformed, "texture service returned HTTP " + std::to_string(res->status));
  geometry::TextureImage img;
  try {
    const auto decoded = image::decode_png(res->body);
    if (decoded.channels != 3 || decoded.bit_depth != 8)
      throw TextureError(TextureError::Kind::malformed, "texture service returned a non-RGB8 PNG");
    if (decoded.width != req.semantic.width() || decoded.height != req.semantic.height())
      throw TextureError(TextureError::Kind::dimension,
                         "texture is " + std::to_string(decoded.width) + "x" + std::to_string(decoded.height) +
                             ", maps are " + std::to_string(req.semantic.width()) + "x" +
                             std::to_string(req.semantic.height()));
    img = image::decode_texture_png(res->body);
  } catch (const image::ImageError& e) {
    throw TextureError(TextureError::Kind::malformed, std::string("texture service: ") + e.what());
  }
  validate_texture(img, req.semantic.grid, wrap_threshold_);
  return img;
}

}  // namespace proom::texture
