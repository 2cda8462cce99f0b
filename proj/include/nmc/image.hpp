#pragma once

#include <cstdint>
#include <vector>

#include "nmc/error.hpp"
#include "nmc/matrix.hpp"

namespace nmc {

/// 8-bit grayscale image, row-major.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;

  Image() = default;
  Image(std::size_t w, std::size_t h, std::uint8_t fill = 0)
      : width(w), height(h), pixels(w * h, fill) {}

  std::uint8_t& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }

  bool operator==(const Image&) const = default;
};

/// Real-valued working copy (height x width, pixel values as doubles).
inline Matrix to_matrix(const Image& img) {
  Matrix m(img.height, img.width);
  for (std::size_t i = 0; i < img.pixels.size(); ++i)
    m.data()[i] = double(img.pixels[i]);
  return m;
}

/// Back to 8-bit pixels. Expects a quantized (pixel-valued) matrix; values
/// are defensively clamped so stray ULPs cannot wrap the cast.
inline Image image_from_matrix(const Matrix& m) {
  Image img(m.cols(), m.rows());
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    double v = m.data()[i];
    if (v < 0.0) v = 0.0;
    if (v > 255.0) v = 255.0;
    img.pixels[i] = static_cast<std::uint8_t>(v + 0.5);
  }
  return img;
}

}  // namespace nmc
