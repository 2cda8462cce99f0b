#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>

#include "nmc/error.hpp"
#include "nmc/image.hpp"
#include "nmc/matrix.hpp"
#include "nmc/method.hpp"

namespace nmc {

struct MetricsReport {
  double mse = 0.0;
  double psnr_db = 0.0;
  double cr_elements = 0.0;
  double cr_bytes = 0.0;
};

inline double mse(const Image& a, const Image& b) {
  if (a.width != b.width || a.height != b.height)
    throw DimensionError("mse: image dimensions differ");
  if (a.pixels.empty()) throw DimensionError("mse: empty image");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.pixels.size(); ++i) {
    const double d = double(a.pixels[i]) - double(b.pixels[i]);
    sum += d * d;
  }
  return sum / double(a.pixels.size());
}

// Overload for pixel-valued working matrices (already quantized).
inline double mse(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw DimensionError("mse: matrix dimensions differ");
  if (a.rows() == 0 || a.cols() == 0) throw DimensionError("mse: empty matrix");
  double sum = 0.0;
  const std::size_t count = a.rows() * a.cols();
  for (std::size_t i = 0; i < count; ++i) {
    const double d = a.data()[i] - b.data()[i];
    sum += d * d;
  }
  return sum / double(count);
}

inline double psnr_from_mse(double m) {
  if (m == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / m);
}

inline double psnr(const Image& a, const Image& b) { return psnr_from_mse(mse(a, b)); }
inline double psnr(const Matrix& a, const Matrix& b) { return psnr_from_mse(mse(a, b)); }

inline double cr_elements(Method m, std::size_t n, std::size_t k) {
  return double(n * n) / double(element_count(m, n, k));
}

inline double cr_bytes(std::uint64_t original_bytes, std::uint64_t compressed_bytes) {
  if (original_bytes == 0 || compressed_bytes == 0)
    throw ArgumentError("cr_bytes: sizes must be positive");
  return double(original_bytes) / double(compressed_bytes);
}

// Fixed-point rendering used by reports and CSV output; infinities appear
// as "inf" rather than a locale-dependent spelling.
inline std::string format_fixed(double v, int decimals = 4) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << v;
  return os.str();
}

}  // namespace nmc
