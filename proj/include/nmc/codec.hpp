#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "nmc/error.hpp"
#include "nmc/image.hpp"
#include "nmc/matrix.hpp"
#include "nmc/method.hpp"
#include "nmc/parallel.hpp"
#include "nmc/spectral.hpp"

namespace nmc {

/// One compressed square block. Only the sections demanded by `method`
/// are populated; the rest stay empty.
struct EncodedBlock {
  Method method = Method::m1_symmetric;
  std::size_t n = 0;
  std::size_t k = 0;
  SymSpectrum sym;      // m1_symmetric, m3_joint: k leading terms
  SkewSpectrum skew;    // m2_skew, m3_joint: ceil(k/2) leading pairs
  SvdFactors svd;       // m4_svd: k leading triples
  std::vector<std::uint8_t> triangle;  // m1: upper-strict, m2: lower-inclusive
};

/// Row-major grid of encoded blocks covering a (possibly padded) image.
/// block_size == 0 means a single whole-image block.
struct BlockGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::size_t block_size = 0;
  Method method = Method::m1_symmetric;
  std::size_t k = 0;
  std::vector<EncodedBlock> blocks;
};

/// Resolved tiling geometry for an image and a block-size request.
struct TilePlan {
  std::size_t width = 0;   // original image size
  std::size_t height = 0;
  std::size_t block = 0;   // edge length of every (square) block
  std::size_t cols = 0;
  std::size_t rows = 0;
};

inline TilePlan plan_tiles(std::size_t width, std::size_t height, std::size_t block_size) {
  if (width == 0 || height == 0) throw ArgumentError("plan_tiles: empty image");
  if (block_size == 1) throw ArgumentError("plan_tiles: block size 1 is degenerate");
  if (block_size == 0) {
    if (width != height)
      throw DimensionError("whole-image mode requires a square image");
    return {width, height, width, 1, 1};
  }
  const std::size_t cols = (width + block_size - 1) / block_size;
  const std::size_t rows = (height + block_size - 1) / block_size;
  return {width, height, block_size, cols, rows};
}

/// Splits the image into square pixel blocks, row-major. Edge blocks are
/// padded by replicating the last row/column of the image.
inline std::vector<Matrix> tile(const Image& img, std::size_t block_size) {
  const TilePlan plan = plan_tiles(img.width, img.height, block_size);
  const std::size_t b = plan.block;
  std::vector<Matrix> blocks;
  blocks.reserve(plan.cols * plan.rows);
  for (std::size_t by = 0; by < plan.rows; ++by)
    for (std::size_t bx = 0; bx < plan.cols; ++bx) {
      Matrix m(b, b);
      for (std::size_t y = 0; y < b; ++y) {
        const std::size_t sy = std::min(by * b + y, img.height - 1);
        for (std::size_t x = 0; x < b; ++x) {
          const std::size_t sx = std::min(bx * b + x, img.width - 1);
          m(y, x) = double(img.at(sx, sy));
        }
      }
      blocks.push_back(std::move(m));
    }
  return blocks;
}

/// Reassembles pixel blocks into an image, cropping the padding.
inline Image untile(const TilePlan& plan, const std::vector<Matrix>& blocks) {
  if (blocks.size() != plan.cols * plan.rows)
    throw ArgumentError("untile: block count does not match the plan");
  Image img(plan.width, plan.height);
  for (std::size_t by = 0; by < plan.rows; ++by)
    for (std::size_t bx = 0; bx < plan.cols; ++bx) {
      const Matrix& m = blocks[by * plan.cols + bx];
      if (m.rows() != plan.block || m.cols() != plan.block)
        throw DimensionError("untile: block has the wrong order");
      const std::size_t ylim = std::min(plan.block, plan.height - by * plan.block);
      const std::size_t xlim = std::min(plan.block, plan.width - bx * plan.block);
      for (std::size_t y = 0; y < ylim; ++y)
        for (std::size_t x = 0; x < xlim; ++x) {
          double v = std::clamp(m(y, x), 0.0, 255.0);
          img.at(bx * plan.block + x, by * plan.block + y) =
              std::uint8_t(std::lround(v));
        }
    }
  return img;
}

inline double quantize_scalar(double v) {
  return std::round(std::clamp(v, 0.0, 255.0));
}

/// Clamp to [0,255], then round half away from zero.
inline Matrix quantize(const Matrix& x) {
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) out(i, j) = quantize_scalar(x(i, j));
  return out;
}

namespace detail {

inline void require_k(std::size_t k, std::size_t n, const char* who) {
  if (k < 1 || k > n) throw ArgumentError(std::string(who) + ": k out of range");
}

inline SymSpectrum leading_sym(const SymSpectrum& full, std::size_t k) {
  SymSpectrum out;
  out.order = full.order;
  out.values.assign(full.values.begin(), full.values.begin() + k);
  out.vectors = Matrix(k, full.order);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t j = 0; j < full.order; ++j) out.vectors(t, j) = full.vectors(t, j);
  return out;
}

// Keeps ceil(k/2) pairs so truncate_skew sees exactly k terms. When the
// source runs short (k = n with n odd), the tail is padded with zero pairs.
inline SkewSpectrum leading_skew(const SkewSpectrum& full, std::size_t k) {
  const std::size_t want = (k + 1) / 2;
  SkewSpectrum out;
  out.order = full.order;
  const std::size_t have = std::min(want, full.pairs.size());
  out.pairs.assign(full.pairs.begin(), full.pairs.begin() + have);
  while (out.pairs.size() < want) {
    SkewPair zero;
    zero.mu = 0.0;
    zero.p.assign(full.order, 0.0);
    zero.q.assign(full.order, 0.0);
    out.pairs.push_back(std::move(zero));
  }
  return out;
}

inline SvdFactors leading_svd(const SvdFactors& full, std::size_t k) {
  SvdFactors out;
  out.order = full.order;
  out.sigma.assign(full.sigma.begin(), full.sigma.begin() + k);
  out.u = Matrix(k, full.order);
  out.v = Matrix(k, full.order);
  for (std::size_t t = 0; t < k; ++t)
    for (std::size_t j = 0; j < full.order; ++j) {
      out.u(t, j) = full.u(t, j);
      out.v(t, j) = full.v(t, j);
    }
  return out;
}

inline std::vector<std::uint8_t> upper_strict_pixels(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<std::uint8_t> out;
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      out.push_back(std::uint8_t(std::lround(std::clamp(x(i, j), 0.0, 255.0))));
  return out;
}

inline std::vector<std::uint8_t> lower_inclusive_pixels(const Matrix& x) {
  const std::size_t n = x.rows();
  std::vector<std::uint8_t> out;
  out.reserve(n * (n + 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j)
      out.push_back(std::uint8_t(std::lround(std::clamp(x(i, j), 0.0, 255.0))));
  return out;
}

inline void check_block(const EncodedBlock& e, Method m) {
  const std::size_t n = e.n;
  const std::size_t k = e.k;
  auto bad = [](const char* what) { return FormatError(what, 0); };
  if (e.method != m) throw bad("block method does not match the decoder");
  if (n == 0 || k < 1 || k > n) throw bad("block has an invalid order or rank");
  const bool wants_sym = (m == Method::m1_symmetric || m == Method::m3_joint);
  const bool wants_skew = (m == Method::m2_skew || m == Method::m3_joint);
  const bool wants_svd = (m == Method::m4_svd);
  if (wants_sym) {
    if (e.sym.order != n || e.sym.values.size() != k || e.sym.vectors.rows() != k ||
        e.sym.vectors.cols() != n)
      throw bad("block symmetric section is malformed");
  } else if (!e.sym.values.empty()) {
    throw bad("block carries an unexpected symmetric section");
  }
  if (wants_skew) {
    if (e.skew.order != n || e.skew.pairs.size() != (k + 1) / 2)
      throw bad("block skew section is malformed");
    for (const SkewPair& pr : e.skew.pairs)
      if (pr.p.size() != n || pr.q.size() != n)
        throw bad("block skew section is malformed");
  } else if (!e.skew.pairs.empty()) {
    throw bad("block carries an unexpected skew section");
  }
  if (wants_svd) {
    if (e.svd.order != n || e.svd.sigma.size() != k || e.svd.u.rows() != k ||
        e.svd.u.cols() != n || e.svd.v.rows() != k || e.svd.v.cols() != n)
      throw bad("block singular section is malformed");
  } else if (!e.svd.sigma.empty()) {
    throw bad("block carries an unexpected singular section");
  }
  const std::size_t want_triangle = m == Method::m1_symmetric ? n * (n - 1) / 2
                                    : m == Method::m2_skew    ? n * (n + 1) / 2
                                                              : 0;
  if (e.triangle.size() != want_triangle) throw bad("block triangle has the wrong length");
}

}  // namespace detail

/// Builds an M1 block from a precomputed full symmetric spectrum.
inline EncodedBlock make_block_m1(const Matrix& x, const SymSpectrum& full, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m1");
  EncodedBlock e;
  e.method = Method::m1_symmetric;
  e.n = x.rows();
  e.k = k;
  e.sym = detail::leading_sym(full, k);
  e.triangle = detail::upper_strict_pixels(x);
  return e;
}

inline EncodedBlock make_block_m2(const Matrix& x, const SkewSpectrum& full, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m2");
  EncodedBlock e;
  e.method = Method::m2_skew;
  e.n = x.rows();
  e.k = k;
  e.skew = detail::leading_skew(full, k);
  e.triangle = detail::lower_inclusive_pixels(x);
  return e;
}

inline EncodedBlock make_block_m3(const Matrix& x, const SymSpectrum& sym_full,
                                  const SkewSpectrum& skew_full, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m3");
  EncodedBlock e;
  e.method = Method::m3_joint;
  e.n = x.rows();
  e.k = k;
  e.sym = detail::leading_sym(sym_full, k);
  e.skew = detail::leading_skew(skew_full, k);
  return e;
}

inline EncodedBlock make_block_m4(const Matrix& x, const SvdFactors& full, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m4");
  EncodedBlock e;
  e.method = Method::m4_svd;
  e.n = x.rows();
  e.k = k;
  e.svd = detail::leading_svd(full, k);
  return e;
}

inline EncodedBlock encode_m1(const Matrix& x, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m1");
  return make_block_m1(x, eig_symmetric(symmetric_part(x)), k);
}

inline EncodedBlock encode_m2(const Matrix& x, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m2");
  return make_block_m2(x, eig_skew(skew_symmetric_part(x)), k);
}

inline EncodedBlock encode_m3(const Matrix& x, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m3");
  return make_block_m3(x, eig_symmetric(symmetric_part(x)),
                       eig_skew(skew_symmetric_part(x)), k);
}

inline EncodedBlock encode_m4(const Matrix& x, std::size_t k) {
  detail::require_k(k, x.rows(), "encode_m4");
  return make_block_m4(x, svd(x), k);
}

inline EncodedBlock encode_block(const Matrix& x, Method m, std::size_t k) {
  switch (m) {
    case Method::m1_symmetric: return encode_m1(x, k);
    case Method::m2_skew: return encode_m2(x, k);
    case Method::m3_joint: return encode_m3(x, k);
    case Method::m4_svd: return encode_m4(x, k);
  }
  throw ArgumentError("encode_block: unknown method");
}

/// Upper-strict pixels verbatim, diagonal from the truncated symmetric part,
/// and below the diagonal 2*Bt(i,j) - X(j,i) recovers the asymmetry.
inline Matrix decode_m1(const EncodedBlock& e) {
  detail::check_block(e, Method::m1_symmetric);
  const std::size_t n = e.n;
  const Matrix bt = truncate_sym(e.sym, e.k);
  Matrix out(n, n);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = double(e.triangle[idx++]);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = bt(i, i);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) out(i, j) = 2.0 * bt(i, j) - out(j, i);
  return quantize(out);
}

/// Lower-inclusive pixels verbatim; above the diagonal 2*Ct(i,j) + X(j,i).
inline Matrix decode_m2(const EncodedBlock& e) {
  detail::check_block(e, Method::m2_skew);
  const std::size_t n = e.n;
  const Matrix ct = truncate_skew(e.skew, e.k);
  Matrix out(n, n);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) out(i, j) = double(e.triangle[idx++]);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out(i, j) = 2.0 * ct(i, j) + out(j, i);
  return quantize(out);
}

inline Matrix decode_m3(const EncodedBlock& e) {
  detail::check_block(e, Method::m3_joint);
  Matrix sum = truncate_sym(e.sym, e.k);
  const Matrix ct = truncate_skew(e.skew, e.k);
  for (std::size_t i = 0; i < e.n; ++i)
    for (std::size_t j = 0; j < e.n; ++j) sum(i, j) += ct(i, j);
  return quantize(sum);
}

inline Matrix decode_m4(const EncodedBlock& e) {
  detail::check_block(e, Method::m4_svd);
  return quantize(truncate_svd(e.svd, e.k));
}

inline Matrix decode_block(const EncodedBlock& e) {
  switch (e.method) {
    case Method::m1_symmetric: return decode_m1(e);
    case Method::m2_skew: return decode_m2(e);
    case Method::m3_joint: return decode_m3(e);
    case Method::m4_svd: return decode_m4(e);
  }
  throw FormatError("block has an unknown method", 0);
}

inline BlockGrid compress_image(const Image& img, Method method, std::size_t k,
                                std::size_t block_size) {
  const TilePlan plan = plan_tiles(img.width, img.height, block_size);
  detail::require_k(k, plan.block, "compress_image");
  BlockGrid grid;
  grid.width = img.width;
  grid.height = img.height;
  grid.block_size = block_size;
  grid.method = method;
  grid.k = k;
  const std::vector<Matrix> mats = tile(img, block_size);
  grid.blocks.resize(mats.size());
  parallel_for(mats.size(),
               [&](std::size_t i) { grid.blocks[i] = encode_block(mats[i], method, k); });
  return grid;
}

inline Image decompress_grid(const BlockGrid& grid) {
  const TilePlan plan = plan_tiles(grid.width, grid.height, grid.block_size);
  if (grid.blocks.size() != plan.cols * plan.rows)
    throw FormatError("grid block count does not match its geometry", 0);
  std::vector<Matrix> mats(grid.blocks.size());
  parallel_for(grid.blocks.size(), [&](std::size_t i) {
    if (grid.blocks[i].n != plan.block) throw FormatError("grid block order mismatch", 0);
    mats[i] = decode_block(grid.blocks[i]);
  });
  return untile(plan, mats);
}

}  // namespace nmc
