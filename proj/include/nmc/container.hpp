#pragma once

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "nmc/codec.hpp"
#include "nmc/crc32.hpp"
#include "nmc/error.hpp"
#include "nmc/method.hpp"

namespace nmc {

/// Fixed-size file header. Magic "NMC1" precedes these fields on the wire.
struct ContainerHeader {
  std::uint8_t version = 1;
  Method method = Method::m1_symmetric;
  std::uint8_t scalar_width = 4;  // bytes per stored scalar: 4 or 8
  bool blocked = false;
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint32_t block_size = 0;  // 0 = single whole-image block
  std::uint32_t k = 0;

  std::size_t order() const { return block_size ? block_size : width; }
};

inline constexpr std::size_t container_header_bytes = 24;
inline constexpr char container_magic[4] = {'N', 'M', 'C', '1'};

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 24));
}

inline std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 | std::uint32_t(p[2]) << 16 |
         std::uint32_t(p[3]) << 24;
}

inline void put_scalar(std::vector<std::uint8_t>& out, double v, std::uint8_t width) {
  if (width == 4) {
    const float f = float(v);
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(out, bits);
  } else {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u32(out, std::uint32_t(bits));
    put_u32(out, std::uint32_t(bits >> 32));
  }
}

inline double get_scalar(const std::uint8_t* p, std::uint8_t width) {
  if (width == 4) {
    const std::uint32_t bits = get_u32(p);
    float f;
    std::memcpy(&f, &bits, 4);
    return double(f);
  }
  const std::uint64_t bits = std::uint64_t(get_u32(p)) | std::uint64_t(get_u32(p + 4)) << 32;
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

/// Number of stored scalars for one block. Skew sections always carry whole
/// pairs, so odd k rounds up to (k+1)(n+1) there; everything else matches
/// element_count exactly.
inline std::size_t block_scalar_count(Method m, std::size_t n, std::size_t k) {
  const std::size_t pair_terms = 2 * ((k + 1) / 2);
  switch (m) {
    case Method::m1_symmetric: return k * (n + 1);
    case Method::m2_skew: return pair_terms * (n + 1);
    case Method::m3_joint: return k * (n + 1) + pair_terms * (n + 1);
    case Method::m4_svd: return k * (2 * n + 1);
  }
  throw ArgumentError("block_scalar_count: unknown method");
}

inline std::size_t block_triangle_bytes(Method m, std::size_t n) {
  if (m == Method::m1_symmetric) return n * (n - 1) / 2;
  if (m == Method::m2_skew) return n * (n + 1) / 2;
  return 0;
}

inline std::size_t block_payload_bytes(Method m, std::size_t n, std::size_t k,
                                       std::uint8_t width) {
  return block_scalar_count(m, n, k) * width + block_triangle_bytes(m, n);
}

}  // namespace detail

/// Parses and validates the 24-byte header; never touches the payload.
inline ContainerHeader inspect(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < container_header_bytes)
    throw TruncatedStreamError("container header truncated", bytes.size());
  if (std::memcmp(bytes.data(), container_magic, 4) != 0)
    throw FormatError("bad container magic", 0);
  ContainerHeader h;
  h.version = bytes[4];
  if (h.version != 1) throw FormatError("unsupported container version", 4);
  if (bytes[5] < 1 || bytes[5] > 4) throw FormatError("unknown method byte", 5);
  h.method = method_from_int(bytes[5]);
  h.scalar_width = bytes[6];
  if (h.scalar_width != 4 && h.scalar_width != 8)
    throw FormatError("unsupported scalar width", 6);
  const std::uint8_t flags = bytes[7];
  if (flags & ~std::uint8_t(1)) throw FormatError("unknown flag bits", 7);
  h.blocked = flags & 1u;
  h.width = detail::get_u32(bytes.data() + 8);
  h.height = detail::get_u32(bytes.data() + 12);
  h.block_size = detail::get_u32(bytes.data() + 16);
  h.k = detail::get_u32(bytes.data() + 20);
  if (h.width == 0 || h.height == 0) throw FormatError("zero image dimension", 8);
  if (h.blocked != (h.block_size > 0))
    throw FormatError("blocked flag disagrees with block size", 16);
  if (h.block_size == 1) throw FormatError("block size 1 is degenerate", 16);
  if (!h.blocked && h.width != h.height)
    throw FormatError("whole-image container must be square", 8);
  if (h.k == 0) throw FormatError("k must be at least 1", 20);
  if (h.k > h.order()) throw FormatError("k exceeds the block order", 20);
  return h;
}

/// Header, then blocks row-major (sym values, sym vectors, skew weights,
/// skew vectors, svd triples, triangle bytes, per method), then CRC-32 over
/// everything after the magic.
inline std::vector<std::uint8_t> serialize(const BlockGrid& grid,
                                           std::uint8_t scalar_width = 4) {
  if (scalar_width != 4 && scalar_width != 8)
    throw ArgumentError("serialize: scalar width must be 4 or 8");
  const TilePlan plan = plan_tiles(grid.width, grid.height, grid.block_size);
  if (grid.blocks.size() != plan.cols * plan.rows)
    throw ArgumentError("serialize: block count does not match the grid geometry");
  const std::size_t n = plan.block;

  std::vector<std::uint8_t> out;
  out.reserve(container_header_bytes +
              grid.blocks.size() *
                  detail::block_payload_bytes(grid.method, n, grid.k, scalar_width) +
              4);
  out.insert(out.end(), container_magic, container_magic + 4);
  out.push_back(1);
  out.push_back(std::uint8_t(grid.method));
  out.push_back(scalar_width);
  out.push_back(grid.block_size > 0 ? 1 : 0);
  detail::put_u32(out, std::uint32_t(grid.width));
  detail::put_u32(out, std::uint32_t(grid.height));
  detail::put_u32(out, std::uint32_t(grid.block_size));
  detail::put_u32(out, std::uint32_t(grid.k));

  for (const EncodedBlock& e : grid.blocks) {
    if (e.n != n || e.k != grid.k || e.method != grid.method)
      throw ArgumentError("serialize: block disagrees with the grid");
    detail::check_block(e, e.method);
    const bool has_sym = !e.sym.values.empty();
    const bool has_skew = !e.skew.pairs.empty();
    const bool has_svd = !e.svd.sigma.empty();
    if (has_sym) {
      for (double v : e.sym.values) detail::put_scalar(out, v, scalar_width);
      for (std::size_t t = 0; t < e.k; ++t)
        for (std::size_t j = 0; j < n; ++j)
          detail::put_scalar(out, e.sym.vectors(t, j), scalar_width);
    }
    if (has_skew) {
      for (const SkewPair& pr : e.skew.pairs) {
        detail::put_scalar(out, pr.mu, scalar_width);
        detail::put_scalar(out, pr.mu, scalar_width);
      }
      for (const SkewPair& pr : e.skew.pairs) {
        for (double v : pr.p) detail::put_scalar(out, v, scalar_width);
        for (double v : pr.q) detail::put_scalar(out, v, scalar_width);
      }
    }
    if (has_svd) {
      for (std::size_t t = 0; t < e.k; ++t) {
        detail::put_scalar(out, e.svd.sigma[t], scalar_width);
        for (std::size_t j = 0; j < n; ++j)
          detail::put_scalar(out, e.svd.u(t, j), scalar_width);
        for (std::size_t j = 0; j < n; ++j)
          detail::put_scalar(out, e.svd.v(t, j), scalar_width);
      }
    }
    out.insert(out.end(), e.triangle.begin(), e.triangle.end());
  }

  detail::put_u32(out, crc32(out.data() + 4, out.size() - 4));
  return out;
}

inline BlockGrid deserialize(const std::vector<std::uint8_t>& bytes) {
  const ContainerHeader h = inspect(bytes);
  const TilePlan plan = plan_tiles(h.width, h.height, h.block_size);
  const std::size_t n = plan.block;
  const std::size_t count = plan.cols * plan.rows;
  const std::size_t per_block =
      detail::block_payload_bytes(h.method, n, h.k, h.scalar_width);
  const std::size_t expected = container_header_bytes + count * per_block + 4;
  if (bytes.size() < expected)
    throw TruncatedStreamError("container payload truncated", bytes.size());
  if (bytes.size() > expected)
    throw FormatError("trailing bytes after container", expected);

  const std::uint32_t stored = detail::get_u32(bytes.data() + bytes.size() - 4);
  const std::uint32_t actual = crc32(bytes.data() + 4, bytes.size() - 8);
  if (stored != actual)
    throw CrcError("container checksum mismatch", bytes.size() - 4);

  BlockGrid grid;
  grid.width = h.width;
  grid.height = h.height;
  grid.block_size = h.block_size;
  grid.method = h.method;
  grid.k = h.k;
  grid.blocks.resize(count);

  const std::uint8_t w = h.scalar_width;
  std::size_t pos = container_header_bytes;
  auto scalar = [&] {
    const double v = detail::get_scalar(bytes.data() + pos, w);
    pos += w;
    return v;
  };
  for (EncodedBlock& e : grid.blocks) {
    e.method = h.method;
    e.n = n;
    e.k = h.k;
    const bool wants_sym = h.method == Method::m1_symmetric || h.method == Method::m3_joint;
    const bool wants_skew = h.method == Method::m2_skew || h.method == Method::m3_joint;
    if (wants_sym) {
      e.sym.order = n;
      e.sym.values.resize(h.k);
      for (double& v : e.sym.values) v = scalar();
      e.sym.vectors = Matrix(h.k, n);
      for (std::size_t t = 0; t < h.k; ++t)
        for (std::size_t j = 0; j < n; ++j) e.sym.vectors(t, j) = scalar();
    }
    if (wants_skew) {
      e.skew.order = n;
      e.skew.pairs.resize((h.k + 1) / 2);
      for (SkewPair& pr : e.skew.pairs) {
        const std::size_t first_at = pos;
        pr.mu = scalar();
        if (std::memcmp(bytes.data() + first_at, bytes.data() + pos, w) != 0)
          throw FormatError("skew pair weights disagree", pos);
        pos += w;
      }
      for (SkewPair& pr : e.skew.pairs) {
        pr.p.resize(n);
        pr.q.resize(n);
        for (double& v : pr.p) v = scalar();
        for (double& v : pr.q) v = scalar();
      }
    }
    if (h.method == Method::m4_svd) {
      e.svd.order = n;
      e.svd.sigma.resize(h.k);
      e.svd.u = Matrix(h.k, n);
      e.svd.v = Matrix(h.k, n);
      for (std::size_t t = 0; t < h.k; ++t) {
        e.svd.sigma[t] = scalar();
        for (std::size_t j = 0; j < n; ++j) e.svd.u(t, j) = scalar();
        for (std::size_t j = 0; j < n; ++j) e.svd.v(t, j) = scalar();
      }
    }
    const std::size_t tri = detail::block_triangle_bytes(h.method, n);
    e.triangle.assign(bytes.begin() + pos, bytes.begin() + pos + tri);
    pos += tri;
  }
  return grid;
}

}  // namespace nmc
