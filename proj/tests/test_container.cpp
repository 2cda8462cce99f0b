#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "nmc/container.hpp"
#include "nmc/crc32.hpp"
#include "nmc/error.hpp"
#include "test_util.hpp"

using nmc::BlockGrid;
using nmc::EncodedBlock;
using nmc::Matrix;

namespace {

bool same_matrix(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      if (a(i, j) != b(i, j)) return false;
  return true;
}

bool same_grid(const BlockGrid& a, const BlockGrid& b) {
  if (a.width != b.width || a.height != b.height || a.block_size != b.block_size ||
      a.method != b.method || a.k != b.k || a.blocks.size() != b.blocks.size())
    return false;
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    const EncodedBlock& x = a.blocks[i];
    const EncodedBlock& y = b.blocks[i];
    if (x.n != y.n || x.k != y.k || x.method != y.method) return false;
    if (x.sym.values != y.sym.values || !same_matrix(x.sym.vectors, y.sym.vectors))
      return false;
    if (x.skew.pairs.size() != y.skew.pairs.size()) return false;
    for (std::size_t p = 0; p < x.skew.pairs.size(); ++p)
      if (x.skew.pairs[p].mu != y.skew.pairs[p].mu ||
          x.skew.pairs[p].p != y.skew.pairs[p].p || x.skew.pairs[p].q != y.skew.pairs[p].q)
        return false;
    if (x.svd.sigma != y.svd.sigma || !same_matrix(x.svd.u, y.svd.u) ||
        !same_matrix(x.svd.v, y.svd.v))
      return false;
    if (x.triangle != y.triangle) return false;
  }
  return true;
}

void patch_crc(std::vector<std::uint8_t>& bytes) {
  const std::uint32_t c = nmc::crc32(bytes.data() + 4, bytes.size() - 8);
  bytes[bytes.size() - 4] = std::uint8_t(c);
  bytes[bytes.size() - 3] = std::uint8_t(c >> 8);
  bytes[bytes.size() - 2] = std::uint8_t(c >> 16);
  bytes[bytes.size() - 1] = std::uint8_t(c >> 24);
}

// Shape-valid block with synthetic contents; avoids running the solvers
// for size-only checks.
EncodedBlock synthetic_block(nmc::Method m, std::size_t n, std::size_t k) {
  EncodedBlock e;
  e.method = m;
  e.n = n;
  e.k = k;
  auto fill = [](double base, std::size_t t, std::size_t j) {
    return base + 0.001 * double(t) - 0.0005 * double(j);
  };
  if (m == nmc::Method::m1_symmetric || m == nmc::Method::m3_joint) {
    e.sym.order = n;
    e.sym.values.resize(k);
    e.sym.vectors = Matrix(k, n);
    for (std::size_t t = 0; t < k; ++t) {
      e.sym.values[t] = 100.0 - double(t);
      for (std::size_t j = 0; j < n; ++j) e.sym.vectors(t, j) = fill(0.25, t, j);
    }
  }
  if (m == nmc::Method::m2_skew || m == nmc::Method::m3_joint) {
    e.skew.order = n;
    e.skew.pairs.resize((k + 1) / 2);
    for (std::size_t p = 0; p < e.skew.pairs.size(); ++p) {
      e.skew.pairs[p].mu = 50.0 - double(p);
      e.skew.pairs[p].p.resize(n);
      e.skew.pairs[p].q.resize(n);
      for (std::size_t j = 0; j < n; ++j) {
        e.skew.pairs[p].p[j] = fill(0.5, p, j);
        e.skew.pairs[p].q[j] = fill(-0.5, p, j);
      }
    }
  }
  if (m == nmc::Method::m4_svd) {
    e.svd.order = n;
    e.svd.sigma.resize(k);
    e.svd.u = Matrix(k, n);
    e.svd.v = Matrix(k, n);
    for (std::size_t t = 0; t < k; ++t) {
      e.svd.sigma[t] = 80.0 - double(t);
      for (std::size_t j = 0; j < n; ++j) {
        e.svd.u(t, j) = fill(0.125, t, j);
        e.svd.v(t, j) = fill(-0.125, t, j);
      }
    }
  }
  if (m == nmc::Method::m1_symmetric)
    e.triangle.assign(n * (n - 1) / 2, std::uint8_t(7));
  if (m == nmc::Method::m2_skew) e.triangle.assign(n * (n + 1) / 2, std::uint8_t(9));
  return e;
}

BlockGrid synthetic_grid(nmc::Method m, std::size_t n, std::size_t k) {
  BlockGrid g;
  g.width = n;
  g.height = n;
  g.block_size = 0;
  g.method = m;
  g.k = k;
  g.blocks.push_back(synthetic_block(m, n, k));
  return g;
}

}  // namespace

TEST_CASE("crc32 matches the published check value", "[container]") {
  const char* s = "123456789";
  CHECK(nmc::crc32(reinterpret_cast<const std::uint8_t*>(s), 9) == 0xCBF43926u);
  CHECK(nmc::crc32(nullptr, 0) == 0x00000000u);
}

TEST_CASE("f64 containers round-trip grids exactly", "[container]") {
  const nmc::Image img = testutil::test_image(13, 7, 51u);
  for (nmc::Method m : {nmc::Method::m1_symmetric, nmc::Method::m2_skew,
                        nmc::Method::m3_joint, nmc::Method::m4_svd}) {
    const BlockGrid grid = nmc::compress_image(img, m, 5, 8);
    const std::vector<std::uint8_t> bytes = nmc::serialize(grid, 8);
    CHECK(same_grid(nmc::deserialize(bytes), grid));
    CHECK(nmc::serialize(grid, 8) == bytes);  // deterministic
  }
}

TEST_CASE("f32 containers are bit-stable after one narrowing", "[container]") {
  const nmc::Image img = testutil::test_image(16, 16, 52u);
  const BlockGrid grid = nmc::compress_image(img, nmc::Method::m3_joint, 5, 8);
  const std::vector<std::uint8_t> bytes = nmc::serialize(grid, 4);
  const BlockGrid back = nmc::deserialize(bytes);
  CHECK_FALSE(same_grid(back, grid));  // narrowing happened
  for (std::size_t i = 0; i < grid.blocks.size(); ++i)
    for (std::size_t t = 0; t < grid.k; ++t)
      CHECK(back.blocks[i].sym.values[t] ==
            Catch::Approx(grid.blocks[i].sym.values[t]).epsilon(1e-6));
  CHECK(nmc::serialize(back, 4) == bytes);
  CHECK(same_grid(nmc::deserialize(nmc::serialize(back, 4)), back));
}

TEST_CASE("whole-image odd-rank grids round-trip", "[container]") {
  const nmc::Image img = testutil::test_image(9, 9, 53u);
  for (std::size_t k : {3u, 9u}) {
    const BlockGrid grid = nmc::compress_image(img, nmc::Method::m3_joint, k, 0);
    CHECK(same_grid(nmc::deserialize(nmc::serialize(grid, 8)), grid));
  }
}

TEST_CASE("byte layout matches the storage formulas", "[container]") {
  // M3 whole image n=512, k=10, f32: 2*10*513 scalars = 41040 payload bytes.
  const BlockGrid big = synthetic_grid(nmc::Method::m3_joint, 512, 10);
  CHECK(nmc::serialize(big, 4).size() == 24 + 41040 + 4);

  // M1 n=4, k=1: 1+4 scalars plus 6 triangle bytes.
  const BlockGrid small = synthetic_grid(nmc::Method::m1_symmetric, 4, 1);
  CHECK(nmc::serialize(small, 8).size() == 24 + 5 * 8 + 6 + 4);
  CHECK(nmc::serialize(small, 4).size() == 24 + 5 * 4 + 6 + 4);
}

TEST_CASE("payload scalar counts cross-check element_count", "[container]") {
  using nmc::detail::block_scalar_count;
  using nmc::detail::block_triangle_bytes;
  for (nmc::Method m : {nmc::Method::m1_symmetric, nmc::Method::m2_skew,
                        nmc::Method::m3_joint, nmc::Method::m4_svd})
    for (std::size_t n : {8u, 17u, 512u})
      for (std::size_t k : {1u, 2u, 7u, 8u}) {
        const std::size_t total = block_scalar_count(m, n, k) + block_triangle_bytes(m, n);
        const bool skew = m == nmc::Method::m2_skew || m == nmc::Method::m3_joint;
        const std::size_t slack = (skew && k % 2 == 1) ? n + 1 : 0;
        CHECK(total == nmc::element_count(m, n, k) + slack);
      }
}

TEST_CASE("single corrupted payload byte raises a checksum error", "[container]") {
  const BlockGrid grid = synthetic_grid(nmc::Method::m4_svd, 8, 3);
  std::vector<std::uint8_t> bytes = nmc::serialize(grid, 8);
  bytes[40] ^= 0x10;
  CHECK_THROWS_AS(nmc::deserialize(bytes), nmc::CrcError);
}

TEST_CASE("truncation is reported before checksum problems", "[container]") {
  const BlockGrid grid = synthetic_grid(nmc::Method::m3_joint, 8, 2);
  std::vector<std::uint8_t> bytes = nmc::serialize(grid, 8);
  std::vector<std::uint8_t> cut(bytes.begin(), bytes.end() - 9);
  CHECK_THROWS_AS(nmc::deserialize(cut), nmc::TruncatedStreamError);
  CHECK_THROWS_AS(nmc::deserialize({bytes.begin(), bytes.begin() + 3}),
                  nmc::TruncatedStreamError);
  std::vector<std::uint8_t> padded = bytes;
  padded.push_back(0);
  CHECK_THROWS_AS(nmc::deserialize(padded), nmc::FormatError);
}

TEST_CASE("header violations carry their byte offsets", "[container]") {
  const BlockGrid grid = synthetic_grid(nmc::Method::m1_symmetric, 6, 2);
  const std::vector<std::uint8_t> good = nmc::serialize(grid, 8);

  auto expect_offset = [&](std::vector<std::uint8_t> bytes, std::size_t at,
                           std::uint8_t value, std::size_t offset) {
    bytes[at] = value;
    patch_crc(bytes);
    try {
      nmc::deserialize(bytes);
      FAIL("expected a format error");
    } catch (const nmc::FormatError& e) {
      CHECK(e.offset() == offset);
    }
  };
  expect_offset(good, 0, 'X', 0);    // magic
  expect_offset(good, 4, 2, 4);      // version
  expect_offset(good, 5, 9, 5);      // method
  expect_offset(good, 6, 5, 6);      // scalar width
  expect_offset(good, 7, 2, 7);      // flag bits
  expect_offset(good, 20, 0, 20);    // k = 0
  expect_offset(good, 20, 200, 20);  // k > n
}

TEST_CASE("disagreeing duplicate skew weights are a format error", "[container]") {
  const BlockGrid grid = synthetic_grid(nmc::Method::m2_skew, 8, 4);
  std::vector<std::uint8_t> bytes = nmc::serialize(grid, 8);
  // First weight slot begins at 24; its duplicate at 32.
  bytes[32 + 2] ^= 0x01;
  patch_crc(bytes);
  try {
    nmc::deserialize(bytes);
    FAIL("expected a format error");
  } catch (const nmc::FormatError& e) {
    CHECK(std::string(e.what()).find("weights disagree") != std::string::npos);
  }
}

TEST_CASE("inspect reads the header and nothing else", "[container]") {
  const nmc::Image img = testutil::test_image(13, 7, 54u);
  const BlockGrid grid = nmc::compress_image(img, nmc::Method::m2_skew, 4, 8);
  std::vector<std::uint8_t> bytes = nmc::serialize(grid, 4);
  const nmc::ContainerHeader h = nmc::inspect(bytes);
  CHECK(h.version == 1);
  CHECK(h.method == nmc::Method::m2_skew);
  CHECK(h.scalar_width == 4);
  CHECK(h.blocked);
  CHECK(h.width == 13);
  CHECK(h.height == 7);
  CHECK(h.block_size == 8);
  CHECK(h.k == 4);
  CHECK(h.order() == 8);

  // Mangled payload and checksum do not bother the header path.
  for (std::size_t i = 24; i < bytes.size(); ++i) bytes[i] = 0xAB;
  CHECK(nmc::inspect(bytes).k == 4);
  CHECK_THROWS_AS(nmc::inspect({bytes.begin(), bytes.begin() + 3}),
                  nmc::TruncatedStreamError);
}

TEST_CASE("decoding a deserialized grid equals decoding the original", "[container]") {
  const nmc::Image img = testutil::test_image(16, 16, 55u);
  for (nmc::Method m : {nmc::Method::m1_symmetric, nmc::Method::m2_skew,
                        nmc::Method::m3_joint, nmc::Method::m4_svd}) {
    const BlockGrid grid = nmc::compress_image(img, m, 6, 0);
    const nmc::Image direct = nmc::decompress_grid(grid);
    CHECK(nmc::decompress_grid(nmc::deserialize(nmc::serialize(grid, 8))) == direct);
  }
}
