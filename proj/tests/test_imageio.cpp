#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "nmc/error.hpp"
#include "nmc/pgm.hpp"
#include "test_util.hpp"

using nmc::Image;

namespace {

std::vector<std::uint8_t> from_string(const std::string& s) {
  return std::vector<std::uint8_t>(s.begin(), s.end());
}

}  // namespace

TEST_CASE("read_pgm parses a minimal P5 stream", "[imageio]") {
  std::vector<std::uint8_t> bytes = from_string("P5\n2 2\n255\n");
  bytes.insert(bytes.end(), {10, 20, 30, 40});
  Image img = nmc::read_pgm(bytes);
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.at(0, 0) == 10);
  CHECK(img.at(1, 0) == 20);
  CHECK(img.at(0, 1) == 30);
  CHECK(img.at(1, 1) == 40);
}

TEST_CASE("P2 with comments and ragged whitespace equals the P5 twin", "[imageio]") {
  std::vector<std::uint8_t> p2 = from_string(
      "P2 # plain flavor\n"
      "# a comment line\n"
      "  3\t2 # width height split oddly\n"
      "255\n"
      " 0 128\n255\n1   2 \t3\n");
  std::vector<std::uint8_t> p5 = from_string("P5\n3 2\n255\n");
  p5.insert(p5.end(), {0, 128, 255, 1, 2, 3});
  CHECK(nmc::read_pgm(p2) == nmc::read_pgm(p5));
}

TEST_CASE("write_pgm emits the canonical header", "[imageio]") {
  Image img(2, 1);
  img.pixels = {7, 9};
  std::vector<std::uint8_t> p5 = nmc::write_pgm(img, nmc::PgmFlavor::binary);
  const std::string head(p5.begin(), p5.begin() + 9);
  CHECK(head == "P5\n2 1\n25");  // "P5\n2 1\n255\n" + payload
  CHECK(p5.size() == 11 + 2);
  CHECK(p5[11] == 7);
  CHECK(p5[12] == 9);
}

TEST_CASE("P2 output keeps lines at 70 characters or fewer", "[imageio]") {
  Image img = testutil::random_image(64, 3, 80u);
  std::vector<std::uint8_t> p2 = nmc::write_pgm(img, nmc::PgmFlavor::ascii);
  std::size_t len = 0;
  for (std::uint8_t c : p2) {
    if (c == '\n') {
      CHECK(len <= 70);
      len = 0;
    } else {
      ++len;
    }
  }
  CHECK(len == 0);  // ends with a newline
}

TEST_CASE("PGM round-trips are exact for both flavors", "[imageio]") {
  for (std::uint32_t seed : {81u, 82u, 83u}) {
    Image img = testutil::random_image(13, 7, seed);
    CHECK(nmc::read_pgm(nmc::write_pgm(img, nmc::PgmFlavor::binary)) == img);
    CHECK(nmc::read_pgm(nmc::write_pgm(img, nmc::PgmFlavor::ascii)) == img);
  }
}

TEST_CASE("read_pgm rejects malformed streams with offsets", "[imageio]") {
  CHECK_THROWS_AS(nmc::read_pgm(from_string("")), nmc::TruncatedStreamError);
  CHECK_THROWS_AS(nmc::read_pgm(from_string("P6\n1 1\n255\nx")), nmc::FormatError);

  try {
    nmc::read_pgm(from_string("P5\n2 2\n999\n...."));
    FAIL("maxval 999 accepted");
  } catch (const nmc::FormatError& e) {
    CHECK(e.offset() == 7);
    CHECK(std::string(e.what()).find("byte 7") != std::string::npos);
  }

  std::vector<std::uint8_t> short_p5 = from_string("P5\n2 2\n255\n");
  short_p5.insert(short_p5.end(), {1, 2, 3});  // one byte missing
  CHECK_THROWS_AS(nmc::read_pgm(short_p5), nmc::TruncatedStreamError);

  CHECK_THROWS_AS(nmc::read_pgm(from_string("P2\n1 1\n255\n300\n")), nmc::FormatError);
  CHECK_THROWS_AS(nmc::read_pgm(from_string("P5\n0 2\n255\n")), nmc::FormatError);
  CHECK_THROWS_AS(nmc::read_pgm(from_string("P2\n1 1\n255\n")), nmc::TruncatedStreamError);
}

TEST_CASE("maxval below 255 is accepted without rescaling", "[imageio]") {
  std::vector<std::uint8_t> bytes = from_string("P5\n2 1\n15\n");
  bytes.insert(bytes.end(), {3, 15});
  Image img = nmc::read_pgm(bytes);
  CHECK(img.at(0, 0) == 3);
  CHECK(img.at(1, 0) == 15);
}

TEST_CASE("read_raw interprets row-major bytes", "[imageio]") {
  std::vector<std::uint8_t> bytes = {9, 8, 7, 6};
  Image img = nmc::read_raw(bytes, 2, 2);
  CHECK(img.at(0, 0) == 9);
  CHECK(img.at(1, 1) == 6);

  CHECK_THROWS_AS(nmc::read_raw(bytes, 0, 4), nmc::ArgumentError);
  CHECK_THROWS_AS(nmc::read_raw(bytes, 5, 1), nmc::TruncatedStreamError);
  CHECK_THROWS_AS(nmc::read_raw(bytes, 3, 1), nmc::FormatError);

  Image rt = testutil::random_image(6, 5, 84u);
  CHECK(nmc::read_raw(rt.pixels, 6, 5) == rt);
}

TEST_CASE("file round-trip through the filesystem", "[imageio]") {
  Image img = testutil::random_image(10, 4, 85u);
  const std::string path = "io_roundtrip_tmp.pgm";
  nmc::save_pgm(path, img);
  CHECK(nmc::load_pgm(path) == img);
  std::remove(path.c_str());
  CHECK_THROWS_AS(nmc::load_pgm("definitely_missing_dir/x.pgm"), nmc::IoError);
}
