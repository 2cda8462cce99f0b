#pragma once

// PGM (P5 binary / P2 ASCII) and headerless raw 8-bit grayscale I/O.

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "nmc/error.hpp"
#include "nmc/image.hpp"

namespace nmc {

enum class PgmFlavor { binary, ascii };  // P5 / P2

namespace detail {

inline bool pgm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == '\v' || c == '\f';
}

struct PgmCursor {
  const std::vector<std::uint8_t>& bytes;
  std::size_t pos = 0;
  std::size_t token_at = 0;  // start of the most recent number token

  void skip_separators() {
    while (pos < bytes.size()) {
      if (pgm_space(bytes[pos])) {
        ++pos;
      } else if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else {
        break;
      }
    }
  }

  std::size_t read_number(const char* what) {
    skip_separators();
    token_at = pos;
    if (pos >= bytes.size())
      throw TruncatedStreamError(std::string("PGM header ended before ") + what, pos);
    if (bytes[pos] < '0' || bytes[pos] > '9')
      throw FormatError(std::string("expected digit for ") + what, pos);
    std::size_t value = 0;
    while (pos < bytes.size() && bytes[pos] >= '0' && bytes[pos] <= '9') {
      value = value * 10 + std::size_t(bytes[pos] - '0');
      if (value > 0xFFFFFFFFull) throw FormatError(std::string(what) + " is absurdly large", pos);
      ++pos;
    }
    return value;
  }
};

}  // namespace detail

inline Image read_pgm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2) throw TruncatedStreamError("not a PGM stream", 0);
  if (bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '2'))
    throw FormatError("bad PGM magic", 0);
  const bool binary = bytes[1] == '5';

  detail::PgmCursor cur{bytes, 2};
  const std::size_t width = cur.read_number("width");
  const std::size_t height = cur.read_number("height");
  const std::size_t maxval = cur.read_number("maxval");
  if (width == 0 || height == 0) throw FormatError("zero PGM dimension", 2);
  if (maxval == 0 || maxval > 255)
    throw FormatError("PGM maxval outside 1..255", cur.token_at);

  Image img(width, height);
  if (binary) {
    if (cur.pos >= bytes.size() || !detail::pgm_space(bytes[cur.pos]))
      throw FormatError("expected single whitespace after maxval", cur.pos);
    ++cur.pos;  // exactly one separator byte before the raster
    if (bytes.size() - cur.pos < img.pixels.size())
      throw TruncatedStreamError("PGM payload truncated", bytes.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
      img.pixels[i] = bytes[cur.pos + i];
  } else {
    for (std::size_t i = 0; i < img.pixels.size(); ++i) {
      const std::size_t v = cur.read_number("pixel");
      if (v > 255) throw FormatError("pixel value exceeds 255", cur.token_at);
      img.pixels[i] = std::uint8_t(v);
    }
  }
  return img;
}

inline std::vector<std::uint8_t> write_pgm(const Image& img,
                                           PgmFlavor flavor = PgmFlavor::binary) {
  if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height)
    throw ArgumentError("write_pgm: malformed image");
  std::string header = flavor == PgmFlavor::binary ? "P5\n" : "P2\n";
  header += std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  if (flavor == PgmFlavor::binary) {
    out.insert(out.end(), img.pixels.begin(), img.pixels.end());
    return out;
  }
  // ASCII raster, kept within the conventional 70-character line limit.
  std::string line;
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    const std::string tok = std::to_string(img.pixels[i]);
    if (!line.empty() && line.size() + 1 + tok.size() > 70) {
      line += '\n';
      out.insert(out.end(), line.begin(), line.end());
      line.clear();
    }
    if (!line.empty()) line += ' ';
    line += tok;
  }
  if (!line.empty()) {
    line += '\n';
    out.insert(out.end(), line.begin(), line.end());
  }
  return out;
}

inline Image read_raw(const std::vector<std::uint8_t>& bytes, std::size_t width,
                      std::size_t height) {
  if (width == 0 || height == 0) throw ArgumentError("read_raw: dimensions must be positive");
  if (bytes.size() < width * height)
    throw TruncatedStreamError("raw pixel buffer too short", bytes.size());
  if (bytes.size() > width * height)
    throw FormatError("raw pixel buffer longer than width*height", width * height);
  Image img(width, height);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = bytes[i];
  return img;
}

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed for " + path);
  return bytes;
}

inline void write_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot create " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
  if (!out) throw IoError("write failed for " + path);
}

inline Image load_pgm(const std::string& path) { return read_pgm(read_file(path)); }

inline void save_pgm(const std::string& path, const Image& img,
                     PgmFlavor flavor = PgmFlavor::binary) {
  write_file(path, write_pgm(img, flavor));
}

}  // namespace nmc
