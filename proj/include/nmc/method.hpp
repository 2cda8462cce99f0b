#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "nmc/error.hpp"

namespace nmc {

enum class Method : std::uint8_t {
  m1_symmetric = 1,  // truncated symmetric part + raw upper triangle
  m2_skew = 2,       // truncated skew part + raw lower triangle
  m3_joint = 3,      // truncated symmetric and skew parts
  m4_svd = 4,        // truncated SVD
};

inline Method method_from_int(int v) {
  if (v < 1 || v > 4) throw ArgumentError("method must be 1..4");
  return static_cast<Method>(v);
}

inline const char* method_name(Method m) {
  switch (m) {
    case Method::m1_symmetric: return "method1";
    case Method::m2_skew: return "method2";
    case Method::m3_joint: return "method3";
    case Method::m4_svd: return "method4";
  }
  throw ArgumentError("unknown method");
}

// Stored scalar count per method for an n x n block at rank k. These are
// the denominators of the published CR formulas: spectra cost k scalars per
// term plus k n-vectors; M1/M2 add their raw pixel triangle; M4 stores k
// full (sigma, u, v) triples.
inline std::size_t element_count(Method m, std::size_t n, std::size_t k) {
  if (k < 1 || k > n) throw ArgumentError("element_count: k out of range");
  switch (m) {
    case Method::m1_symmetric: return k * (n + 1) + n * (n - 1) / 2;
    case Method::m2_skew: return k * (n + 1) + n * (n + 1) / 2;
    case Method::m3_joint: return 2 * k * (n + 1);
    case Method::m4_svd: return k * (2 * n + 1);
  }
  throw ArgumentError("unknown method");
}

}  // namespace nmc
