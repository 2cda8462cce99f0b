#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nmc {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes are incompatible (non-square input, size mismatch).
class DimensionError : public Error {
public:
  using Error::Error;
};

/// A parameter is outside its valid range (k, block size, ...).
class ArgumentError : public Error {
public:
  using Error::Error;
};

/// Input violates a structural precondition (e.g. not symmetric).
class ContractError : public Error {
public:
  using Error::Error;
};

/// An iterative solver hit its iteration cap.
class ConvergenceError : public Error {
public:
  ConvergenceError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}

  /// Remaining off-diagonal (or off-orthogonality) residual at the cap.
  double residual() const { return residual_; }

private:
  double residual_;
};

/// File or stream I/O failed (open, read, write).
class IoError : public Error {
public:
  using Error::Error;
};

/// Malformed byte stream. Carries the offset of the offending byte.
class FormatError : public Error {
public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

private:
  std::size_t offset_;
};

/// Stream ended before the expected payload was complete.
class TruncatedStreamError : public FormatError {
public:
  using FormatError::FormatError;
};

/// Stored checksum does not match the payload.
class CrcError : public FormatError {
public:
  using FormatError::FormatError;
};

}  // namespace nmc
