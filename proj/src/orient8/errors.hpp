#pragma once

#include <stdexcept>
#include <string>

namespace orient8 {

// Error taxonomy shared by the whole library. The C API and the CLI map
// these onto stable status / exit codes, so new failure kinds should reuse
// one of the existing classes where possible.

struct ArgumentError : std::runtime_error {
  explicit ArgumentError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed file contents (bad magic, truncation, nonsense dims).
struct FormatError : std::runtime_error {
  explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor / image dimensions incompatible with what a consumer expects.
struct ShapeError : std::runtime_error {
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Training produced a non-finite loss, gradient or parameter.
struct DivergedError : std::runtime_error {
  explicit DivergedError(const std::string& msg) : std::runtime_error(msg) {}
};

struct InternalError : std::logic_error {
  explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

}  // namespace orient8
