#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace biask {

/// Error categories surfaced by the library. The numeric values are stable and
/// are mirrored by the C API status codes.
enum class Errc {
  config = 2,
  format = 3,
  index = 4,
  incompatible = 5,
  argument = 6,
  degenerate = 7,
  insufficient_buckets = 8,
  io = 9,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// Malformed or truncated sketch bytes; `offset` is the byte position where
/// decoding stopped.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& message)
      : Error(Errc::format,
              message + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

[[noreturn]] inline void raise(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void check_index(std::uint64_t j, std::uint64_t n, const char* what) {
  if (j >= n) {
    raise(Errc::index, std::string(what) + ": index " + std::to_string(j) +
                           " out of range [0, " + std::to_string(n) + ")");
  }
}

}  // namespace biask
