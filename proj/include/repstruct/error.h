#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace repstruct {

/// Base for every error raised by the library. Data errors map to CLI exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input bytes could not be decoded. `offset` is the byte position when known.
class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what, std::size_t offset = kNoOffset)
      : Error(offset == kNoOffset ? what : what + " (at byte " + std::to_string(offset) + ")"),
        offset_(offset) {}

  std::size_t offset() const { return offset_; }

  static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

 private:
  std::size_t offset_;
};

/// Input decoded fine but violates an analysis precondition (non-4/4, no melody, ...).
class RejectionError : public Error {
 public:
  using Error::Error;
};

/// A label string does not tile the song it describes.
class StructureMismatchError : public Error {
 public:
  using Error::Error;
};

/// A caller-supplied parameter is out of range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

}  // namespace repstruct
