#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bedscan {

class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed G-code input; carries the 1-based source line.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Commanded position outside the build volume; message names every
// violated axis.
class LimitError : public Error {
 public:
  using Error::Error;
};

// Degenerate or invalid geometric configuration.
class GeometryError : public Error {
 public:
  using Error::Error;
};

// Operation requested in a machine phase that does not allow it.
class StateError : public Error {
 public:
  using Error::Error;
};

// The physical mechanism cannot perform the request (e.g. an
// underconstrained coupling asked to run a scan cycle).
class MechanismError : public Error {
 public:
  using Error::Error;
};

// Malformed binary/text file; carries the byte offset where the
// problem was detected.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t byte_offset)
      : Error(what + " (byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}
  std::size_t byte_offset() const { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

}  // namespace bedscan
