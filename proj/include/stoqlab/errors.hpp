#pragma once

#include <stdexcept>
#include <string>

namespace stoqlab {

struct ParseError : std::runtime_error {
  int line;
  ParseError(int line_, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

struct CircuitError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// A configured resource cap (support size, enumeration budget) was exceeded.
struct CapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigensolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace stoqlab
