#pragma once

#include <stdexcept>
#include <string>

namespace melodikit {

// Bad user input: malformed files, invalid parameters, impossible requests.
// The CLI maps these to exit code 1.
struct ValidationError : std::runtime_error {
  explicit ValidationError(const std::string &msg) : std::runtime_error(msg) {}
};

// Malformed input data (MIDI chunks, text melody lines, JSON schemas).
struct ParseError : ValidationError {
  explicit ParseError(const std::string &msg) : ValidationError(msg) {}
};

} // namespace melodikit
