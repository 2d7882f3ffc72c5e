#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sstedr {

/// Precondition violated by the caller (bad size, bad parameter, shape mismatch).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed text input. Carries the 1-based line number of the offending line.
class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

/// Too few usable beats to build a cubic-spline EDR signal.
class InsufficientBeats : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The time-frequency representation carries no energy a ridge could follow.
class DegenerateInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sstedr
