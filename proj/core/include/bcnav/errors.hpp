#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace bcnav {

/// Precondition violated by the caller (empty text, pose outside the world, ...).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The planner could not connect start and goal.
class NoPathError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Schema or syntax error in a JSON document. `pointer()` is an RFC 6901 JSON
/// pointer to the offending location ("/goal", "/params/alpha", ...).
class ParseError : public std::runtime_error {
 public:
  ParseError(std::string pointer, const std::string& message)
      : std::runtime_error(pointer + ": " + message), pointer_(std::move(pointer)) {}

  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace bcnav
