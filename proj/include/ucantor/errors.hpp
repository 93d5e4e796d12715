#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace ucantor {

/// Coarse error categories; they map one-to-one onto the C API status codes.
enum class ErrorCode : int {
  ok = 0,
  invalid_argument = 1,  // caller passed a bad parameter value
  domain = 2,            // input violates a mathematical precondition
  parse = 3,             // malformed file or config document
  io = 4,                // filesystem failure
  internal = 5,          // invariant breach inside the library
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, std::string msg)
      : std::runtime_error(std::move(msg)), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  static Error invalid(std::string msg) {
    return Error(ErrorCode::invalid_argument, std::move(msg));
  }
  static Error domain(std::string msg) {
    return Error(ErrorCode::domain, std::move(msg));
  }
  static Error parse(std::string msg) {
    return Error(ErrorCode::parse, std::move(msg));
  }
  static Error io(std::string msg) {
    return Error(ErrorCode::io, std::move(msg));
  }
  static Error internal(std::string msg) {
    return Error(ErrorCode::internal, std::move(msg));
  }

 private:
  ErrorCode code_;
};

}  // namespace ucantor
