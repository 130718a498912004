#pragma once

#include <stdexcept>
#include <string>

namespace tractlab {

enum class ErrorCode {
  Parameter = 1,
  Domain = 2,
  Overflow = 3,
  Continuation = 4,
  Io = 5,
  Internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace tractlab
