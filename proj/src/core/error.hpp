#pragma once

#include <stdexcept>
#include <string>

namespace scn {

/// Error categories; values double as CLI exit codes and C API status codes.
enum class ErrorCode : int {
  ok = 0,
  config = 2,    // bad configuration file or key
  format = 3,    // malformed input file
  data = 4,      // structurally valid file with invalid content
  argument = 5,  // invalid argument to an operation
  domain = 6,    // query outside the latent grid footprint
  numeric = 7,   // non-finite value produced
  usage = 8,     // operation misuse (wrong mode, reused cache, ...)
  io = 9,        // filesystem failure
  internal = 10,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
  throw Error(code, msg);
}

}  // namespace scn
