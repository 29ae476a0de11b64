#pragma once

#include <stdexcept>
#include <string>

namespace dhtsim {

enum class Status {
  ok = 0,
  invalid_argument,
  capacity,
  duplicate_key,
  unknown_key,
  underflow,
  no_convergence,
  io_error,
  internal,
};

inline const char* status_name(Status s) {
  switch (s) {
    case Status::ok: return "ok";
    case Status::invalid_argument: return "invalid_argument";
    case Status::capacity: return "capacity";
    case Status::duplicate_key: return "duplicate_key";
    case Status::unknown_key: return "unknown_key";
    case Status::underflow: return "underflow";
    case Status::no_convergence: return "no_convergence";
    case Status::io_error: return "io_error";
    case Status::internal: return "internal";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Status code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Status code() const { return code_; }

 private:
  Status code_;
};

[[noreturn]] inline void fail(Status code, const std::string& msg) { throw Error(code, msg); }

}  // namespace dhtsim
