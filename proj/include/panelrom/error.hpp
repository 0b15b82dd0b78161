#pragma once

#include <stdexcept>
#include <string>

namespace panelrom {

// Error categories; values line up with the CLI exit codes.
enum class ErrCode : int {
  invalid = 1,
  config = 2,
  solver = 3,
  stale = 4,
  io = 5,
};

class Error : public std::runtime_error {
public:
  Error(ErrCode code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  ErrCode code() const { return code_; }

private:
  ErrCode code_;
};

[[noreturn]] inline void fail(ErrCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, ErrCode code, const std::string& msg) {
  if (!cond) fail(code, msg);
}

} // namespace panelrom
