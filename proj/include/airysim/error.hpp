#pragma once

#include <stdexcept>
#include <string>

namespace airy {

enum class ErrorCode {
  Domain = 1,       // argument outside the mathematical domain
  Usage = 2,        // inconsistent call (missing noise, bad mode)
  Numeric = 3,      // overflow / non-finite intermediate
  Refused = 4,      // size guard of an exhaustive oracle
  DimMismatch = 5,  // vector/matrix dimension disagreement
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, ErrorCode code, const std::string& what) {
  if (!ok) fail(code, what);
}

}  // namespace airy
