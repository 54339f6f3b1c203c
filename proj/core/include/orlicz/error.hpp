#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace orlicz {

enum class ErrorKind {
  kValidation,       // input violates a documented precondition
  kDomain,           // argument outside the evaluation domain
  kTruncatedDomain,  // supremum not resolved by the grid
  kInsufficientTail, // tail-fit window holds too few quantile points
  kOutsideSpace,     // sample too heavy for the N-function
  kAliasing,         // requested frequency not representable on the grid
  kDegenerate,       // zero or constant input where a scale is required
  kPrecondition,     // statistical precondition (e.g. centring) failed
  kBudget,           // resource budget exceeded
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) fail(kind, what);
}

}  // namespace orlicz
