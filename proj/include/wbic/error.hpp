#pragma once

#include <stdexcept>
#include <string>

namespace wbic {

enum class ErrorKind {
  InvalidArgument,
  DimensionMismatch,
  NonFinite,
  Parse,
  Data,
  Config,
  Sampler,
  Numerical,
};

/// Structured error carried by every failing operation in the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace wbic
