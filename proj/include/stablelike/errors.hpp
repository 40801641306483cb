#pragma once

#include <stdexcept>
#include <string>

namespace stablelike {

// Base for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid configuration input; pointer is a JSON pointer to the offending field.
class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

// Argument outside an operation's domain.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Numerical routine failed to reach its tolerance within budget.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double residual)
      : Error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

}  // namespace stablelike
