#ifndef SUPRAD_ERRORS_HPP
#define SUPRAD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace suprad {

// Error taxonomy mirrors the CLI exit codes:
//   parse/constraint -> 1, numeric -> 2, regime -> 3, precondition -> 4.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ParseError : Error {
  using Error::Error;
};

struct ConstraintError : Error {
  using Error::Error;
};

struct NumericError : Error {
  using Error::Error;
};

struct RegimeError : Error {
  using Error::Error;
};

struct PreconditionError : Error {
  using Error::Error;
};

}  // namespace suprad

#endif
