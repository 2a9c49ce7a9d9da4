#pragma once

#include <stdexcept>
#include <string>

namespace bouss {

// All library failures derive from bouss::Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line)
      : Error(line > 0 ? what + " (line " + std::to_string(line) + ")" : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

class TopologyError : public Error {
 public:
  using Error::Error;
};

class LocationError : public Error {
 public:
  using Error::Error;
};

// Raised by solvers that cannot proceed (zero pivot, breakdown).
class SolverError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace bouss
