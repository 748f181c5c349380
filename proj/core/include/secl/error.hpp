#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace secl {

// Every failure the library reports derives from Error so callers can catch
// one type at the CLI boundary.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input file. Carries the 1-based line number when known (0 for
// binary files).
class ParseError : public Error {
 public:
  ParseError(const std::string& path, std::size_t line, const std::string& what)
      : Error(path + ":" + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// NaN/Inf where a finite value is required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Modularity needs at least one edge.
class DegenerateGraphError : public Error {
 public:
  using Error::Error;
};

// API misuse, e.g. a second backward pass on the same tape.
class ContractError : public Error {
 public:
  using Error::Error;
};

}  // namespace secl
