#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kgpathrl {

// Base of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed triple or text-map input. Carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& detail,
             const std::string& source = {})
      : Error((source.empty() ? "line " : source + ":") + std::to_string(line) +
              ": " + detail),
        line_(line),
        detail_(detail) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::size_t line_;
  std::string detail_;
};

class EmptyGraphError : public Error {
 public:
  using Error::Error;
};

class LookupError : public Error {
 public:
  using Error::Error;
};

class InvalidQueryError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition (e.g. rendering an empty path).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// Transport-level failure of a scorer after all retries.
class ScoringError : public Error {
 public:
  using Error::Error;
};

// A scorer service answered, but the answer breaks the wire protocol.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

class DatasetError : public Error {
 public:
  using Error::Error;
};

}  // namespace kgpathrl
