#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tracemin {

/// Malformed term, trace, stimulus-list or contract text.
class ParseError : public std::runtime_error
{
 public:
  ParseError(std::size_t line, std::size_t column, std::string expected);

  std::size_t line() const { return d_line; }
  std::size_t column() const { return d_column; }
  const std::string& expected() const { return d_expected; }

 private:
  std::size_t d_line;
  std::size_t d_column;
  std::string d_expected;
};

/// More than one transition matched an event at runtime.
class AmbiguousMatch : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// The unreduced stimulus list does not reproduce the target violation.
class NotReproducible : public std::runtime_error
{
 public:
  using std::runtime_error::runtime_error;
};

/// Requested scenario size is below the scenario's violating core.
class TargetTooSmall : public std::invalid_argument
{
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace tracemin
