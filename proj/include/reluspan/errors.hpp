#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace reluspan {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A precondition on an argument was violated (zero slope, nonpositive width, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// The limit of f(x)/(1+|x|) could not be established: the target may not lie in Y.
class NotInY : public Error {
 public:
  using Error::Error;
};

/// Malformed network, PL or measure document.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  enum class Kind { lexical, syntax, unknown_function };

  ParseError(Kind kind, std::size_t position, const std::string& what)
      : Error(what + " at position " + std::to_string(position)),
        kind_(kind),
        position_(position) {}

  Kind kind() const noexcept { return kind_; }
  std::size_t position() const noexcept { return position_; }

 private:
  Kind kind_;
  std::size_t position_;
};

/// Evaluation left the domain of an operation (division by zero, sqrt of a
/// negative number, overflow, ...). Carries the offending value and the input x.
class DomainError : public Error {
 public:
  DomainError(std::string op, double value, double x);

  const std::string& op() const noexcept { return op_; }
  double value() const noexcept { return value_; }
  double x() const noexcept { return x_; }

 private:
  std::string op_;
  double value_;
  double x_;
};

}  // namespace reluspan
