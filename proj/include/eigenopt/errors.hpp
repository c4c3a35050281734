#pragma once

#include <stdexcept>
#include <string>

namespace eigenopt {

enum class ParseErrorKind {
  kEmpty,
  kIllegalCharacter,
  kNonRectangular,
  kNoFreeCells,
  kDisconnected,
};

/// Map text rejected by parse_map. Line and column are 1-based and refer to
/// the original text (comment lines included); 0 when not tied to a position.
class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorKind kind, int line, int column, const std::string& message);

  ParseErrorKind kind() const noexcept { return kind_; }
  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  ParseErrorKind kind_;
  int line_;
  int column_;
};

/// A caller violated an operation's precondition (bad state, bad k, ...).
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& message, double residual);

  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// An internal invariant broke; indicates a bug rather than bad input.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace eigenopt
