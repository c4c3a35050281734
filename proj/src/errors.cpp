#include "eigenopt/errors.hpp"

namespace eigenopt {

ParseError::ParseError(ParseErrorKind kind, int line, int column, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " +
                                        std::to_string(column) + ": " + message
                                  : message),
      kind_(kind),
      line_(line),
      column_(column) {}

NumericalError::NumericalError(const std::string& message, double residual)
    : std::runtime_error(message + " (residual " + std::to_string(residual) + ")"),
      residual_(residual) {}

}  // namespace eigenopt
