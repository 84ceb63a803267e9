#pragma once

#include <stdexcept>
#include <string>

namespace flatcheck {

enum class ErrorKind {
  DivisionByZero,
  DenominatorVanishes,
  UnsupportedTrigComposition,
  MissingValue,
  SyntaxError,
  UndeclaredIdentifier,
  DuplicateEquation,
  MissingEquation,
  HigherInputDerivativeInDrift,
  InvalidSystem,
  IterationBudgetExceeded,
  SamplingExhausted,
  PreconditionNotMet,
  InvalidArgument,
};

const char* error_kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failures carry a source position (1-based).
class ParseError : public Error {
 public:
  ParseError(ErrorKind kind, int line, int col, const std::string& msg)
      : Error(kind, std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
        line_(line),
        col_(col) {}
  int line() const { return line_; }
  int col() const { return col_; }

 private:
  int line_;
  int col_;
};

}  // namespace flatcheck
