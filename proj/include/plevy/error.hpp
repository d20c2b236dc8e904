#pragma once

#include <stdexcept>
#include <string>

namespace plevy {

/// Error categories; the CLI maps these onto process exit codes.
enum class ErrorKind {
  Domain,         // argument outside the mathematical domain of a function
  Range,          // parameter outside the supported numeric range
  Precondition,   // caller violated a documented precondition
  Integrability,  // quadrature detected a non-integrable profile
  Consistency,    // two independent evaluation routes disagree
  Validation,     // malformed configuration or input
  Parse,          // expression syntax error
  Evaluation,     // expression evaluation produced a non-finite value
  Solver,         // iterative solver failed to converge
  Guard           // an experiment exceeded its guard tolerance
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool ok, ErrorKind kind, const std::string& what) {
  if (!ok) raise(kind, what);
}

}  // namespace plevy
