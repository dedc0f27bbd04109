#pragma once

#include <stdexcept>
#include <string>

namespace qsmpc {

// Base for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A precondition on arguments was violated (arity, modulus, probability range, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Exact angle arithmetic would exceed the supported denominator.
class ArithmeticCapacityError : public Error {
 public:
  using Error::Error;
};

// Text input (angle, QASM, transcript) could not be parsed.
class ParseError : public Error {
 public:
  using Error::Error;
};

// A replayed participant produced a message that differs from the log.
class ReplayDivergence : public Error {
 public:
  using Error::Error;
};

// A protocol run violated one of its own bookkeeping identities.
class ConsistencyFault : public Error {
 public:
  using Error::Error;
};

inline void require(bool condition, const std::string& message) {
  if (!condition) throw DomainError(message);
}

}  // namespace qsmpc
