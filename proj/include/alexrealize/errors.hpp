#pragma once

#include <stdexcept>
#include <string>

namespace alexrealize {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A structural invariant of an input object does not hold (cyclic covers,
/// redundant covers, loops in a graph, malformed permutation, ...).
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class UnknownElement : public InvalidInput {
 public:
  explicit UnknownElement(const std::string& id)
      : InvalidInput("unknown element identifier '" + id + "'") {}
};

class EmptyInput : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// The order generated by a gluing is not antisymmetric.
class AntisymmetryViolation : public Error {
 public:
  using Error::Error;
};

/// A configured size cap (group order, poset size, simplex budget) was hit.
class CapExceeded : public Error {
 public:
  using Error::Error;
};

/// A subset expected to be invariant under a group is not.
class NotInvariant : public Error {
 public:
  using Error::Error;
};

/// A builder produced an object that fails one of its verification gates.
class GateFailure : public Error {
 public:
  GateFailure(std::string gate, const std::string& detail)
      : Error("gate '" + gate + "' failed: " + detail), gate_(std::move(gate)) {}
  const std::string& gate() const noexcept { return gate_; }

 private:
  std::string gate_;
};

class RigidificationExhausted : public Error {
 public:
  using Error::Error;
};

/// A realization pipeline could not produce an object passing its checks.
class VerificationFailure : public Error {
 public:
  VerificationFailure(std::string clause, const std::string& detail)
      : Error("verification of '" + clause + "' failed: " + detail),
        clause_(std::move(clause)) {}
  const std::string& clause() const noexcept { return clause_; }

 private:
  std::string clause_;
};

class ArithmeticOverflow : public Error {
 public:
  using Error::Error;
};

}  // namespace alexrealize
