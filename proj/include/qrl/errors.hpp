#pragma once

#include <stdexcept>
#include <string>

namespace qrl {

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A formula references something the prefix does not define.
class MalformedFormula : public Error {
public:
  using Error::Error;
};

/// Caller violated an operation's documented precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// An internal invariant failed. Always a bug in this library.
class InvariantError : public Error {
public:
  using Error::Error;
};

/// An oracle declined to evaluate a formula that exceeds its limits.
class OracleRefusal : public Error {
public:
  using Error::Error;
};

} // namespace qrl
