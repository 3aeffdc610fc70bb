#pragma once

#include <stdexcept>
#include <string>

namespace igpr {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Mismatched dimensions or out-of-range indices.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Argument outside the domain of a function (non-finite input, bad hyperparameter).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Factorization failures and non-recoverable round-off.
class NumericalError : public Error {
 public:
  using Error::Error;
};

// Malformed or missing input data.
class DataError : public Error {
 public:
  using Error::Error;
};

}  // namespace igpr
