#pragma once

#include <stdexcept>
#include <string>

namespace mjls {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rejected input: dimension mismatches, invalid probabilities, size caps.
/// Maps to CLI exit code 1.
class InvalidInputError : public Error {
 public:
  using Error::Error;
};

/// The requested analysis is undefined for this problem: instability where
/// stability is required, non-ergodic chain, non-centered offsets, singular
/// structural matrices. Maps to CLI exit code 2.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

/// Internal numerical failure: eigensolver non-convergence, overflow.
/// Maps to CLI exit code 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace mjls
