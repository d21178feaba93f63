#pragma once

#include <stdexcept>
#include <string>

#include "imcorrect/types.hpp"

namespace imc {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad arguments or violated preconditions that a caller could have checked.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// A flip cell conflicts with the interaction matrix (removing an absent
// cell or adding a present one).
class FlipConflictError : public ValidationError {
 public:
  FlipConflictError(const std::string& what, Index user, Index item)
      : ValidationError(what), user(user), item(item) {}
  Index user;
  Index item;
};

// Negative correction asked to remove more interactions from an item than
// it has.
class CountOverflowError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class RankTooLargeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class KTooLargeError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class UnknownInteractionError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

class InsufficientCandidatesError : public Error {
 public:
  using Error::Error;
};

class InsufficientUsersError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

// Input file could not be parsed; carries the 1-based line number.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line)
      : Error(what), line(line) {}
  std::size_t line;
};

// k-core filtering removed everything.
class EmptyResultError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace imc
