#pragma once

#include <stdexcept>
#include <string>

namespace impatient {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A linear solve failed even after the full jitter escalation.
class NonInvertible : public Error {
 public:
  using Error::Error;
};

class EmptyHistory : public Error {
 public:
  using Error::Error;
};

class InconsistentDimensions : public Error {
 public:
  using Error::Error;
};

class TooFewShows : public Error {
 public:
  using Error::Error;
};

class MissingTargets : public Error {
 public:
  using Error::Error;
};

class Underdetermined : public Error {
 public:
  using Error::Error;
};

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

class InsufficientTraces : public Error {
 public:
  using Error::Error;
};

// Malformed input file or record.
class FormatError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace impatient
