#pragma once

#include <stdexcept>
#include <string>

namespace gaplab {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Two measures live on different indexed spaces.
class SpaceMismatch : public Error {
 public:
  using Error::Error;
};

// Absolute continuity (support inclusion) required but violated.
class NotAbsolutelyContinuous : public Error {
 public:
  using Error::Error;
};

class AlphaOutOfRange : public Error {
 public:
  using Error::Error;
};

class EmptyList : public Error {
 public:
  using Error::Error;
};

class EmptySupport : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

// A dataset space (or tuple enumeration) exceeds the configured cap.
class EnumerationCapExceeded : public Error {
 public:
  using Error::Error;
};

class UnknownIdentity : public Error {
 public:
  using Error::Error;
};

// A measure violates a structural precondition (normalization, finiteness, ...).
class InvalidMeasure : public Error {
 public:
  using Error::Error;
};

class InvalidParameter : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace gaplab
