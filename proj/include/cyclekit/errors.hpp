#pragma once

#include <stdexcept>
#include <string>

namespace cyclekit {

/// Base class for every failure the toolkit reports.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad JSON, unknown model, unparsable parameter.
class InputError : public Error {
 public:
  using Error::Error;
};

class ParameterOutOfRange : public InputError {
 public:
  using InputError::InputError;
};

// Reduction failures.
class NoFixedPointFound : public Error {
 public:
  using Error::Error;
};

class DegenerateTransform : public Error {
 public:
  using Error::Error;
};

class NotReducible : public Error {
 public:
  using Error::Error;
};

class FixedPointNotShifted : public Error {
 public:
  using Error::Error;
};

/// -A10 <= 0: there is no linear frequency to average around.
class NotOscillatory : public Error {
 public:
  using Error::Error;
};

/// The averaged radial polynomial vanishes identically (center at first order).
class IdenticallyZero : public Error {
 public:
  using Error::Error;
};

// Integration failures.
class StepUnderflow : public Error {
 public:
  using Error::Error;
};

class NonFiniteState : public Error {
 public:
  using Error::Error;
};

}  // namespace cyclekit
