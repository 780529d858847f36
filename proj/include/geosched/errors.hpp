#pragma once

#include <stdexcept>
#include <string>

namespace geosched {

// Base class for numerical failures. Invalid arguments (bad process
// parameters, empty schedules) use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a monotone inverse (e.g. F^{-1}(y), y > F(1)).
class DomainError : public Error {
 public:
  using Error::Error;
};

// The Fisher-Rao metric or score diverges (alpha in {0, 1}).
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Adaptive quadrature exhausted its subdivision budget.
class IntegrationError : public Error {
 public:
  using Error::Error;
};

// Enumerated state space exceeds the configured cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

// KL(p||q) with p(x) > 0 and q(x) == 0.
class AbsoluteContinuityError : public Error {
 public:
  using Error::Error;
};

// A partially masked state that no support sequence agrees with.
class InconsistentStateError : public Error {
 public:
  using Error::Error;
};

// Ratio requested at a degenerate input (delta == 0).
class UndefinedRatioError : public Error {
 public:
  using Error::Error;
};

}  // namespace geosched
