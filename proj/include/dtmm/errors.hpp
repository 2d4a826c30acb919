#pragma once

#include <stdexcept>
#include <string>

namespace dtmm {

/// Base of every error raised by the solver library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of a function (e.g. x <= 0 for Bessel).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the documented working range of a routine.
class RangeError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

/// Bessel order too close to an integer for the order-eigenvalue basis.
class NearIntegerOrder : public Error {
 public:
  NearIntegerOrder(double x, double order);
  double x;
  double order;
};

/// Numerical failures tied to a position along the propagation path.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, double x) : Error(what), x(x) {}
  double x;
};

/// The basis Wronskian vanishes (or nearly so) at x.
class SingularWronskian : public NumericalError {
 public:
  SingularWronskian(double x, double k, double magnitude);
  double k;
};

/// The eigenvalue function crosses zero at x for a family whose Wronskian is proportional to k.
class TurningPoint : public NumericalError {
 public:
  TurningPoint(double x, const std::string& family);
};

/// The two-point boundary system is singular: the homogeneous problem has a nontrivial solution.
class ResonantBVP : public NumericalError {
 public:
  ResonantBVP(double c1, double c2, double det);
};

class PeriodicityViolation : public Error {
 public:
  PeriodicityViolation(double x, double period, double mismatch);
};

class StepSizeUnderflow : public NumericalError {
 public:
  explicit StepSizeUnderflow(double x);
};

}  // namespace dtmm
