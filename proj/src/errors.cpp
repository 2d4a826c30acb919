#include "dtmm/errors.hpp"

#include <cstdio>

namespace dtmm {

namespace {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

NearIntegerOrder::NearIntegerOrder(double x, double order)
    : Error("near-integer order " + format_number(order) + " at x = " + format_number(x) +
            ": the order-eigenvalue basis requires non-integer orders"),
      x(x),
      order(order) {}

SingularWronskian::SingularWronskian(double x, double k, double magnitude)
    : NumericalError("singular Wronskian at x = " + format_number(x) + " (k = " + format_number(k) +
                         ", |W| = " + format_number(magnitude) + ")",
                     x),
      k(k) {}

TurningPoint::TurningPoint(double x, const std::string& family)
    : NumericalError("turning point at x = " + format_number(x) + ": k(x) crosses zero and the " +
                         family + " basis Wronskian vanishes there; use the airy family instead",
                     x) {}

ResonantBVP::ResonantBVP(double c1, double c2, double det)
    : NumericalError("resonant boundary value problem on [" + format_number(c1) + ", " +
                         format_number(c2) + "]: boundary system determinant " +
                         format_number(det) + " is numerically zero",
                     c1) {}

PeriodicityViolation::PeriodicityViolation(double x, double period, double mismatch)
    : Error("k(x) is not periodic with period " + format_number(period) + ": |k(x) - k(x+L)| = " +
            format_number(mismatch) + " at x = " + format_number(x)) {}

StepSizeUnderflow::StepSizeUnderflow(double x)
    : NumericalError("step size underflow near x = " + format_number(x), x) {}

}  // namespace dtmm
