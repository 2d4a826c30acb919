#pragma once

// Real-argument special functions used by the basis families: Airy Ai/Bi, Bessel J and
// Neumann N of real order, and derivatives of J and N with respect to the order.
//
// Working ranges: |z| <= 50 for Airy, 0 < x <= 50 and |nu| <= 20 for Bessel.
// Everything here is a pure function of its arguments.

#include <utility>

namespace dtmm::specfun {

inline constexpr double kAiryMaxAbsArg = 50.0;
inline constexpr double kBesselMaxArg = 50.0;
inline constexpr double kBesselMaxAbsOrder = 20.0;
inline constexpr double kIntegerOrderMargin = 1e-6;

struct SpecialValue {
  double value;
  double derivative;  // with respect to the function's argument
};

struct AiryPair {
  SpecialValue ai;
  SpecialValue bi;
};

struct BesselPair {
  SpecialValue j;
  SpecialValue n;
};

/// Ai(z), Ai'(z), Bi(z), Bi'(z). Throws RangeError for |z| > 50 or non-finite z.
AiryPair airy(double z);

/// J_nu(x), J_nu'(x), N_nu(x), N_nu'(x). Throws DomainError for x <= 0, RangeError outside the
/// working box.
BesselPair bessel_jn(double nu, double x);

/// Only J_nu(x) and J_nu'(x); valid for the same box as bessel_jn.
SpecialValue bessel_j(double nu, double x);

/// Partial sum of the ascending power series of J_alpha(x) with `terms` terms, accumulated in
/// extended precision. Negative integer alpha is mapped through J_{-n} = (-1)^n J_n.
double bessel_j_series(double alpha, double x, int terms);

/// Order derivatives: dj = {dJ/dnu, d2J/dnu dx}, dn = {dN/dnu, d2N/dnu dx}.
/// Central differences in nu with step 1e-6 * max(1, |nu|).
struct OrderDerivatives {
  SpecialValue dj;
  SpecialValue dn;
};

OrderDerivatives bessel_dorder(double nu, double x);

/// Same as bessel_dorder with an explicit order step; exposed for convergence checks.
OrderDerivatives bessel_dorder(double nu, double x, double step);

[[nodiscard]] bool near_integer(double nu, double margin = kIntegerOrderMargin);

}  // namespace dtmm::specfun
