#include "dtmm/specfun.hpp"

#include <cmath>
#include <string>

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include "dtmm/errors.hpp"

namespace dtmm::specfun {

namespace {

std::string num(double v) { return std::to_string(v); }

void check_bessel_box(double nu, double x) {
  if (!std::isfinite(nu) || !std::isfinite(x)) {
    throw RangeError("bessel: non-finite argument");
  }
  if (x <= 0.0) {
    throw DomainError("bessel: argument x = " + num(x) + " must be positive");
  }
  if (x > kBesselMaxArg || std::abs(nu) > kBesselMaxAbsOrder) {
    throw RangeError("bessel: (nu, x) = (" + num(nu) + ", " + num(x) +
                     ") outside working range 0 < x <= 50, |nu| <= 20");
  }
}

}  // namespace

bool near_integer(double nu, double margin) { return std::abs(nu - std::round(nu)) <= margin; }

AiryPair airy(double z) {
  if (!std::isfinite(z) || std::abs(z) > kAiryMaxAbsArg) {
    throw RangeError("airy: argument z = " + num(z) + " outside working range |z| <= 50");
  }
  namespace bm = boost::math;
  return {{bm::airy_ai(z), bm::airy_ai_prime(z)}, {bm::airy_bi(z), bm::airy_bi_prime(z)}};
}

SpecialValue bessel_j(double nu, double x) {
  check_bessel_box(nu, x);
  namespace bm = boost::math;
  const double j = bm::cyl_bessel_j(nu, x);
  const double j_next = bm::cyl_bessel_j(nu + 1.0, x);
  // J' = (nu/x) J - J_{nu+1}
  return {j, nu / x * j - j_next};
}

BesselPair bessel_jn(double nu, double x) {
  check_bessel_box(nu, x);
  namespace bm = boost::math;
  const double j = bm::cyl_bessel_j(nu, x);
  const double j_next = bm::cyl_bessel_j(nu + 1.0, x);
  const double n = bm::cyl_neumann(nu, x);
  const double n_next = bm::cyl_neumann(nu + 1.0, x);
  return {{j, nu / x * j - j_next}, {n, nu / x * n - n_next}};
}

double bessel_j_series(double alpha, double x, int terms) {
  if (x < 0.0) throw DomainError("bessel_j_series: x must be non-negative");
  if (terms < 1) throw DomainError("bessel_j_series: terms must be >= 1");

  double sign = 1.0;
  if (alpha < 0.0 && alpha == std::round(alpha)) {
    // J_{-n} = (-1)^n J_n; the leading terms of the series have 1/Gamma poles.
    alpha = -alpha;
    if (std::fmod(alpha, 2.0) != 0.0) sign = -1.0;
  }
  if (x == 0.0) return alpha == 0.0 ? sign : 0.0;

  using ld = long double;
  const ld half = static_cast<ld>(x) / 2;
  const ld q = -half * half;
  // m = 0 term: (x/2)^alpha / Gamma(alpha + 1)
  ld term = std::pow(half, static_cast<ld>(alpha)) / std::tgamma(static_cast<ld>(alpha) + 1);
  ld sum = term;
  for (int m = 1; m < terms; ++m) {
    term *= q / (static_cast<ld>(m) * (static_cast<ld>(m) + alpha));
    if (!std::isfinite(static_cast<double>(term))) {
      throw OverflowError("bessel_j_series: non-finite term at m = " + std::to_string(m));
    }
    sum += term;
  }
  const double result = static_cast<double>(sum);
  if (!std::isfinite(result)) throw OverflowError("bessel_j_series: non-finite sum");
  return sign * result;
}

OrderDerivatives bessel_dorder(double nu, double x, double step) {
  if (x <= 0.0) throw DomainError("bessel_dorder: argument x = " + num(x) + " must be positive");
  const BesselPair plus = bessel_jn(nu + step, x);
  const BesselPair minus = bessel_jn(nu - step, x);
  const double inv = 1.0 / (2.0 * step);
  return {{(plus.j.value - minus.j.value) * inv, (plus.j.derivative - minus.j.derivative) * inv},
          {(plus.n.value - minus.n.value) * inv, (plus.n.derivative - minus.n.derivative) * inv}};
}

OrderDerivatives bessel_dorder(double nu, double x) {
  if (x <= 0.0) throw DomainError("bessel_dorder: argument x = " + num(x) + " must be positive");
  if (near_integer(nu)) throw NearIntegerOrder(x, nu);
  return bessel_dorder(nu, x, 1e-6 * std::max(1.0, std::abs(nu)));
}

}  // namespace dtmm::specfun
