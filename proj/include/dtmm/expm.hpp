#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "dtmm/types.hpp"

namespace dtmm {

/// Exponential of a 2x2 complex matrix in closed form.
///
/// With mu = tr(M)/2, D = M - mu I and s = sqrt(mu^2 - det M) (so D^2 = s^2 I):
///   exp(M) = e^mu (cosh(s) I + sinh(s)/s D).
/// For |s| < 1e-8 the ratio sinh(s)/s is taken from its series 1 + s^2/6.
template <typename Derived>
Matrix2c<typename Derived::RealScalar> expm2(const Eigen::MatrixBase<Derived>& m) {
  using Real = typename Derived::RealScalar;
  using C = std::complex<Real>;
  static_assert(Derived::RowsAtCompileTime == 2 && Derived::ColsAtCompileTime == 2,
                "expm2 expects a 2x2 matrix");

  const Matrix2c<Real> a = m.template cast<C>();
  const C mu = (a(0, 0) + a(1, 1)) / Real(2);
  Matrix2c<Real> d = a;
  d(0, 0) -= mu;
  d(1, 1) -= mu;
  // s^2 = -det(D) = d00^2 + d01 d10 (d11 = -d00); avoids mu^2 - det cancellation
  const C s2 = d(0, 0) * d(0, 0) + d(0, 1) * d(1, 0);
  const C s = std::sqrt(s2);
  C ch;
  C sh_over_s;
  if (std::abs(s) < Real(1e-8)) {
    ch = Real(1) + s2 / Real(2);
    sh_over_s = Real(1) + s2 / Real(6);
  } else {
    ch = std::cosh(s);
    sh_over_s = std::sinh(s) / s;
  }
  const C scale = std::exp(mu);
  Matrix2c<Real> r = (scale * sh_over_s) * d;
  r(0, 0) += scale * ch;
  r(1, 1) += scale * ch;
  return r;
}

}  // namespace dtmm
