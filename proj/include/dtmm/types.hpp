#pragma once

#include <complex>

#include <Eigen/Dense>

namespace dtmm {

template <typename Real>
using Complex = std::complex<Real>;

template <typename Real>
using Matrix2c = Eigen::Matrix<std::complex<Real>, 2, 2>;

template <typename Real>
using Vector2c = Eigen::Matrix<std::complex<Real>, 2, 1>;

using cplx = Complex<double>;
using Mat2 = Matrix2c<double>;
using Vec2 = Vector2c<double>;

inline constexpr cplx I{0.0, 1.0};

/// Closed real interval; either end may be infinite.
struct Interval {
  double lo;
  double hi;

  [[nodiscard]] bool contains(double x) const { return x >= lo && x <= hi; }
};

}  // namespace dtmm
