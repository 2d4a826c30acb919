#pragma once

// Basis families: two independent solutions A(x; k), B(x; k) of the constant-eigenvalue problem
// and the partial derivatives the kernel construction needs.

#include <functional>
#include <memory>
#include <string>

#include "dtmm/types.hpp"

namespace dtmm {

/// Values and partials of a basis pair at a point (x, k). Subscripts: x is the partial at fixed
/// k, k the partial at fixed x, xk the mixed partial.
struct BasisEval {
  cplx A, B;
  cplx A_x, B_x;
  cplx A_k, B_k;
  cplx A_xk, B_xk;
  cplx W;  // A*B_x - A_x*B

  /// 2x2 matrix [[A, B], [A_x, B_x]] mapping an envelope to (f, f').
  [[nodiscard]] Mat2 value_matrix() const {
    Mat2 m;
    m << A, B, A_x, B_x;
    return m;
  }

  /// |W| scale used for degeneracy tests: |A*B_x| + |A_x*B|.
  [[nodiscard]] double wronskian_scale() const { return std::abs(A * B_x) + std::abs(A_x * B); }

  [[nodiscard]] bool wronskian_degenerate(double rel_tol) const {
    return !(std::abs(W) > rel_tol * wronskian_scale());
  }
};

enum class FamilyTag { wave, airy, bessel_arg, bessel_order, euler_cauchy, custom };

/// Pair selector for the order-eigenvalue Bessel basis.
enum class BesselPairKind {
  j_n,         // (J_k, N_k), Wronskian 2/(pi x)
  j_plus_minus // (J_{+k}, J_{-k})
};

using BasisFn = std::function<cplx(double x, double k)>;

/// Immutable description of a basis family. Cheap to copy; custom callables are shared.
class BasisFamily {
 public:
  static BasisFamily wave();
  static BasisFamily airy();
  static BasisFamily bessel_arg(double nu);
  static BasisFamily bessel_order(BesselPairKind pair = BesselPairKind::j_n);
  static BasisFamily euler_cauchy();
  static BasisFamily custom(BasisFn a, BasisFn b, std::string name = "custom");

  [[nodiscard]] FamilyTag tag() const { return tag_; }
  [[nodiscard]] double nu() const { return nu_; }
  [[nodiscard]] BesselPairKind pair() const { return pair_; }
  [[nodiscard]] std::string name() const;

  /// W vanishes exactly where k does (wave, airy, euler_cauchy).
  [[nodiscard]] bool wronskian_vanishes_with_k() const;

  [[nodiscard]] BasisEval evaluate(double x, double k) const;

  /// A and B alone, without partials.
  [[nodiscard]] std::pair<cplx, cplx> values(double x, double k) const;

 private:
  struct Custom {
    BasisFn a;
    BasisFn b;
    std::string name;
  };

  explicit BasisFamily(FamilyTag tag) : tag_(tag) {}

  FamilyTag tag_;
  double nu_ = 0.0;
  BesselPairKind pair_ = BesselPairKind::j_n;
  std::shared_ptr<const Custom> custom_;
};

[[nodiscard]] std::string to_string(FamilyTag tag);

/// A = exp(-ixk), B = exp(+ixk); W = 2ik.
BasisEval eval_wave(double x, double k);

/// A = Ai(xk), B = Bi(xk); second derivatives eliminated with Ai'' = z Ai.
/// W = k/pi for the x-derivative Wronskian (1/pi at k = 1).
BasisEval eval_airy(double x, double k);

/// A = J_nu(xk), B = N_nu(xk); W = 2/(pi x). Requires x*k > 0.
BasisEval eval_bessel_arg(double x, double k, double nu);

/// Order as eigenvalue: A = J_k(x), B = N_k(x) (or J_{-k}(x)). k-partials are order derivatives.
BasisEval eval_bessel_order(double x, double k, BesselPairKind pair = BesselPairKind::j_n);

/// A = x^{+k}, B = x^{-k}; W = -2k/x. Requires x > 0.
BasisEval eval_euler_cauchy(double x, double k);

/// Partials of a user-supplied pair by central differences. First partials use relative steps
/// 1e-6*max(1,|x|) and 1e-6*max(1,|k|); the mixed partial uses 1e-4-scaled steps with one
/// Richardson extrapolation, since a four-point stencil at 1e-6 would be dominated by rounding.
BasisEval eval_custom_fd(const BasisFn& a, const BasisFn& b, double x, double k);

/// Relative Wronskian threshold below which a custom pair is reported as dependent.
inline constexpr double kCustomWronskianTol = 1e-12;

}  // namespace dtmm
