#pragma once

// Transfer matrices of the envelope vector: exact finite jumps and the propagators over a smooth
// eigenvalue function (ordered product, truncated iterated-integral series, unordered first
// Magnus exponential and the diagonal approximation).

#include <limits>

#include "dtmm/basis.hpp"
#include "dtmm/expm.hpp"
#include "dtmm/kernel.hpp"
#include "dtmm/profile.hpp"
#include "dtmm/types.hpp"

namespace dtmm {

/// Maps envelopes at x_from to envelopes at x_to. w_from / w_to are the basis Wronskians at the
/// endpoints when known (NaN otherwise). w_from_shifted is W(x_to; k(x_from)), the starting
/// eigenvalue evaluated at the far endpoint.
///
/// det(m) = exp(-int k' d(ln W)/dk dx). When W(x; k) separates into g(x) h(k), as it does for
/// every built-in family, this is h(k_from) / h(k_to) = w_from_shifted / w_to. It reduces to
/// w_from / w_to only when W does not depend on x at fixed k (wave, airy).
struct TransferMatrix {
  Mat2 m = Mat2::Identity();
  double x_from = 0.0;
  double x_to = 0.0;
  cplx w_from{std::numeric_limits<double>::quiet_NaN(), 0.0};
  cplx w_to{std::numeric_limits<double>::quiet_NaN(), 0.0};
  cplx w_from_shifted{std::numeric_limits<double>::quiet_NaN(), 0.0};

  [[nodiscard]] cplx det() const { return m.determinant(); }
  [[nodiscard]] cplx expected_det() const { return w_from_shifted / w_to; }
  [[nodiscard]] Vec2 operator*(const Vec2& c) const { return m * c; }
};

/// Later transfer on the left: (b * a) maps a.x_from -> b.x_to.
TransferMatrix compose(const TransferMatrix& later, const TransferMatrix& earlier);

/// Envelope map across a step k1 -> k2 at X. Throws SingularWronskian when W(X; k2) vanishes.
TransferMatrix jump_transfer(const BasisFamily& family, double k1, double k2, double X);

/// exp(M) for a 2x2 complex matrix.
inline Mat2 expm_2x2(const Mat2& m) { return expm2(m); }

/// Ordered exponential as prod_j exp(U(midpoint_j) h), later-x factors on the left. x2 < x1 is
/// allowed (negative step).
TransferMatrix propagate_ordered(const KernelFn& kernel_fn, double x1, double x2, int n_steps);

/// Truncated iterated-integral series of the given order (1..4), each level integrated with the
/// cumulative trapezoid rule on n_quad points.
TransferMatrix propagate_series(const KernelFn& kernel_fn, double x1, double x2, int order,
                                int n_quad = 512);

/// exp(integral of U), trapezoid rule on n_quad points. Exact when U commutes with itself.
TransferMatrix propagate_magnus1(const KernelFn& kernel_fn, double x1, double x2, int n_quad);

/// diag(exp(int u11), exp(int u22)), trapezoid rule on n_quad points.
TransferMatrix propagate_diagonal(const KernelFn& kernel_fn, double x1, double x2, int n_quad);

/// Fill w_from, w_to and w_from_shifted from the basis at the endpoints.
TransferMatrix with_wronskians(TransferMatrix q, const BasisFamily& family,
                               const EigenvalueFunction& kf);

enum class Method { ordered, magnus1, diagonal, series };

struct PropagationOptions {
  Method method = Method::ordered;
  int series_order = 3;
  int series_quad = 512;
};

/// Method-dispatched propagation of a (family, k) pair with endpoint Wronskians filled in.
/// `n_steps` is the step count for the ordered product and the quadrature point count (n + 1)
/// for the others.
TransferMatrix propagate(const BasisFamily& family, const EigenvalueFunction& kf, double x1,
                         double x2, int n_steps, const PropagationOptions& opts = {});

/// Throws TurningPoint (wave, euler_cauchy) or SingularWronskian (airy) if k changes sign or
/// touches zero between x1 and x2. The crossing is located by bisection between samples.
void check_path(const BasisFamily& family, const EigenvalueFunction& kf, double x1, double x2,
                int samples);

}  // namespace dtmm
