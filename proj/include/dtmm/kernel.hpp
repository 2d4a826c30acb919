#pragma once

// Kernel matrix U(x) of the envelope equation C'(x) = U(x) C(x).
//
// kernel_generic is the reference construction from basis partials; the per-family closed forms
// are validated against it. Every entry carries the factor k'(x).

#include <functional>

#include "dtmm/basis.hpp"
#include "dtmm/profile.hpp"
#include "dtmm/types.hpp"

namespace dtmm {

struct KernelMatrix {
  Mat2 u = Mat2::Zero();
  double x = 0.0;

  [[nodiscard]] cplx trace() const { return u.trace(); }
};

using KernelFn = std::function<KernelMatrix(double)>;

/// Relative Wronskian tolerance: |W| < tol_W_rel * (|A B_x| + |A_x B|) is singular.
inline constexpr double kWronskianRelTol = 1e-10;
/// Relative tolerance on |k| for the families whose kernel divides by k.
inline constexpr double kTurningPointRelTol = 1e-8;

/// Generic kernel from basis partials at (x, k, k'). Throws SingularWronskian when the Wronskian
/// is numerically zero.
KernelMatrix kernel_generic(const BasisFamily& family, double x, double k, double k_prime);
KernelMatrix kernel_generic(const BasisFamily& family, const EigenvalueFunction& kf, double x);

/// U = (k'/2k) [[-1 + 2ixk, e^{+2ixk}], [e^{-2ixk}, -1 - 2ixk]]. Throws TurningPoint when
/// |k| <= k_scale * 1e-8.
KernelMatrix kernel_wave(const EigenvalueFunction& kf, double x, double k_scale = 1.0);
KernelMatrix kernel_wave(double x, double k, double k_prime, double k_scale = 1.0);

/// Closed form in Ai, Bi, Ai', Bi' at z = kx, normalized by the basis Wronskian k/pi.
KernelMatrix kernel_airy(const EigenvalueFunction& kf, double x);
KernelMatrix kernel_airy(double x, double k, double k_prime);

/// Closed form in J_{nu-2..nu+2}, N_{nu-2..nu+2} at z = kx (recurrence form).
KernelMatrix kernel_bessel_arg(const EigenvalueFunction& kf, double nu, double x);
KernelMatrix kernel_bessel_arg(double x, double k, double k_prime, double nu);

/// The recurrence-form Bessel-argument kernel exactly as it is usually printed (prefactor
/// x*pi*k'/2 and the printed signs). Kept for discrepancy reporting only; it does not solve
/// the equation. See tests/test_kernel.cpp.
KernelMatrix kernel_bessel_arg_printed(double x, double k, double k_prime, double nu);

/// Order-eigenvalue Bessel kernel (J_k, N_k pair) with order derivatives by finite differences.
KernelMatrix kernel_bessel_order(const EigenvalueFunction& kf, double x);
KernelMatrix kernel_bessel_order(double x, double k, double k_prime);

/// U = -(k'/2k) [[1 + 2k ln x, -x^{-2k}], [-x^{2k}, 1 - 2k ln x]].
KernelMatrix kernel_euler_cauchy(const EigenvalueFunction& kf, double x, double k_scale = 1.0);
KernelMatrix kernel_euler_cauchy(double x, double k, double k_prime, double k_scale = 1.0);

/// (Q(k1 -> k1 + dk at X) - I) / dx: the difference quotient whose dx -> 0 limit is the kernel.
KernelMatrix kernel_fd_limit(const BasisFamily& family, double k1, double dk, double X, double dx);

/// Dispatch to the family's closed form (generic for custom families). `k_scale` feeds the
/// turning-point tolerance; pass max(1, sup|k|) over the domain of interest.
KernelMatrix kernel(const BasisFamily& family, const EigenvalueFunction& kf, double x,
                    double k_scale = 1.0);

/// Kernel as a function of x, suitable for the propagators.
KernelFn make_kernel_fn(const BasisFamily& family, const EigenvalueFunction& kf,
                        double k_scale = 1.0);

/// |tr U + k' d(ln W)/dk| at x, with d(ln W)/dk by central difference (step 1e-5 scaled).
double trace_identity_residual(const BasisFamily& family, const EigenvalueFunction& kf, double x,
                               const KernelMatrix& u);

}  // namespace dtmm
