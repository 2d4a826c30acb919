#pragma once

// Bloch wavenumbers of a periodic eigenvalue function k(x) = k(x + L).

#include <array>

#include "dtmm/basis.hpp"
#include "dtmm/profile.hpp"
#include "dtmm/propagate.hpp"
#include "dtmm/types.hpp"

namespace dtmm {

struct BlochResult {
  std::array<cplx, 2> kappa;
  std::array<cplx, 2> eigenvalues;  // eigenvalues of P = V^{-1} Q, lambda = exp(-i kappa L)
  std::array<Vec2, 2> eigenvectors;
  double base_x = 0.0;
  double period_L = 0.0;
  int branch_index = 0;
  Mat2 v = Mat2::Identity();
  Mat2 q = Mat2::Identity();
};

/// V = M(x + L; k(x))^{-1} M(x; k(x)), M = [[A, B], [A_x, B_x]]. Note the shifted matrix is
/// evaluated with k taken at x, not at x + L.
Mat2 v_matrix(const BasisFamily& family, const EigenvalueFunction& kf, double x, double L);

/// Throws PeriodicityViolation unless |k(x) - k(x + L)| <= 1e-10 on 32 samples of one period.
void check_periodic(const EigenvalueFunction& kf, double base_x, double L);

/// kappa = (i/L) ln(eig(V^{-1} Q)) with Q the ordered transfer matrix over one period.
/// Re(kappa) L is reduced to (-pi, pi], then shifted by 2 pi branch_index / L.
BlochResult bloch_wavenumbers(const BasisFamily& family, const EigenvalueFunction& kf,
                              double base_x, double L, int n_steps, int branch_index = 0);

/// Eigenvalues of a 2x2 complex matrix, roots of lambda^2 - tr lambda + det.
std::array<cplx, 2> eigenvalues_2x2(const Mat2& m);

/// kappa for a translation eigenvalue lambda on the principal branch.
cplx kappa_from_eigenvalue(cplx lambda, double L, int branch_index = 0);

/// |det(exp(-i kappa L) V - Q)|.
double bloch_residual(const BlochResult& r, int which);

}  // namespace dtmm
