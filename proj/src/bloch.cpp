#include "dtmm/bloch.hpp"

#include <cmath>
#include <numbers>

#include "dtmm/errors.hpp"

namespace dtmm {

Mat2 v_matrix(const BasisFamily& family, const EigenvalueFunction& kf, double x, double L) {
  const double k = kf.k(x);
  const BasisEval here = family.evaluate(x, k);
  if (L == 0.0) return Mat2::Identity();
  const BasisEval shifted = family.evaluate(x + L, k);
  if (shifted.wronskian_degenerate(kWronskianRelTol)) {
    throw SingularWronskian(x + L, k, std::abs(shifted.W));
  }
  Mat2 inv;
  inv << shifted.B_x, -shifted.B, -shifted.A_x, shifted.A;
  inv /= shifted.W;
  return inv * here.value_matrix();
}

void check_periodic(const EigenvalueFunction& kf, double base_x, double L) {
  if (!(L > 0.0)) throw DomainError("Bloch period L must be positive");
  constexpr int kSamples = 32;
  for (int i = 0; i < kSamples; ++i) {
    const double x = base_x + L * i / kSamples;
    const double mismatch = std::abs(kf.k(x) - kf.k(x + L));
    if (mismatch > 1e-10) throw PeriodicityViolation(x, L, mismatch);
  }
}

std::array<cplx, 2> eigenvalues_2x2(const Mat2& m) {
  const cplx tr = m.trace();
  const cplx det = m.determinant();
  const cplx half = tr / 2.0;
  // Discriminant from the entries, (a - d)^2/4 + bc, avoids tr^2/4 - det cancellation.
  const cplx diff = (m(0, 0) - m(1, 1)) / 2.0;
  const cplx root = std::sqrt(diff * diff + m(0, 1) * m(1, 0));
  // Larger-magnitude root first, smaller from the product to avoid cancellation.
  cplx l1 = std::abs(half + root) >= std::abs(half - root) ? half + root : half - root;
  cplx l2 = l1 != 0.0 ? det / l1 : half;
  return {l1, l2};
}

cplx kappa_from_eigenvalue(cplx lambda, double L, int branch_index) {
  constexpr double pi = std::numbers::pi;
  // kappa = (i/L)(ln|lambda| + i arg lambda) = (-arg lambda + i ln|lambda|) / L
  double re = -std::arg(lambda);
  if (re <= -pi) re += 2.0 * pi;
  re += 2.0 * pi * branch_index;
  return {re / L, std::log(std::abs(lambda)) / L};
}

namespace {

Vec2 eigenvector(const Mat2& p, cplx lambda) {
  // (P - lambda I) v = 0; take the better-conditioned row
  const cplx a = p(0, 0) - lambda, b = p(0, 1);
  const cplx c = p(1, 0), d = p(1, 1) - lambda;
  Vec2 v = std::abs(a) + std::abs(b) >= std::abs(c) + std::abs(d) ? Vec2(b, -a) : Vec2(d, -c);
  if (v.norm() == 0.0) v = Vec2(1.0, 0.0);
  return v / v.norm();
}

}  // namespace

BlochResult bloch_wavenumbers(const BasisFamily& family, const EigenvalueFunction& kf,
                              double base_x, double L, int n_steps, int branch_index) {
  check_periodic(kf, base_x, L);
  check_path(family, kf, base_x, base_x + L, std::max(256, n_steps / 8));
  BlochResult r;
  r.base_x = base_x;
  r.period_L = L;
  r.branch_index = branch_index;
  r.v = v_matrix(family, kf, base_x, L);
  const KernelFn fn =
      make_kernel_fn(family, kf, std::max(1.0, kf.sup_abs_k(base_x, base_x + L)));
  r.q = propagate_ordered(fn, base_x, base_x + L, n_steps).m;
  const Mat2 p = r.v.inverse() * r.q;
  r.eigenvalues = eigenvalues_2x2(p);
  for (int i = 0; i < 2; ++i) {
    r.kappa[i] = kappa_from_eigenvalue(r.eigenvalues[i], L, branch_index);
    r.eigenvectors[i] = eigenvector(p, r.eigenvalues[i]);
  }
  return r;
}

double bloch_residual(const BlochResult& r, int which) {
  const cplx factor = std::exp(-I * r.kappa[which] * r.period_L);
  return std::abs((factor * r.v - r.q).determinant());
}

}  // namespace dtmm
