#include "dtmm/propagate.hpp"

#include <cmath>
#include <vector>

#include "dtmm/errors.hpp"
#include "dtmm/specfun.hpp"

namespace dtmm {

TransferMatrix compose(const TransferMatrix& later, const TransferMatrix& earlier) {
  TransferMatrix r;
  r.m = later.m * earlier.m;
  r.x_from = earlier.x_from;
  r.x_to = later.x_to;
  r.w_from = earlier.w_from;
  r.w_to = later.w_to;
  r.w_from_shifted = later.expected_det() * earlier.expected_det() * r.w_to;
  return r;
}

TransferMatrix jump_transfer(const BasisFamily& family, double k1, double k2, double X) {
  const BasisEval e1 = family.evaluate(X, k1);
  const BasisEval e2 = family.evaluate(X, k2);
  if (e2.wronskian_degenerate(kWronskianRelTol)) throw SingularWronskian(X, k2, std::abs(e2.W));
  TransferMatrix q;
  q.m << (e2.B_x * e1.A - e2.B * e1.A_x), (e2.B_x * e1.B - e2.B * e1.B_x),
      (e1.A_x * e2.A - e1.A * e2.A_x), (e1.B_x * e2.A - e1.B * e2.A_x);
  q.m /= e2.W;
  q.x_from = X;
  q.x_to = X;
  q.w_from = e1.W;
  q.w_to = e2.W;
  q.w_from_shifted = e1.W;
  return q;
}

TransferMatrix propagate_ordered(const KernelFn& kernel_fn, double x1, double x2, int n_steps) {
  if (n_steps < 1) throw DomainError("propagate_ordered: n_steps must be >= 1");
  TransferMatrix q;
  q.x_from = x1;
  q.x_to = x2;
  if (x1 == x2) return q;
  const double h = (x2 - x1) / n_steps;
  Mat2 acc = Mat2::Identity();
  for (int j = 0; j < n_steps; ++j) {
    const double xm = x1 + (j + 0.5) * h;
    acc = expm2(kernel_fn(xm).u * h) * acc;
  }
  q.m = acc;
  return q;
}

namespace {

std::vector<Mat2> sample_kernel(const KernelFn& kernel_fn, double x1, double h, int n) {
  std::vector<Mat2> u;
  u.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) u.push_back(kernel_fn(x1 + i * h).u);
  return u;
}

Mat2 trapezoid(const std::vector<Mat2>& u, double h) {
  Mat2 s = 0.5 * (u.front() + u.back());
  for (std::size_t i = 1; i + 1 < u.size(); ++i) s += u[i];
  return s * h;
}

}  // namespace

TransferMatrix propagate_series(const KernelFn& kernel_fn, double x1, double x2, int order,
                                int n_quad) {
  if (order < 1 || order > 4) throw DomainError("propagate_series: order must be in 1..4");
  if (n_quad < 2) throw DomainError("propagate_series: n_quad must be >= 2");
  TransferMatrix q;
  q.x_from = x1;
  q.x_to = x2;
  if (x1 == x2) return q;
  const double h = (x2 - x1) / (n_quad - 1);
  const std::vector<Mat2> u = sample_kernel(kernel_fn, x1, h, n_quad);

  // level[i] = S_m(y_i), S_m(y) = int_{x1}^{y} U(s) S_{m-1}(s) ds
  std::vector<Mat2> prev(u.size(), Mat2::Identity());
  std::vector<Mat2> next(u.size());
  Mat2 total = Mat2::Identity();
  for (int m = 1; m <= order; ++m) {
    next[0].setZero();
    for (std::size_t i = 1; i < u.size(); ++i) {
      next[i] = next[i - 1] + (0.5 * h) * (u[i] * prev[i] + u[i - 1] * prev[i - 1]);
    }
    total += next.back();
    std::swap(prev, next);
  }
  q.m = total;
  return q;
}

TransferMatrix propagate_magnus1(const KernelFn& kernel_fn, double x1, double x2, int n_quad) {
  if (n_quad < 2) throw DomainError("propagate_magnus1: n_quad must be >= 2");
  TransferMatrix q;
  q.x_from = x1;
  q.x_to = x2;
  if (x1 == x2) return q;
  const double h = (x2 - x1) / (n_quad - 1);
  q.m = expm2(trapezoid(sample_kernel(kernel_fn, x1, h, n_quad), h));
  return q;
}

TransferMatrix propagate_diagonal(const KernelFn& kernel_fn, double x1, double x2, int n_quad) {
  if (n_quad < 2) throw DomainError("propagate_diagonal: n_quad must be >= 2");
  TransferMatrix q;
  q.x_from = x1;
  q.x_to = x2;
  if (x1 == x2) return q;
  const double h = (x2 - x1) / (n_quad - 1);
  const Mat2 integral = trapezoid(sample_kernel(kernel_fn, x1, h, n_quad), h);
  q.m << std::exp(integral(0, 0)), 0.0, 0.0, std::exp(integral(1, 1));
  return q;
}

TransferMatrix with_wronskians(TransferMatrix q, const BasisFamily& family,
                               const EigenvalueFunction& kf) {
  q.w_from = family.evaluate(q.x_from, kf.k(q.x_from)).W;
  q.w_to = family.evaluate(q.x_to, kf.k(q.x_to)).W;
  q.w_from_shifted = family.evaluate(q.x_to, kf.k(q.x_from)).W;
  return q;
}

namespace {

// Bisection on a sign change of g between a and b (g(a) g(b) <= 0).
template <typename G>
double bisect(G&& g, double a, double b) {
  double ga = g(a);
  for (int i = 0; i < 200 && std::abs(b - a) > 1e-15 * std::max(1.0, std::abs(a)); ++i) {
    const double m = 0.5 * (a + b);
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

void check_path(const BasisFamily& family, const EigenvalueFunction& kf, double x1, double x2,
                int samples) {
  if (samples < 1) samples = 1;
  const double lo = std::min(x1, x2);
  const double hi = std::max(x1, x2);
  const double k_scale = std::max(1.0, kf.sup_abs_k(lo, hi));

  auto raise_zero = [&](double x) {
    if (family.tag() == FamilyTag::airy) throw SingularWronskian(x, kf.k(x), std::abs(kf.k(x)));
    throw TurningPoint(x, family.name());
  };

  if (family.wronskian_vanishes_with_k()) {
    const double tol = kTurningPointRelTol * k_scale;
    double xa = lo;
    double ka = kf.k(xa);
    if (std::abs(ka) <= tol) raise_zero(xa);
    for (int i = 1; i <= samples; ++i) {
      const double xb = lo + (hi - lo) * i / samples;
      const double kb = kf.k(xb);
      if (std::abs(kb) <= tol) raise_zero(xb);
      if ((ka < 0.0) != (kb < 0.0)) raise_zero(bisect([&](double x) { return kf.k(x); }, xa, xb));
      xa = xb;
      ka = kb;
    }
  } else if (family.tag() == FamilyTag::bessel_order) {
    // k(x) must stay clear of the integers
    double xa = lo;
    double ka = kf.k(xa);
    if (specfun::near_integer(ka)) throw NearIntegerOrder(xa, ka);
    for (int i = 1; i <= samples; ++i) {
      const double xb = lo + (hi - lo) * i / samples;
      const double kb = kf.k(xb);
      if (specfun::near_integer(kb)) throw NearIntegerOrder(xb, kb);
      if (std::floor(ka) != std::floor(kb)) {
        const double n = std::max(std::floor(ka), std::floor(kb));
        const double xc = bisect([&](double x) { return kf.k(x) - n; }, xa, xb);
        throw NearIntegerOrder(xc, kf.k(xc));
      }
      xa = xb;
      ka = kb;
    }
  } else if (family.tag() == FamilyTag::bessel_arg) {
    for (int i = 0; i <= samples; ++i) {
      const double x = lo + (hi - lo) * i / samples;
      if (!(x * kf.k(x) > 0.0)) {
        throw DomainError("bessel_arg basis requires x*k(x) > 0; violated at x = " +
                          std::to_string(x));
      }
    }
  }
}

TransferMatrix propagate(const BasisFamily& family, const EigenvalueFunction& kf, double x1,
                         double x2, int n_steps, const PropagationOptions& opts) {
  const double lo = std::min(x1, x2);
  const double hi = std::max(x1, x2);
  const KernelFn fn = make_kernel_fn(family, kf, std::max(1.0, kf.sup_abs_k(lo, hi)));
  TransferMatrix q;
  switch (opts.method) {
    case Method::ordered: q = propagate_ordered(fn, x1, x2, n_steps); break;
    case Method::magnus1: q = propagate_magnus1(fn, x1, x2, n_steps + 1); break;
    case Method::diagonal: q = propagate_diagonal(fn, x1, x2, n_steps + 1); break;
    case Method::series: q = propagate_series(fn, x1, x2, opts.series_order, n_steps + 1); break;
  }
  return with_wronskians(q, family, kf);
}

}  // namespace dtmm
