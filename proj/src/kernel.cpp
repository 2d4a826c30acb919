#include "dtmm/kernel.hpp"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/bessel.hpp>

#include "dtmm/errors.hpp"
#include "dtmm/propagate.hpp"
#include "dtmm/specfun.hpp"

namespace dtmm {

namespace {

constexpr double kPi = std::numbers::pi;

KernelMatrix make(double x, cplx u11, cplx u12, cplx u21, cplx u22) {
  KernelMatrix m;
  m.x = x;
  m.u << u11, u12, u21, u22;
  return m;
}

void check_turning_point(double x, double k, double k_scale, const char* family) {
  if (std::abs(k) <= kTurningPointRelTol * std::max(1.0, k_scale)) throw TurningPoint(x, family);
}

}  // namespace

KernelMatrix kernel_generic(const BasisFamily& family, double x, double k, double k_prime) {
  const BasisEval e = family.evaluate(x, k);
  if (e.wronskian_degenerate(kWronskianRelTol) || !std::isfinite(std::abs(e.W))) {
    throw SingularWronskian(x, k, std::abs(e.W));
  }
  const cplx s = k_prime / e.W;
  return make(x, s * (e.A_xk * e.B - e.A_k * e.B_x), s * (e.B_xk * e.B - e.B_k * e.B_x),
              s * (e.A_k * e.A_x - e.A_xk * e.A), s * (e.A_x * e.B_k - e.A * e.B_xk));
}

KernelMatrix kernel_generic(const BasisFamily& family, const EigenvalueFunction& kf, double x) {
  return kernel_generic(family, x, kf.k(x), kf.k_prime(x));
}

KernelMatrix kernel_wave(double x, double k, double k_prime, double k_scale) {
  check_turning_point(x, k, k_scale, "wave");
  const cplx s = k_prime / (2.0 * k);
  const cplx phase = std::exp(2.0 * I * (x * k));
  const cplx diag = 2.0 * I * (x * k);
  return make(x, s * (-1.0 + diag), s * phase, s / phase, s * (-1.0 - diag));
}

KernelMatrix kernel_wave(const EigenvalueFunction& kf, double x, double k_scale) {
  return kernel_wave(x, kf.k(x), kf.k_prime(x), k_scale);
}

KernelMatrix kernel_airy(double x, double k, double k_prime) {
  if (std::abs(k) <= kTurningPointRelTol) throw SingularWronskian(x, k, std::abs(k) / kPi);
  const double z = k * x;
  const auto p = specfun::airy(z);
  const double ai = p.ai.value;
  const double bi = p.bi.value;
  const double aip = p.ai.derivative;
  const double bip = p.bi.derivative;
  const double s = kPi * k_prime / k;
  const double z2 = z * z;
  return make(x, s * (z2 * ai * bi + aip * (bi - z * bip)), s * (bip * (bi - z * bip) + z2 * bi * bi),
              s * (aip * (z * aip - ai) - z2 * ai * ai), -s * (z2 * ai * bi + bip * (ai - z * aip)));
}

KernelMatrix kernel_airy(const EigenvalueFunction& kf, double x) {
  return kernel_airy(x, kf.k(x), kf.k_prime(x));
}

namespace {

struct CylinderStencil {
  double first;   // G_{nu-1} - G_{nu+1} = 2 G'
  double second;  // G_{nu-2} - 2 G_nu + G_{nu+2} = 4 G''
  double value;
};

template <typename G>
CylinderStencil stencil(G&& g, double nu, double z) {
  const double m2 = g(nu - 2.0, z);
  const double m1 = g(nu - 1.0, z);
  const double c0 = g(nu, z);
  const double p1 = g(nu + 1.0, z);
  const double p2 = g(nu + 2.0, z);
  return {m1 - p1, m2 - 2.0 * c0 + p2, c0};
}

std::pair<CylinderStencil, CylinderStencil> bessel_stencils(double x, double k, double nu) {
  const double z = x * k;
  if (!(z > 0.0)) throw DomainError("bessel_arg kernel requires x*k > 0");
  if (z > specfun::kBesselMaxArg || std::abs(nu) > specfun::kBesselMaxAbsOrder) {
    throw RangeError("bessel_arg kernel: argument outside working range");
  }
  namespace bm = boost::math;
  return {stencil([](double v, double t) { return bm::cyl_bessel_j(v, t); }, nu, z),
          stencil([](double v, double t) { return bm::cyl_neumann(v, t); }, nu, z)};
}

}  // namespace

KernelMatrix kernel_bessel_arg(double x, double k, double k_prime, double nu) {
  const auto [j, n] = bessel_stencils(x, k, nu);
  const double z = x * k;
  const double pj = z * j.second + 2.0 * j.first;  // 4 (z J'' + J')
  const double pn = z * n.second + 2.0 * n.first;
  const double s = x * kPi * k_prime / 8.0;
  return make(x, s * (pj * n.value - z * j.first * n.first), s * (pn * n.value - z * n.first * n.first),
              s * (z * j.first * j.first - pj * j.value), s * (z * j.first * n.first - pn * j.value));
}

KernelMatrix kernel_bessel_arg_printed(double x, double k, double k_prime, double nu) {
  const auto [j, n] = bessel_stencils(x, k, nu);
  const double z = x * k;
  const double pj = z * j.second + 2.0 * j.first;
  const double pn = z * n.second + 2.0 * n.first;
  const double s = x * kPi * k_prime / 2.0;
  return make(x, s * (pj * n.value - z * j.first * n.first), -s * (pn * n.value + z * n.first * n.first),
              s * (pj * j.value + z * j.first * j.first), -s * (pn * j.value - z * j.first * n.first));
}

KernelMatrix kernel_bessel_arg(const EigenvalueFunction& kf, double nu, double x) {
  return kernel_bessel_arg(x, kf.k(x), kf.k_prime(x), nu);
}

KernelMatrix kernel_bessel_order(double x, double k, double k_prime) {
  if (!(x > 0.0)) throw DomainError("bessel_order kernel requires x > 0");
  if (specfun::near_integer(k)) throw NearIntegerOrder(x, k);
  const auto p = specfun::bessel_jn(k, x);
  const auto d = specfun::bessel_dorder(k, x);
  const double j = p.j.value, jx = p.j.derivative;
  const double n = p.n.value, nx = p.n.derivative;
  const double jk = d.dj.value, jxk = d.dj.derivative;
  const double nk = d.dn.value, nxk = d.dn.derivative;
  const double s = kPi * x * k_prime / 2.0;
  return make(x, s * (jxk * n - jk * nx), s * (nxk * n - nk * nx), s * (jk * jx - jxk * j),
              s * (jx * nk - j * nxk));
}

KernelMatrix kernel_bessel_order(const EigenvalueFunction& kf, double x) {
  return kernel_bessel_order(x, kf.k(x), kf.k_prime(x));
}

KernelMatrix kernel_euler_cauchy(double x, double k, double k_prime, double k_scale) {
  if (!(x > 0.0)) throw DomainError("euler_cauchy kernel requires x > 0");
  check_turning_point(x, k, k_scale, "euler_cauchy");
  const double s = -k_prime / (2.0 * k);
  const double lx = std::log(x);
  const double p = std::exp(2.0 * k * lx);
  return make(x, s * (1.0 + 2.0 * k * lx), -s / p, -s * p, s * (1.0 - 2.0 * k * lx));
}

KernelMatrix kernel_euler_cauchy(const EigenvalueFunction& kf, double x, double k_scale) {
  return kernel_euler_cauchy(x, kf.k(x), kf.k_prime(x), k_scale);
}

KernelMatrix kernel_fd_limit(const BasisFamily& family, double k1, double dk, double X,
                             double dx) {
  if (!(dx > 0.0)) throw DomainError("kernel_fd_limit: dx must be positive");
  const TransferMatrix q = jump_transfer(family, k1, k1 + dk, X);
  KernelMatrix m;
  m.x = X;
  m.u = (q.m - Mat2::Identity()) / dx;
  return m;
}

KernelMatrix kernel(const BasisFamily& family, const EigenvalueFunction& kf, double x,
                    double k_scale) {
  const double k = kf.k(x);
  const double kp = kf.k_prime(x);
  switch (family.tag()) {
    case FamilyTag::wave: return kernel_wave(x, k, kp, k_scale);
    case FamilyTag::airy: return kernel_airy(x, k, kp);
    case FamilyTag::bessel_arg: return kernel_bessel_arg(x, k, kp, family.nu());
    case FamilyTag::bessel_order:
      if (family.pair() == BesselPairKind::j_n) return kernel_bessel_order(x, k, kp);
      return kernel_generic(family, x, k, kp);
    case FamilyTag::euler_cauchy: return kernel_euler_cauchy(x, k, kp, k_scale);
    case FamilyTag::custom: return kernel_generic(family, x, k, kp);
  }
  throw Error("unknown basis family");
}

KernelFn make_kernel_fn(const BasisFamily& family, const EigenvalueFunction& kf, double k_scale) {
  return [family, kf, k_scale](double x) { return kernel(family, kf, x, k_scale); };
}

double trace_identity_residual(const BasisFamily& family, const EigenvalueFunction& kf, double x,
                               const KernelMatrix& u) {
  const double k = kf.k(x);
  const double h = 1e-5 * std::max(1.0, std::abs(k));
  const cplx w_plus = family.evaluate(x, k + h).W;
  const cplx w_minus = family.evaluate(x, k - h).W;
  const cplx dlogw = std::log(w_plus / w_minus) / (2.0 * h);
  return std::abs(u.trace() + kf.k_prime(x) * dlogw);
}

}  // namespace dtmm
