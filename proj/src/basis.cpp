#include "dtmm/basis.hpp"

#include <cmath>
#include <numbers>

#include "dtmm/errors.hpp"
#include "dtmm/specfun.hpp"

namespace dtmm {

namespace {

cplx wronskian(const BasisEval& e) { return e.A * e.B_x - e.A_x * e.B; }

}  // namespace

std::string to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::wave: return "wave";
    case FamilyTag::airy: return "airy";
    case FamilyTag::bessel_arg: return "bessel_arg";
    case FamilyTag::bessel_order: return "bessel_order";
    case FamilyTag::euler_cauchy: return "euler_cauchy";
    case FamilyTag::custom: return "custom";
  }
  return "unknown";
}

BasisFamily BasisFamily::wave() { return BasisFamily(FamilyTag::wave); }
BasisFamily BasisFamily::airy() { return BasisFamily(FamilyTag::airy); }
BasisFamily BasisFamily::euler_cauchy() { return BasisFamily(FamilyTag::euler_cauchy); }

BasisFamily BasisFamily::bessel_arg(double nu) {
  BasisFamily f(FamilyTag::bessel_arg);
  f.nu_ = nu;
  return f;
}

BasisFamily BasisFamily::bessel_order(BesselPairKind pair) {
  BasisFamily f(FamilyTag::bessel_order);
  f.pair_ = pair;
  return f;
}

BasisFamily BasisFamily::custom(BasisFn a, BasisFn b, std::string name) {
  BasisFamily f(FamilyTag::custom);
  f.custom_ = std::make_shared<const Custom>(Custom{std::move(a), std::move(b), std::move(name)});
  return f;
}

std::string BasisFamily::name() const {
  if (tag_ == FamilyTag::custom) return custom_->name;
  return to_string(tag_);
}

bool BasisFamily::wronskian_vanishes_with_k() const {
  return tag_ == FamilyTag::wave || tag_ == FamilyTag::airy || tag_ == FamilyTag::euler_cauchy;
}

BasisEval BasisFamily::evaluate(double x, double k) const {
  switch (tag_) {
    case FamilyTag::wave: return eval_wave(x, k);
    case FamilyTag::airy: return eval_airy(x, k);
    case FamilyTag::bessel_arg: return eval_bessel_arg(x, k, nu_);
    case FamilyTag::bessel_order: return eval_bessel_order(x, k, pair_);
    case FamilyTag::euler_cauchy: return eval_euler_cauchy(x, k);
    case FamilyTag::custom: return eval_custom_fd(custom_->a, custom_->b, x, k);
  }
  throw Error("unknown basis family");
}

std::pair<cplx, cplx> BasisFamily::values(double x, double k) const {
  switch (tag_) {
    case FamilyTag::wave: {
      const cplx a = std::exp(-I * (x * k));
      return {a, 1.0 / a};
    }
    case FamilyTag::airy: {
      const auto p = specfun::airy(x * k);
      return {p.ai.value, p.bi.value};
    }
    case FamilyTag::euler_cauchy: {
      if (x <= 0.0) throw DomainError("euler_cauchy basis requires x > 0");
      const double p = std::pow(x, k);
      return {p, 1.0 / p};
    }
    case FamilyTag::custom: return {custom_->a(x, k), custom_->b(x, k)};
    default: {
      const BasisEval e = evaluate(x, k);
      return {e.A, e.B};
    }
  }
}

BasisEval eval_wave(double x, double k) {
  BasisEval e;
  e.A = std::exp(-I * (x * k));
  e.B = std::exp(I * (x * k));
  e.A_x = -I * k * e.A;
  e.B_x = I * k * e.B;
  e.A_k = -I * x * e.A;
  e.B_k = I * x * e.B;
  // d/dk (-ik A) = -iA + (-ik)(-ix)A
  e.A_xk = (-I - x * k) * e.A;
  e.B_xk = (I - x * k) * e.B;
  e.W = wronskian(e);
  return e;
}

BasisEval eval_airy(double x, double k) {
  const double z = x * k;
  const auto p = specfun::airy(z);
  BasisEval e;
  e.A = p.ai.value;
  e.B = p.bi.value;
  e.A_x = k * p.ai.derivative;
  e.B_x = k * p.bi.derivative;
  e.A_k = x * p.ai.derivative;
  e.B_k = x * p.bi.derivative;
  // d/dk [k Ai'(xk)] = Ai'(z) + kx Ai''(z) = Ai'(z) + z^2 Ai(z)
  e.A_xk = p.ai.derivative + z * z * p.ai.value;
  e.B_xk = p.bi.derivative + z * z * p.bi.value;
  e.W = wronskian(e);
  return e;
}

BasisEval eval_bessel_arg(double x, double k, double nu) {
  const double z = x * k;
  if (!(z > 0.0)) {
    throw DomainError("bessel_arg basis requires x*k > 0 (x = " + std::to_string(x) +
                      ", k = " + std::to_string(k) + ")");
  }
  const auto p = specfun::bessel_jn(nu, z);
  // z G'' + G' = -(z - nu^2/z) G for any cylinder function G
  const double mixed = nu * nu / z - z;
  BasisEval e;
  e.A = p.j.value;
  e.B = p.n.value;
  e.A_x = k * p.j.derivative;
  e.B_x = k * p.n.derivative;
  e.A_k = x * p.j.derivative;
  e.B_k = x * p.n.derivative;
  e.A_xk = mixed * p.j.value;
  e.B_xk = mixed * p.n.value;
  e.W = wronskian(e);
  return e;
}

BasisEval eval_bessel_order(double x, double k, BesselPairKind pair) {
  if (!(x > 0.0)) throw DomainError("bessel_order basis requires x > 0");
  if (specfun::near_integer(k)) throw NearIntegerOrder(x, k);
  BasisEval e;
  if (pair == BesselPairKind::j_n) {
    const auto p = specfun::bessel_jn(k, x);
    const auto d = specfun::bessel_dorder(k, x);
    e.A = p.j.value;
    e.B = p.n.value;
    e.A_x = p.j.derivative;
    e.B_x = p.n.derivative;
    e.A_k = d.dj.value;
    e.B_k = d.dn.value;
    e.A_xk = d.dj.derivative;
    e.B_xk = d.dn.derivative;
  } else {
    const auto jp = specfun::bessel_j(k, x);
    const auto jm = specfun::bessel_j(-k, x);
    const auto dp = specfun::bessel_dorder(k, x);
    const auto dm = specfun::bessel_dorder(-k, x);
    e.A = jp.value;
    e.B = jm.value;
    e.A_x = jp.derivative;
    e.B_x = jm.derivative;
    // B(k) = J_{-k}: chain rule flips the sign of the order derivative
    e.A_k = dp.dj.value;
    e.B_k = -dm.dj.value;
    e.A_xk = dp.dj.derivative;
    e.B_xk = -dm.dj.derivative;
  }
  e.W = wronskian(e);
  return e;
}

BasisEval eval_euler_cauchy(double x, double k) {
  if (!(x > 0.0)) throw DomainError("euler_cauchy basis requires x > 0");
  const double lx = std::log(x);
  const double a = std::exp(k * lx);
  const double b = 1.0 / a;
  BasisEval e;
  e.A = a;
  e.B = b;
  e.A_x = k * a / x;
  e.B_x = -k * b / x;
  e.A_k = lx * a;
  e.B_k = -lx * b;
  e.A_xk = a / x * (1.0 + k * lx);
  e.B_xk = b / x * (k * lx - 1.0);
  e.W = wronskian(e);
  return e;
}

BasisEval eval_custom_fd(const BasisFn& a, const BasisFn& b, double x, double k) {
  const double hx = 1e-6 * std::max(1.0, std::abs(x));
  const double hk = 1e-6 * std::max(1.0, std::abs(k));
  const double mx = 1e-4 * std::max(1.0, std::abs(x));
  const double mk = 1e-4 * std::max(1.0, std::abs(k));

  auto partials = [&](const BasisFn& g, cplx& v, cplx& gx, cplx& gk, cplx& gxk) {
    v = g(x, k);
    gx = (g(x + hx, k) - g(x - hx, k)) / (2.0 * hx);
    gk = (g(x, k + hk) - g(x, k - hk)) / (2.0 * hk);
    auto mixed = [&](double sx, double sk) {
      return (g(x + sx, k + sk) - g(x + sx, k - sk) - g(x - sx, k + sk) + g(x - sx, k - sk)) /
             (4.0 * sx * sk);
    };
    // one Richardson step removes the O(h^2) term of the four-point stencil
    gxk = (4.0 * mixed(mx, mk) - mixed(2.0 * mx, 2.0 * mk)) / 3.0;
  };

  BasisEval e;
  partials(a, e.A, e.A_x, e.A_k, e.A_xk);
  partials(b, e.B, e.B_x, e.B_k, e.B_xk);
  e.W = wronskian(e);
  return e;
}

}  // namespace dtmm
