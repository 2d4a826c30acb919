#include "dtmm/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "dtmm/errors.hpp"

namespace dtmm::oracle {

namespace {

void guard_origin(double x, const char* family) {
  if (x == 0.0) throw DomainError(std::string(family) + " equation is singular at x = 0");
}

}  // namespace

OdeProblem ode_from_family(const BasisFamily& family, const EigenvalueFunction& kf) {
  OdeProblem p;
  p.domain = kf.domain();
  p.description = family.name() + " / " + kf.description();
  switch (family.tag()) {
    case FamilyTag::wave:
      p.rhs = [kf](double x, cplx f, cplx) {
        const double k = kf.k(x);
        return -k * k * f;
      };
      break;
    case FamilyTag::airy:
      p.rhs = [kf](double x, cplx f, cplx) {
        const double k = kf.k(x);
        return k * k * k * x * f;
      };
      break;
    case FamilyTag::bessel_arg:
      p.rhs = [kf, nu = family.nu()](double x, cplx f, cplx fp) {
        guard_origin(x, "bessel_arg");
        const double k = kf.k(x);
        return -fp / x - (k * k - nu * nu / (x * x)) * f;
      };
      break;
    case FamilyTag::bessel_order:
      p.rhs = [kf](double x, cplx f, cplx fp) {
        guard_origin(x, "bessel_order");
        const double k = kf.k(x);
        return -fp / x - (1.0 - k * k / (x * x)) * f;
      };
      break;
    case FamilyTag::euler_cauchy:
      p.rhs = [kf](double x, cplx f, cplx fp) {
        guard_origin(x, "euler_cauchy");
        const double k = kf.k(x);
        return -fp / x + (k * k / (x * x)) * f;
      };
      break;
    case FamilyTag::custom:
      throw DomainError("no extended equation is known for a custom basis family");
  }
  return p;
}

namespace {

using Vec4 = std::array<double, 4>;

// Dormand-Prince 5(4) tableau with Hairer's dense output coefficients.
constexpr double c2 = 0.2, c3 = 0.3, c4 = 0.8, c5 = 8.0 / 9.0;
constexpr double a21 = 0.2;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

Vec4 pack(cplx f, cplx fp) { return {f.real(), f.imag(), fp.real(), fp.imag()}; }

Vec4 derivs(const OdeProblem& prob, double x, const Vec4& y) {
  const cplx f{y[0], y[1]};
  const cplx fp{y[2], y[3]};
  const cplx fpp = prob.rhs(x, f, fp);
  return {y[2], y[3], fpp.real(), fpp.imag()};
}

template <typename... Terms>
Vec4 combine(const Vec4& y, double h, Terms... terms) {
  Vec4 r = y;
  for (std::size_t i = 0; i < 4; ++i) {
    double s = 0.0;
    ((s += terms.first * (*terms.second)[i]), ...);
    r[i] += h * s;
  }
  return r;
}

std::pair<double, const Vec4*> t(double c, const Vec4& v) { return {c, &v}; }

}  // namespace

State DenseSolution::operator()(double x) const {
  if (steps_.empty()) throw DomainError("empty oracle solution");
  const double lo = std::min(x_begin_, x_end_);
  const double hi = std::max(x_begin_, x_end_);
  if (x < lo - 1e-12 * std::max(1.0, std::abs(lo)) || x > hi + 1e-12 * std::max(1.0, std::abs(hi))) {
    throw DomainError("oracle query x = " + std::to_string(x) + " outside integrated range");
  }
  // steps_ are ordered along the integration direction
  const bool forward = x_end_ >= x_begin_;
  auto it = std::partition_point(steps_.begin(), steps_.end(), [&](const Step& s) {
    const double end = s.x0 + s.h;
    return forward ? end < x : end > x;
  });
  if (it == steps_.end()) it = std::prev(steps_.end());
  const double theta = (x - it->x0) / it->h;
  const double theta1 = 1.0 - theta;
  Vec4 y;
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = it->rcont;
    y[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
  }
  return {{y[0], y[1]}, {y[2], y[3]}};
}

DenseSolution integrate(const OdeProblem& prob, double x0, cplx f0, cplx fp0, double x_end,
                        double rtol, double atol, std::span<const double> stops) {
  if (!(rtol > 0.0) || !(atol > 0.0)) throw DomainError("integrate: tolerances must be positive");
  DenseSolution sol;
  sol.x_begin_ = x0;
  sol.x_end_ = x_end;
  Vec4 y = pack(f0, fp0);
  if (x_end == x0) {
    sol.steps_.push_back({x0, 0.0, {y, Vec4{}, Vec4{}, Vec4{}, Vec4{}}});
    return sol;
  }
  const double dir = x_end > x0 ? 1.0 : -1.0;

  std::vector<double> marks;
  for (double s : stops) {
    if ((s - x0) * dir > 0.0 && (x_end - s) * dir > 0.0) marks.push_back(s);
  }
  marks.push_back(x_end);
  std::sort(marks.begin(), marks.end(), [dir](double a, double b) { return a * dir < b * dir; });
  marks.erase(std::unique(marks.begin(), marks.end()), marks.end());
  std::size_t next_mark = 0;

  auto scale = [&](std::size_t i, const Vec4& a, const Vec4& b) {
    return atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
  };

  double x = x0;
  Vec4 k1 = derivs(prob, x, y);

  // Initial step from the size of y and y'.
  double d0 = 0.0, dd = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    const double sc = atol + rtol * std::abs(y[i]);
    d0 += (y[i] / sc) * (y[i] / sc);
    dd += (k1[i] / sc) * (k1[i] / sc);
  }
  double h = (d0 < 1e-10 || dd < 1e-10) ? 1e-6 : 0.01 * std::sqrt(d0 / dd);
  h = std::min(h, std::abs(x_end - x0)) * dir;

  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0;
  constexpr long kMaxSteps = 20'000'000;
  long n_steps = 0;
  double err_old = 1e-4;

  while (next_mark < marks.size()) {
    if (++n_steps > kMaxSteps) throw StepSizeUnderflow(x);
    const double target = marks[next_mark];
    bool hit = false;
    if ((x + h - target) * dir >= 0.0) {
      h = target - x;
      hit = true;
    }
    if (std::abs(h) < 1e-14 * std::max(1.0, std::abs(x))) throw StepSizeUnderflow(x);

    const Vec4 y2 = combine(y, h, t(a21, k1));
    const Vec4 k2 = derivs(prob, x + c2 * h, y2);
    const Vec4 y3 = combine(y, h, t(a31, k1), t(a32, k2));
    const Vec4 k3 = derivs(prob, x + c3 * h, y3);
    const Vec4 y4 = combine(y, h, t(a41, k1), t(a42, k2), t(a43, k3));
    const Vec4 k4 = derivs(prob, x + c4 * h, y4);
    const Vec4 y5 = combine(y, h, t(a51, k1), t(a52, k2), t(a53, k3), t(a54, k4));
    const Vec4 k5 = derivs(prob, x + c5 * h, y5);
    const Vec4 y6 = combine(y, h, t(a61, k1), t(a62, k2), t(a63, k3), t(a64, k4), t(a65, k5));
    const Vec4 k6 = derivs(prob, x + h, y6);
    const Vec4 y7 = combine(y, h, t(a71, k1), t(a73, k3), t(a74, k4), t(a75, k5), t(a76, k6));
    const Vec4 k7 = derivs(prob, x + h, y7);

    double err = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                            e7 * k7[i]);
      const double r = e / scale(i, y, y7);
      err += r * r;
    }
    err = std::sqrt(err / 4.0);
    if (!std::isfinite(err)) throw StepSizeUnderflow(x);

    if (err <= 1.0) {
      DenseSolution::Step step;
      step.x0 = x;
      step.h = h;
      for (std::size_t i = 0; i < 4; ++i) {
        const double diff = y7[i] - y[i];
        const double bspl = h * k1[i] - diff;
        step.rcont[0][i] = y[i];
        step.rcont[1][i] = diff;
        step.rcont[2][i] = bspl;
        step.rcont[3][i] = diff - h * k7[i] - bspl;
        step.rcont[4][i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] +
                                d7 * k7[i]);
      }
      sol.steps_.push_back(step);
      x = hit ? target : x + h;
      y = y7;
      k1 = k7;
      if (hit) ++next_mark;
      // PI step control
      const double fac = std::clamp(kSafety * std::pow(err, -0.7 / 5.0) *
                                        std::pow(err_old, 0.4 / 5.0),
                                    kFacMin, kFacMax);
      err_old = std::max(err, 1e-4);
      h *= err == 0.0 ? kFacMax : fac;
    } else {
      ++sol.rejected_;
      h *= std::max(kFacMin, kSafety * std::pow(err, -0.2));
    }
  }
  return sol;
}

double max_relative_deviation(std::span<const SolutionSample> samples, const DenseSolution& ref) {
  double num = 0.0, den = 0.0;
  for (const auto& s : samples) {
    const State r = ref(s.x);
    num = std::max(num, std::abs(s.f - r.f));
    den = std::max(den, std::abs(r.f));
  }
  return den > 0.0 ? num / den : num;
}

double oracle_deviation(const BasisFamily& family, const EigenvalueFunction& kf,
                        std::span<const SolutionSample> samples, double x0, cplx f0, cplx fp0,
                        double rtol, double atol) {
  if (samples.empty()) return 0.0;
  const OdeProblem prob = ode_from_family(family, kf);
  std::vector<double> xs;
  xs.reserve(samples.size());
  for (const auto& s : samples) xs.push_back(s.x);
  std::vector<SolutionSample> below, above;
  for (const auto& s : samples) (s.x < x0 ? below : above).push_back(s);

  double num = 0.0, den = 0.0;
  auto accumulate = [&](const std::vector<SolutionSample>& part, double end) {
    if (part.empty()) return;
    const DenseSolution ref = integrate(prob, x0, f0, fp0, end, rtol, atol, xs);
    for (const auto& s : part) {
      const State r = ref(s.x);
      num = std::max(num, std::abs(s.f - r.f));
      den = std::max(den, std::abs(r.f));
    }
  };
  accumulate(above, above.empty() ? x0 : above.back().x);
  accumulate(below, below.empty() ? x0 : below.front().x);
  return den > 0.0 ? num / den : num;
}

double operator_residual(const OdeProblem& prob, std::span<const SolutionSample> samples) {
  if (samples.size() < 5) throw DomainError("operator_residual needs at least 5 samples");
  const double h = samples[1].x - samples[0].x;
  double worst = 0.0, scale = 1.0;
  for (std::size_t i = 2; i + 2 < samples.size(); ++i) {
    const cplx fm2 = samples[i - 2].f, fm1 = samples[i - 1].f, f0 = samples[i].f;
    const cplx fp1 = samples[i + 1].f, fp2 = samples[i + 2].f;
    const cplx d1 = (fm2 - 8.0 * fm1 + 8.0 * fp1 - fp2) / (12.0 * h);
    const cplx d2 = (-fm2 + 16.0 * fm1 - 30.0 * f0 + 16.0 * fp1 - fp2) / (12.0 * h * h);
    worst = std::max(worst, std::abs(d2 - prob.rhs(samples[i].x, f0, d1)));
    scale = std::max(scale, std::abs(d2));
  }
  return worst / scale;
}

}  // namespace dtmm::oracle
