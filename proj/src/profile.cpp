#include "dtmm/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dtmm/errors.hpp"

namespace dtmm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

EigenvalueFunction::EigenvalueFunction(Fn k, Fn k_prime, Interval domain, std::string description)
    : k_(std::move(k)),
      k_prime_(std::move(k_prime)),
      domain_(domain),
      description_(std::move(description)) {
  if (!(domain_.lo <= domain_.hi)) {
    throw DomainError("eigenvalue function: empty domain");
  }
}

EigenvalueFunction EigenvalueFunction::with_domain(Interval domain) const {
  return {k_, k_prime_, domain, description_};
}

double EigenvalueFunction::sup_abs_k(double lo, double hi, int samples) const {
  double s = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / std::max(1, samples - 1);
    s = std::max(s, std::abs(k_(x)));
  }
  return s;
}

double EigenvalueFunction::sup_abs_k_prime(double lo, double hi, int samples) const {
  double s = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * i / std::max(1, samples - 1);
    s = std::max(s, std::abs(k_prime_(x)));
  }
  return s;
}

double EigenvalueFunction::consistency_defect(int samples) const {
  constexpr double h = 1e-5;
  double lo = domain_.lo;
  double hi = domain_.hi;
  if (!std::isfinite(lo)) lo = std::isfinite(hi) ? hi - 10.0 : -10.0;
  if (!std::isfinite(hi)) hi = lo + 20.0;
  lo += 2 * h;
  hi -= 2 * h;
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (hi - lo) * (i + 0.5) / samples;
    const double fd = (k_(x + h) - k_(x - h)) / (2 * h);
    const double kp = k_prime_(x);
    worst = std::max(worst, std::abs(kp - fd) / std::max(1.0, std::abs(kp)));
  }
  return worst;
}

EigenvalueFunction EigenvalueFunction::constant(double k0) {
  return {[k0](double) { return k0; }, [](double) { return 0.0; }, {-kInf, kInf}, "constant"};
}

EigenvalueFunction EigenvalueFunction::linear(double k0, double slope) {
  return {[=](double x) { return k0 + slope * x; }, [slope](double) { return slope; },
          {-kInf, kInf}, "linear"};
}

EigenvalueFunction EigenvalueFunction::sinusoidal(double k0, double amplitude, double wavenumber,
                                                  double phase) {
  return {[=](double x) { return k0 + amplitude * std::sin(wavenumber * x + phase); },
          [=](double x) { return amplitude * wavenumber * std::cos(wavenumber * x + phase); },
          {-kInf, kInf}, "sinusoidal"};
}

EigenvalueFunction EigenvalueFunction::tanh_ramp(double k1, double k2, double center,
                                                 double width) {
  if (!(width > 0.0)) throw DomainError("tanh profile: width must be positive");
  return {[=](double x) { return k1 + 0.5 * (k2 - k1) * (1.0 + std::tanh((x - center) / width)); },
          [=](double x) {
            const double c = std::cosh((x - center) / width);
            return 0.5 * (k2 - k1) / (width * c * c);
          },
          {-kInf, kInf}, "tanh"};
}

EigenvalueFunction EigenvalueFunction::tabulated(std::vector<double> xs, std::vector<double> ks) {
  auto spline = std::make_shared<const CubicSpline>(std::move(xs), std::move(ks));
  const Interval domain{spline->front(), spline->back()};
  return {[spline](double x) { return spline->value(x); },
          [spline](double x) { return spline->derivative(x); }, domain, "tabulated"};
}

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : xs_(std::move(xs)), ys_(std::move(ys)) {
  const std::size_t n = xs_.size();
  if (n < 2 || ys_.size() != n) {
    throw DomainError("tabulated profile: need at least two (x, k) pairs of equal length");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(xs_[i] > xs_[i - 1])) throw DomainError("tabulated profile: x must be strictly increasing");
  }
  m_.assign(n, 0.0);
  if (n == 2) return;
  // Thomas algorithm for the natural-spline moment system.
  std::vector<double> c(n, 0.0);
  std::vector<double> d(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = xs_[i] - xs_[i - 1];
    const double h1 = xs_[i + 1] - xs_[i];
    const double a = h0 / 6.0;
    const double b = (h0 + h1) / 3.0;
    const double cc = h1 / 6.0;
    const double rhs = (ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0;
    const double denom = b - a * c[i - 1];
    c[i] = cc / denom;
    d[i] = (rhs - a * d[i - 1]) / denom;
  }
  for (std::size_t i = n - 2; i >= 1; --i) {
    m_[i] = d[i] - c[i] * m_[i + 1];
  }
}

std::size_t CubicSpline::segment(double x) const {
  if (x < xs_.front() || x > xs_.back() || !std::isfinite(x)) {
    throw RangeError("tabulated profile: x = " + std::to_string(x) + " outside table range");
  }
  auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  std::size_t i = it == xs_.begin() ? 0 : static_cast<std::size_t>(it - xs_.begin()) - 1;
  return std::min(i, xs_.size() - 2);
}

double CubicSpline::value(double x) const {
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double a = (xs_[i + 1] - x) / h;
  const double b = (x - xs_[i]) / h;
  return a * ys_[i] + b * ys_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

double CubicSpline::derivative(double x) const {
  const std::size_t i = segment(x);
  const double h = xs_[i + 1] - xs_[i];
  const double a = (xs_[i + 1] - x) / h;
  const double b = (x - xs_[i]) / h;
  return (ys_[i + 1] - ys_[i]) / h - (3 * a * a - 1) * h * m_[i] / 6.0 +
         (3 * b * b - 1) * h * m_[i + 1] / 6.0;
}

}  // namespace dtmm
