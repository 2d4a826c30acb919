#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "dtmm/types.hpp"

namespace dtmm {

/// A smooth eigenvalue function k(x) together with its derivative on a closed interval.
///
/// The derivative is supplied explicitly rather than differenced internally; the kernel matrix
/// carries k' as a factor in every entry, so an inconsistent k' shows up as a wrong solution.
/// `consistency_defect` measures how far a supplied k' is from a central difference of k.
class EigenvalueFunction {
 public:
  using Fn = std::function<double(double)>;

  EigenvalueFunction(Fn k, Fn k_prime, Interval domain, std::string description);

  [[nodiscard]] double k(double x) const { return k_(x); }
  [[nodiscard]] double k_prime(double x) const { return k_prime_(x); }
  [[nodiscard]] double operator()(double x) const { return k_(x); }
  [[nodiscard]] const Interval& domain() const { return domain_; }
  [[nodiscard]] const std::string& description() const { return description_; }

  /// Same function restricted (or extended) to another interval.
  [[nodiscard]] EigenvalueFunction with_domain(Interval domain) const;

  /// sup |k| and sup |k'| estimated on `samples` uniformly spaced points of [lo, hi].
  [[nodiscard]] double sup_abs_k(double lo, double hi, int samples = 257) const;
  [[nodiscard]] double sup_abs_k_prime(double lo, double hi, int samples = 257) const;

  /// max over sampled interior points of
  /// |k'(x) - (k(x+h) - k(x-h))/(2h)| / max(1, |k'(x)|), h = 1e-5.
  [[nodiscard]] double consistency_defect(int samples = 64) const;

  // Built-in profiles. Analytic profiles are defined on the whole real line unless a domain is
  // given.
  static EigenvalueFunction constant(double k0);
  /// k(x) = k0 + slope * x
  static EigenvalueFunction linear(double k0, double slope);
  /// k(x) = k0 + amplitude * sin(wavenumber * x + phase)
  static EigenvalueFunction sinusoidal(double k0, double amplitude, double wavenumber,
                                       double phase = 0.0);
  /// k(x) = k1 + (k2 - k1) * (1 + tanh((x - center) / width)) / 2
  static EigenvalueFunction tanh_ramp(double k1, double k2, double center, double width);
  /// Natural cubic spline through (xs[i], ks[i]); k' is the derivative of the interpolant.
  /// Domain is [xs.front(), xs.back()].
  static EigenvalueFunction tabulated(std::vector<double> xs, std::vector<double> ks);

 private:
  Fn k_;
  Fn k_prime_;
  Interval domain_;
  std::string description_;
};

/// Natural cubic spline with value and first-derivative evaluation.
class CubicSpline {
 public:
  CubicSpline(std::vector<double> xs, std::vector<double> ys);

  [[nodiscard]] double value(double x) const;
  [[nodiscard]] double derivative(double x) const;
  [[nodiscard]] double front() const { return xs_.front(); }
  [[nodiscard]] double back() const { return xs_.back(); }

 private:
  [[nodiscard]] std::size_t segment(double x) const;

  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> m_;  // second derivatives at the knots
};

}  // namespace dtmm
