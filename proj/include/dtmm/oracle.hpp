#pragma once

// Direct integration of each family's extended second-order ODE, used as independent ground
// truth for the transfer-matrix solutions. Complex ODEs are integrated as real 4-systems with
// the Dormand-Prince 5(4) pair and its continuous extension.

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dtmm/basis.hpp"
#include "dtmm/profile.hpp"
#include "dtmm/solve.hpp"
#include "dtmm/types.hpp"

namespace dtmm::oracle {

struct OdeProblem {
  /// f'' as a function of (x, f, f').
  std::function<cplx(double, cplx, cplx)> rhs;
  Interval domain;
  std::string description;
};

/// Extended equation of a built-in family with eigenvalue function k(x):
///   wave          f'' = -k^2 f
///   airy          f'' = k^3 x f
///   bessel_arg    f'' = -f'/x - (k^2 - nu^2/x^2) f
///   bessel_order  f'' = -f'/x - (1 - k^2/x^2) f
///   euler_cauchy  f'' = -f'/x + (k^2/x^2) f
/// The families with an x^2 leading coefficient throw DomainError when evaluated at x = 0.
OdeProblem ode_from_family(const BasisFamily& family, const EigenvalueFunction& kf);

struct State {
  cplx f;
  cplx f_prime;
};

/// Dense-output solution of one integration run.
class DenseSolution {
 public:
  [[nodiscard]] State operator()(double x) const;
  [[nodiscard]] double x_begin() const { return x_begin_; }
  [[nodiscard]] double x_end() const { return x_end_; }
  [[nodiscard]] std::size_t accepted_steps() const { return steps_.size(); }
  [[nodiscard]] std::size_t rejected_steps() const { return rejected_; }

 private:
  friend DenseSolution integrate(const OdeProblem&, double, cplx, cplx, double, double, double,
                                 std::span<const double>);
  using Vec4 = std::array<double, 4>;
  struct Step {
    double x0;
    double h;
    std::array<Vec4, 5> rcont;
  };

  std::vector<Step> steps_;
  double x_begin_ = 0.0;
  double x_end_ = 0.0;
  std::size_t rejected_ = 0;
};

inline constexpr double kDefaultRtol = 1e-10;
inline constexpr double kDefaultAtol = 1e-12;

/// Integrate from (x0, f0, fp0) to x_end with local error control. Steps are shortened to land
/// exactly on every point of `stops` inside the integration range, so queries there are step
/// values rather than interpolants. Throws StepSizeUnderflow near singular points.
DenseSolution integrate(const OdeProblem& prob, double x0, cplx f0, cplx fp0, double x_end,
                        double rtol = kDefaultRtol, double atol = kDefaultAtol,
                        std::span<const double> stops = {});

/// max_i |f_i - g(x_i)| / max_i |g(x_i)| over a set of transfer-matrix samples.
double max_relative_deviation(std::span<const SolutionSample> samples, const DenseSolution& ref);

/// Integrate the family's ODE through the grid of `samples` starting at (x0, f0, fp0), in both
/// directions if needed, and compare.
double oracle_deviation(const BasisFamily& family, const EigenvalueFunction& kf,
                        std::span<const SolutionSample> samples, double x0, cplx f0, cplx fp0,
                        double rtol = 1e-12, double atol = 1e-14);

/// Residual of the extended ODE evaluated on uniformly spaced samples with fourth-order central
/// differences of f, normalized by max(1, max |f''|). Interior points with a two-point margin.
double operator_residual(const OdeProblem& prob, std::span<const SolutionSample> samples);

}  // namespace dtmm::oracle
