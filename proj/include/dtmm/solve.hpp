#pragma once

// Initial and boundary value solutions assembled from envelopes: the solution is
// f(x) = a(x) A[x; k(x)] + b(x) B[x; k(x)] with f'(x) = a A_x + b B_x.

#include <span>
#include <utility>
#include <vector>

#include "dtmm/basis.hpp"
#include "dtmm/profile.hpp"
#include "dtmm/propagate.hpp"
#include "dtmm/types.hpp"

namespace dtmm {

struct EnvelopeVector {
  cplx a;
  cplx b;

  [[nodiscard]] Vec2 vec() const { return Vec2(a, b); }
  static EnvelopeVector from(const Vec2& v) { return {v(0), v(1)}; }
};

struct SolutionSample {
  double x;
  cplx f;
  cplx f_prime;
  EnvelopeVector envelope;
};

struct SolveOptions {
  /// Ordered-product steps per unit length; each grid segment gets
  /// max(1, ceil(steps_per_unit * |dx|)) steps.
  double steps_per_unit = 1e4;
  PropagationOptions propagation;
};

/// Reconstruct (f, f') at x from an envelope.
SolutionSample reconstruct(const BasisFamily& family, const EigenvalueFunction& kf, double x,
                           const EnvelopeVector& env);

/// Envelope at c from f(c), f'(c). Throws SingularWronskian when W(c; k(c)) vanishes.
EnvelopeVector ivp_envelope(const BasisFamily& family, const EigenvalueFunction& kf, double c,
                            cplx f_c, cplx fp_c);

/// Envelopes at c1 and c2 from boundary values f(c1), f(c2) and the transfer matrix c1 -> c2.
/// Throws ResonantBVP when the boundary system is numerically singular.
std::pair<EnvelopeVector, EnvelopeVector> bvp_envelopes(const BasisFamily& family,
                                                        const EigenvalueFunction& kf, double c1,
                                                        double c2, cplx f_c1, cplx f_c2,
                                                        const TransferMatrix& q);

/// Relative determinant threshold of the boundary system.
inline constexpr double kResonanceRelTol = 1e-12;

/// Envelope sweep from an anchor through a strictly increasing grid. Points at or above the
/// anchor are reached by forward propagation, points below it by backward propagation; each
/// segment reuses the cumulative transfer matrix of the previous one.
std::vector<SolutionSample> sweep(const BasisFamily& family, const EigenvalueFunction& kf,
                                  double anchor, const EnvelopeVector& env,
                                  std::span<const double> grid, const SolveOptions& opts,
                                  long* total_steps = nullptr);

std::vector<SolutionSample> solve_ivp(const BasisFamily& family, const EigenvalueFunction& kf,
                                      double c, cplx f_c, cplx fp_c, std::span<const double> grid,
                                      const SolveOptions& opts = {}, long* total_steps = nullptr);

std::vector<SolutionSample> solve_bvp(const BasisFamily& family, const EigenvalueFunction& kf,
                                      double c1, double c2, cplx f_c1, cplx f_c2,
                                      std::span<const double> grid, const SolveOptions& opts = {},
                                      long* total_steps = nullptr);

/// Step count used for a segment of length |dx|.
int segment_steps(double dx, double steps_per_unit);

struct LemmaResidual {
  double first = 0.0;   // f' against the central difference of f
  double second = 0.0;  // second difference of f against a A_xx + b B_xx
  [[nodiscard]] double max() const { return first > second ? first : second; }
};

/// Derivative reconstruction residuals on uniformly spaced samples (at least 5).
LemmaResidual derivative_lemma_check(std::span<const SolutionSample> samples,
                                     const EigenvalueFunction& kf, const BasisFamily& family);

/// n points from start to stop inclusive.
std::vector<double> linspace(double start, double stop, int n);

}  // namespace dtmm
