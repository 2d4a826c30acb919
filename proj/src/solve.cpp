#include "dtmm/solve.hpp"

#include <algorithm>
#include <cmath>

#include "dtmm/errors.hpp"

namespace dtmm {

namespace {

void require_increasing(std::span<const double> grid) {
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw DomainError("solution grid must be strictly increasing");
  }
}

void require_in_domain(const EigenvalueFunction& kf, double x) {
  if (!kf.domain().contains(x)) {
    throw DomainError("x = " + std::to_string(x) + " outside the eigenvalue-function domain");
  }
}

TransferMatrix segment(const KernelFn& fn, double x1, double x2, int n,
                       const PropagationOptions& p) {
  switch (p.method) {
    case Method::ordered: return propagate_ordered(fn, x1, x2, n);
    case Method::magnus1: return propagate_magnus1(fn, x1, x2, n + 1);
    case Method::diagonal: return propagate_diagonal(fn, x1, x2, n + 1);
    case Method::series: return propagate_series(fn, x1, x2, p.series_order, n + 1);
  }
  throw Error("unknown propagation method");
}

}  // namespace

std::vector<double> linspace(double start, double stop, int n) {
  std::vector<double> v;
  if (n <= 0) return v;
  if (n == 1) return {start};
  v.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) v.push_back(start + (stop - start) * i / (n - 1));
  v.back() = stop;
  return v;
}

int segment_steps(double dx, double steps_per_unit) {
  const double raw = std::ceil(steps_per_unit * std::abs(dx) - 1e-9);
  return std::max(1, static_cast<int>(raw));
}

SolutionSample reconstruct(const BasisFamily& family, const EigenvalueFunction& kf, double x,
                           const EnvelopeVector& env) {
  const BasisEval e = family.evaluate(x, kf.k(x));
  return {x, env.a * e.A + env.b * e.B, env.a * e.A_x + env.b * e.B_x, env};
}

EnvelopeVector ivp_envelope(const BasisFamily& family, const EigenvalueFunction& kf, double c,
                            cplx f_c, cplx fp_c) {
  const double k = kf.k(c);
  const BasisEval e = family.evaluate(c, k);
  if (e.wronskian_degenerate(kWronskianRelTol)) throw SingularWronskian(c, k, std::abs(e.W));
  return {(e.B_x * f_c - e.B * fp_c) / e.W, (-e.A_x * f_c + e.A * fp_c) / e.W};
}

std::pair<EnvelopeVector, EnvelopeVector> bvp_envelopes(const BasisFamily& family,
                                                        const EigenvalueFunction& kf, double c1,
                                                        double c2, cplx f_c1, cplx f_c2,
                                                        const TransferMatrix& q) {
  const auto [a1, b1] = family.values(c1, kf.k(c1));
  const auto [a2, b2] = family.values(c2, kf.k(c2));
  Mat2 sys;
  sys << a1, b1, q.m(0, 0) * a2 + q.m(1, 0) * b2, q.m(0, 1) * a2 + q.m(1, 1) * b2;
  const cplx det = sys.determinant();
  const double scale = sys.row(0).norm() * sys.row(1).norm();
  if (!(std::abs(det) >= kResonanceRelTol * scale)) throw ResonantBVP(c1, c2, std::abs(det));
  Mat2 inv;
  inv << sys(1, 1), -sys(0, 1), -sys(1, 0), sys(0, 0);
  const Vec2 env1 = inv * Vec2(f_c1, f_c2) / det;
  return {EnvelopeVector::from(env1), EnvelopeVector::from(q.m * env1)};
}

std::vector<SolutionSample> sweep(const BasisFamily& family, const EigenvalueFunction& kf,
                                  double anchor, const EnvelopeVector& env,
                                  std::span<const double> grid, const SolveOptions& opts,
                                  long* total_steps) {
  require_increasing(grid);
  require_in_domain(kf, anchor);
  std::vector<SolutionSample> out(grid.size());
  if (grid.empty()) return out;
  require_in_domain(kf, grid.front());
  require_in_domain(kf, grid.back());

  const double lo = std::min(anchor, grid.front());
  const double hi = std::max(anchor, grid.back());
  const int path_samples = std::max(256, segment_steps(hi - lo, opts.steps_per_unit) / 8);
  check_path(family, kf, lo, hi, path_samples);
  const KernelFn fn = make_kernel_fn(family, kf, std::max(1.0, kf.sup_abs_k(lo, hi)));

  long steps = 0;
  const auto split = std::lower_bound(grid.begin(), grid.end(), anchor) - grid.begin();

  auto walk = [&](auto begin, auto end, auto index_of) {
    double x = anchor;
    Vec2 c = env.vec();
    for (auto it = begin; it != end; ++it) {
      const double target = *it;
      if (target != x) {
        const int n = segment_steps(target - x, opts.steps_per_unit);
        c = segment(fn, x, target, n, opts.propagation).m * c;
        steps += n;
        x = target;
      }
      out[index_of(it)] = reconstruct(family, kf, target, EnvelopeVector::from(c));
    }
  };
  walk(grid.begin() + split, grid.end(), [&](auto it) { return it - grid.begin(); });
  walk(std::make_reverse_iterator(grid.begin() + split), std::make_reverse_iterator(grid.begin()),
       [&](auto it) { return std::prev(it.base()) - grid.begin(); });

  if (total_steps != nullptr) *total_steps = steps;
  return out;
}

std::vector<SolutionSample> solve_ivp(const BasisFamily& family, const EigenvalueFunction& kf,
                                      double c, cplx f_c, cplx fp_c, std::span<const double> grid,
                                      const SolveOptions& opts, long* total_steps) {
  require_in_domain(kf, c);
  const EnvelopeVector env = ivp_envelope(family, kf, c, f_c, fp_c);
  return sweep(family, kf, c, env, grid, opts, total_steps);
}

std::vector<SolutionSample> solve_bvp(const BasisFamily& family, const EigenvalueFunction& kf,
                                      double c1, double c2, cplx f_c1, cplx f_c2,
                                      std::span<const double> grid, const SolveOptions& opts,
                                      long* total_steps) {
  require_in_domain(kf, c1);
  require_in_domain(kf, c2);
  if (c1 == c2) throw DomainError("boundary points must differ");
  check_path(family, kf, c1, c2, std::max(256, segment_steps(c2 - c1, opts.steps_per_unit) / 8));
  const int n = segment_steps(c2 - c1, opts.steps_per_unit);
  const double lo = std::min(c1, c2);
  const double hi = std::max(c1, c2);
  const KernelFn fn = make_kernel_fn(family, kf, std::max(1.0, kf.sup_abs_k(lo, hi)));
  const TransferMatrix q = segment(fn, c1, c2, n, opts.propagation);
  const auto envs = bvp_envelopes(family, kf, c1, c2, f_c1, f_c2, q);
  long swept = 0;
  auto samples = sweep(family, kf, c1, envs.first, grid, opts, &swept);
  if (total_steps != nullptr) *total_steps = swept + n;
  return samples;
}

LemmaResidual derivative_lemma_check(std::span<const SolutionSample> samples,
                                     const EigenvalueFunction& kf, const BasisFamily& family) {
  if (samples.size() < 5) throw DomainError("derivative_lemma_check needs at least 5 samples");
  const double h = samples[1].x - samples[0].x;
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double hi = samples[i].x - samples[i - 1].x;
    if (std::abs(hi - h) > 1e-9 * std::max(1.0, std::abs(h))) {
      throw DomainError("derivative_lemma_check needs uniformly spaced samples");
    }
  }
  LemmaResidual r;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    const SolutionSample& s = samples[i];
    const cplx fd1 = (samples[i + 1].f - samples[i - 1].f) / (2.0 * h);
    r.first = std::max(r.first, std::abs(s.f_prime - fd1) / std::max(1.0, std::abs(s.f_prime)));

    const double k = kf.k(s.x);
    const auto [am, bm] = family.values(s.x - h, k);
    const auto [a0, b0] = family.values(s.x, k);
    const auto [ap, bp] = family.values(s.x + h, k);
    const cplx a_xx = (ap - 2.0 * a0 + am) / (h * h);
    const cplx b_xx = (bp - 2.0 * b0 + bm) / (h * h);
    const cplx recon = s.envelope.a * a_xx + s.envelope.b * b_xx;
    const cplx fd2 = (samples[i + 1].f - 2.0 * s.f + samples[i - 1].f) / (h * h);
    r.second = std::max(r.second, std::abs(fd2 - recon) / std::max(1.0, std::abs(recon)));
  }
  return r;
}

}  // namespace dtmm
