#include "dtmm/app/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>
#include <spdlog/spdlog.h>

#include "dtmm/bloch.hpp"
#include "dtmm/errors.hpp"
#include "dtmm/kernel.hpp"
#include "dtmm/oracle.hpp"

namespace dtmm::app {

using nlohmann::json;

namespace {

struct Output {
  std::string body;
  bool is_csv = true;
  GridMetadata meta;
};

TransferMatrix propagate_segment(const BasisFamily& family, const EigenvalueFunction& kf,
                                 double x1, double x2, double spu,
                                 const PropagationOptions& popts, long& steps) {
  check_path(family, kf, x1, x2, std::max(64, segment_steps(x2 - x1, 64.0)));
  const int n = segment_steps(x2 - x1, spu);
  steps += n;
  return propagate(family, kf, x1, x2, n, popts);
}

std::string error_name(const std::exception& e) {
  if (dynamic_cast<const TurningPoint*>(&e)) return "TurningPoint";
  if (dynamic_cast<const SingularWronskian*>(&e)) return "SingularWronskian";
  if (dynamic_cast<const ResonantBVP*>(&e)) return "ResonantBVP";
  if (dynamic_cast<const StepSizeUnderflow*>(&e)) return "StepSizeUnderflow";
  if (dynamic_cast<const PeriodicityViolation*>(&e)) return "PeriodicityViolation";
  if (dynamic_cast<const NearIntegerOrder*>(&e)) return "NearIntegerOrder";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const RangeError*>(&e)) return "RangeError";
  if (dynamic_cast<const OverflowError*>(&e)) return "OverflowError";
  return "Error";
}

void require_mode(Command cmd, Mode mode) {
  auto name = [](Command c) {
    switch (c) {
      case Command::solve_ivp: return "solve-ivp";
      case Command::solve_bvp: return "solve-bvp";
      case Command::bloch: return "bloch";
      case Command::kernel_dump: return "kernel-dump";
      case Command::verify: return "verify";
    }
    return "?";
  };
  const bool ok = (cmd == Command::verify) || (cmd == Command::solve_ivp && mode == Mode::ivp) ||
                  (cmd == Command::solve_bvp && mode == Mode::bvp) ||
                  (cmd == Command::bloch && mode == Mode::bloch) ||
                  (cmd == Command::kernel_dump && mode != Mode::bloch);
  if (!ok) {
    throw SpecError(std::string("command ") + name(cmd) + " does not apply to a spec with mode " +
                    to_string(mode));
  }
}

Output run_solution(const ProblemSpec& spec, const BasisFamily& family,
                    const EigenvalueFunction& kf, double spu, const PropagationOptions& popts,
                    bool verify) {
  const std::vector<double> grid = linspace(spec.grid.start, spec.grid.stop, spec.grid.n);
  SolveOptions sopts;
  sopts.steps_per_unit = spu;
  sopts.propagation = popts;
  long steps = 0;
  std::vector<SolutionSample> samples;
  double x0 = 0.0;
  cplx f0, fp0;
  const Conditions& c = spec.conditions;
  if (spec.mode == Mode::ivp) {
    samples = solve_ivp(family, kf, c.c, c.f_c, c.fp_c, grid, sopts, &steps);
    x0 = c.c;
    f0 = c.f_c;
    fp0 = c.fp_c;
  } else {
    samples = solve_bvp(family, kf, c.c1, c.c2, c.f_c1, c.f_c2, grid, sopts, &steps);
    if (verify) {
      // Oracle start data from the boundary system, independent of the output grid.
      long unused = 0;
      const TransferMatrix q = propagate_segment(family, kf, c.c1, c.c2, spu, popts, unused);
      const auto envs = bvp_envelopes(family, kf, c.c1, c.c2, c.f_c1, c.f_c2, q);
      const SolutionSample s = reconstruct(family, kf, c.c1, envs.first);
      x0 = c.c1;
      f0 = s.f;
      fp0 = s.f_prime;
    }
  }
  SolutionGrid out{std::move(samples), {}};
  out.meta.spec_hash = spec_hash(spec.raw);
  out.meta.mode = to_string(spec.mode);
  out.meta.family = family.name();
  out.meta.method = to_string(popts.method);
  out.meta.steps_per_unit = spu;
  out.meta.step_count = steps;
  if (verify) {
    out.meta.max_oracle_deviation = oracle::oracle_deviation(
        family, kf, out.samples, x0, f0, fp0, spec.numerics.oracle_rtol, spec.numerics.oracle_atol);
  }
  Output o;
  o.meta = out.meta;
  if (spec.format == Format::json) {
    o.body = to_json(out).dump(2) + "\n";
    o.is_csv = false;
  } else {
    o.body = to_csv(out);
  }
  return o;
}

Output run_bloch(const ProblemSpec& spec, const BasisFamily& family, const EigenvalueFunction& kf,
                 double spu, bool verify) {
  const double L = spec.conditions.L;
  const int n = segment_steps(L, spu);
  std::vector<BlochResult> results;
  double worst = 0.0;
  for (double bx : spec.conditions.base_x) {
    check_path(family, kf, bx, bx + L, 256);
    results.push_back(bloch_wavenumbers(family, kf, bx, L, n));
    if (!verify) continue;
    // f(x + L) = lambda f(x) for the solution built from each eigenvector.
    const BlochResult& r = results.back();
    const oracle::OdeProblem prob = oracle::ode_from_family(family, kf);
    for (int j = 0; j < 2; ++j) {
      const SolutionSample s0 = reconstruct(family, kf, bx, EnvelopeVector::from(r.eigenvectors[j]));
      const auto sol = oracle::integrate(prob, bx, s0.f, s0.f_prime, bx + L,
                                         spec.numerics.oracle_rtol, spec.numerics.oracle_atol);
      const oracle::State end = sol(bx + L);
      const cplx lam = r.eigenvalues[j];
      const double scale = std::max(std::abs(lam) * std::hypot(std::abs(s0.f), std::abs(s0.f_prime)),
                                    std::hypot(std::abs(end.f), std::abs(end.f_prime)));
      const double dev =
          std::hypot(std::abs(end.f - lam * s0.f), std::abs(end.f_prime - lam * s0.f_prime)) / scale;
      worst = std::max(worst, dev);
    }
  }
  GridMetadata meta;
  meta.spec_hash = spec_hash(spec.raw);
  meta.mode = to_string(spec.mode);
  meta.family = family.name();
  meta.method = to_string(Method::ordered);
  meta.steps_per_unit = spu;
  meta.step_count = static_cast<long>(n) * static_cast<long>(results.size());
  if (verify) meta.max_oracle_deviation = worst;

  Output o;
  o.meta = meta;
  if (spec.format == Format::json) {
    json rows = json::array();
    for (const auto& r : results) {
      json kappa = json::array(), eig = json::array();
      for (int j = 0; j < 2; ++j) {
        kappa.push_back({r.kappa[j].real(), r.kappa[j].imag()});
        eig.push_back({r.eigenvalues[j].real(), r.eigenvalues[j].imag()});
      }
      rows.push_back({{"base_x", r.base_x}, {"L", r.period_L}, {"kappa", kappa},
                      {"eigenvalues", eig}});
    }
    o.body = json{{"metadata", to_json(meta)}, {"bloch", rows}}.dump(2) + "\n";
    o.is_csv = false;
  } else {
    std::string s = "base_x,re_kappa1,im_kappa1,re_kappa2,im_kappa2\n";
    for (const auto& r : results) {
      s += format_double(r.base_x);
      for (int j = 0; j < 2; ++j) {
        s += ',' + format_double(r.kappa[j].real()) + ',' + format_double(r.kappa[j].imag());
      }
      s += '\n';
    }
    o.body = std::move(s);
  }
  return o;
}

Output run_kernel_dump(const ProblemSpec& spec, const BasisFamily& family,
                       const EigenvalueFunction& kf, bool verify) {
  const std::vector<double> grid = linspace(spec.grid.start, spec.grid.stop, spec.grid.n);
  check_path(family, kf, grid.front(), grid.back(), std::max(256, spec.grid.n));
  const double k_scale = std::max(1.0, kf.sup_abs_k(grid.front(), grid.back()));
  struct Row {
    double x;
    Mat2 u;
    cplx w;
    double residual;
  };
  std::vector<Row> rows;
  double worst = 0.0;
  for (double x : grid) {
    const KernelMatrix u = kernel(family, kf, x, k_scale);
    const cplx w = family.evaluate(x, kf.k(x)).W;
    rows.push_back({x, u.u, w, trace_identity_residual(family, kf, x, u)});
    if (verify) {
      const Mat2 g = kernel_generic(family, kf, x).u;
      const double scale = std::max(1.0, g.cwiseAbs().maxCoeff());
      worst = std::max(worst, (u.u - g).cwiseAbs().maxCoeff() / scale);
    }
  }
  GridMetadata meta;
  meta.spec_hash = spec_hash(spec.raw);
  meta.mode = to_string(Mode::kernel_dump);
  meta.family = family.name();
  meta.method = "none";
  meta.steps_per_unit = 0.0;
  meta.step_count = 0;
  if (verify) meta.max_oracle_deviation = worst;

  Output o;
  o.meta = meta;
  if (spec.format == Format::json) {
    json arr = json::array();
    for (const auto& r : rows) {
      json u = json::array();
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) u.push_back({r.u(i, j).real(), r.u(i, j).imag()});
      }
      arr.push_back({{"x", r.x}, {"u", u}, {"W", {r.w.real(), r.w.imag()}},
                     {"trace_residual", r.residual}});
    }
    o.body = json{{"metadata", to_json(meta)}, {"kernel", arr}}.dump(2) + "\n";
    o.is_csv = false;
  } else {
    std::string s =
        "x,re_u11,im_u11,re_u12,im_u12,re_u21,im_u21,re_u22,im_u22,re_W,im_W,trace_residual\n";
    for (const auto& r : rows) {
      s += format_double(r.x);
      for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
          s += ',' + format_double(r.u(i, j).real()) + ',' + format_double(r.u(i, j).imag());
        }
      }
      s += ',' + format_double(r.w.real()) + ',' + format_double(r.w.imag()) + ',' +
           format_double(r.residual) + '\n';
    }
    o.body = std::move(s);
  }
  return o;
}

void write_file(const std::string& path, const std::string& body) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw SpecError("cannot write output file '" + path + "'");
  f << body;
  if (!f) throw SpecError("failed writing output file '" + path + "'");
}

int execute(Command cmd, ProblemSpec spec, const RunOverrides& ov, std::ostream& out,
            std::ostream& err) {
  require_mode(cmd, spec.mode);
  if (ov.format) spec.format = *ov.format;
  const bool verify = ov.verify || spec.verify || cmd == Command::verify;
  const BasisFamily family = build_family(spec.equation);
  const EigenvalueFunction kf = build_profile(spec.k_profile);

  PropagationOptions popts;
  popts.method = ov.method.value_or(spec.numerics.method);
  popts.series_order = spec.numerics.series_order;

  double lo = spec.grid.start, hi = spec.grid.stop;
  if (spec.mode == Mode::bloch) {
    lo = *std::min_element(spec.conditions.base_x.begin(), spec.conditions.base_x.end());
    hi = *std::max_element(spec.conditions.base_x.begin(), spec.conditions.base_x.end()) +
         spec.conditions.L;
  } else if (spec.mode == Mode::ivp) {
    lo = std::min(lo, spec.conditions.c);
    hi = std::max(hi, spec.conditions.c);
  } else if (spec.mode == Mode::bvp) {
    lo = std::min({lo, spec.conditions.c1, spec.conditions.c2});
    hi = std::max({hi, spec.conditions.c1, spec.conditions.c2});
  }
  double spu = ov.steps_per_unit.value_or(
      spec.numerics.n_steps_per_unit.value_or(default_steps_per_unit(kf, lo, hi)));
  if (!(spu > 0.0)) throw SpecError("steps per unit must be positive");

  spdlog::debug("family={} profile='{}' mode={} method={} steps_per_unit={}", family.name(),
                kf.description(), to_string(spec.mode), to_string(popts.method), spu);

  Output o;
  const bool dump = cmd == Command::kernel_dump || spec.mode == Mode::kernel_dump;
  if (dump) {
    o = run_kernel_dump(spec, family, kf, verify);
  } else if (spec.mode == Mode::bloch) {
    o = run_bloch(spec, family, kf, spu, verify);
  } else {
    o = run_solution(spec, family, kf, spu, popts, verify);
  }

  if (ov.out) {
    write_file(*ov.out, o.body);
    if (o.is_csv) write_file(*ov.out + ".meta.json", to_json(o.meta).dump(2) + "\n");
  } else {
    out << o.body;
  }
  if (o.meta.max_oracle_deviation) {
    err << "max_oracle_deviation = " << format_double(*o.meta.max_oracle_deviation) << '\n';
  }
  spdlog::debug("done: {} steps", o.meta.step_count);
  return kExitOk;
}

}  // namespace

double default_steps_per_unit(const EigenvalueFunction& kf, double lo, double hi) {
  return 2000.0 * std::max(1.0, kf.sup_abs_k_prime(lo, hi));
}

int run(Command cmd, const json& doc, const RunOverrides& overrides, std::ostream& out,
        std::ostream& err) {
  try {
    return execute(cmd, parse_problem_spec(doc), overrides, out, err);
  } catch (const SpecError& e) {
    err << "dtmm: spec error: " << e.what() << '\n';
    return kExitSpecError;
  } catch (const Error& e) {
    err << "dtmm: numerical error (" << error_name(e) << "): " << e.what() << '\n';
    return kExitNumericalError;
  }
}

int run(Command cmd, const std::string& spec_path, const RunOverrides& overrides,
        std::ostream& out, std::ostream& err) {
  json doc;
  {
    std::ifstream in(spec_path);
    if (!in) {
      err << "dtmm: spec error: cannot read spec file '" << spec_path << "'\n";
      return kExitSpecError;
    }
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      err << "dtmm: spec error: spec is not valid JSON: " << e.what() << '\n';
      return kExitSpecError;
    }
  }
  return run(cmd, doc, overrides, out, err);
}

}  // namespace dtmm::app
