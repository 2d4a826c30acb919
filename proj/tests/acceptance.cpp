// Acceptance run: one line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "dtmm/app/runner.hpp"
#include "dtmm/bloch.hpp"
#include "dtmm/errors.hpp"
#include "dtmm/kernel.hpp"
#include "dtmm/oracle.hpp"
#include "dtmm/propagate.hpp"
#include "dtmm/solve.hpp"
#include "dtmm/specfun.hpp"

using namespace dtmm;
using std::numbers::pi;

namespace {

// Tolerances and limits, one block per criterion.
namespace tol {
constexpr double c1_rel = 1e-12, c1_time = 1.0;
constexpr double c2_dev = 1e-6, c2_ratio_lo = 3.5, c2_ratio_hi = 4.5, c2_time = 5.0;
constexpr double c2_spu = 1e4, c2_oracle_rtol = 1e-13, c2_oracle_atol = 1e-15;
constexpr double c3_rel = 1e-8, c3_time = 10.0;
constexpr int c3_profiles = 50;
constexpr double c4_entry = 1e-9, c4_identity = 1e-12;
constexpr double c5_residual = 1e-5, c5_h = 1e-3, c5_ratio_lo = 3.5, c5_ratio_hi = 4.5;
constexpr double c6_closed = 1e-7, c6_order = 1e-5, c6_fd_lo = 1.8, c6_fd_hi = 2.2;
constexpr int c6_points = 200;
constexpr double c7_oracle = 1e-6;
constexpr double c8_rel = 1e-2, c8_det = 1e-8;
constexpr double c9_const = 1e-9, c9_invariance = 1e-6, c9_sum = 1e-8;
constexpr double c10_airy_w = 1e-10, c10_bessel_w = 1e-9, c10_series = 1e-9;
constexpr double c11_dev = 1e-6;
}  // namespace tol

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

SolveOptions spu(double s) {
  SolveOptions o;
  o.steps_per_unit = s;
  return o;
}

struct Family {
  BasisFamily fam;
  EigenvalueFunction kf;
  double lo, hi;
};

// --- 1 -----------------------------------------------------------------------------------------
Verdict constant_exactness() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  const Family cases[] = {
      {BasisFamily::wave(), EigenvalueFunction::constant(1.3), 0.0, 10.0},
      {BasisFamily::airy(), EigenvalueFunction::constant(0.8), -2.0, 2.0},
      {BasisFamily::bessel_arg(0.3), EigenvalueFunction::constant(1.2), 0.5, 5.0},
      {BasisFamily::bessel_order(), EigenvalueFunction::constant(0.4), 1.0, 5.0},
      {BasisFamily::euler_cauchy(), EigenvalueFunction::constant(0.7), 1.0, 3.0},
  };
  const cplx a(0.3, -0.2), b(1.1, 0.4);
  for (const auto& c : cases) {
    const double k = c.kf(c.lo);
    const BasisEval e = c.fam.evaluate(c.lo, k);
    const auto sol = solve_ivp(c.fam, c.kf, c.lo, a * e.A + b * e.B, a * e.A_x + b * e.B_x,
                               linspace(c.lo, c.hi, 200), spu(100));
    double worst = 0.0, scale = 0.0;
    for (const auto& s : sol) {
      const auto [A, B] = c.fam.values(s.x, k);
      worst = std::max(worst, std::abs(s.f - (a * A + b * B)));
      scale = std::max(scale, std::abs(a * A + b * B));
    }
    v.require(worst / scale <= tol::c1_rel, c.fam.name() + " " + sci(worst / scale));
  }
  const double t = seconds_since(t0);
  v.require(t < tol::c1_time, "time " + sci(t) + " s");
  return v;
}

// --- 2 -----------------------------------------------------------------------------------------
struct OracleCase {
  std::string name;
  BasisFamily fam;
  EigenvalueFunction kf;
  double lo, hi;
  cplx f0, fp0;
};

double deviation(const OracleCase& c, double steps_per_unit) {
  const auto sol = solve_ivp(c.fam, c.kf, c.lo, c.f0, c.fp0, linspace(c.lo, c.hi, 101), spu(steps_per_unit));
  return oracle::oracle_deviation(c.fam, c.kf, sol, c.lo, c.f0, c.fp0, tol::c2_oracle_rtol,
                                  tol::c2_oracle_atol);
}

Verdict oracle_agreement() {
  Verdict v;
  const OracleCase cases[] = {
      {"wave", BasisFamily::wave(), EigenvalueFunction::sinusoidal(1.0, 0.3, 1.0), 0.0, 10.0, 1.0, cplx(0, 1)},
      {"airy", BasisFamily::airy(), EigenvalueFunction::sinusoidal(1.0, 0.2, 1.0), -3.0, 3.0, 1.0, 0.0},
      {"bessel_arg", BasisFamily::bessel_arg(0.3), EigenvalueFunction::tanh_ramp(1.0, 1.5, 2.5, 0.5), 0.5, 5.0,
       1.0, 0.0},
      {"bessel_order", BasisFamily::bessel_order(), EigenvalueFunction::sinusoidal(0.5, 0.25, 1.0), 1.0, 5.0, 1.0,
       0.0},
      {"euler_cauchy", BasisFamily::euler_cauchy(), EigenvalueFunction::linear(0.9, 0.1), 1.0, 3.0, 1.0, 0.5},
  };
  for (const auto& c : cases) {
    const auto t0 = std::chrono::steady_clock::now();
    const double d1 = deviation(c, tol::c2_spu);
    const double d2 = deviation(c, 2 * tol::c2_spu);
    const double t = seconds_since(t0);
    const double ratio = d1 / d2;
    v.require(d1 <= tol::c2_dev && ratio >= tol::c2_ratio_lo && ratio <= tol::c2_ratio_hi &&
                  (c.name != "wave" || t < tol::c2_time),
              c.name + " dev " + sci(d1) + " ratio " + sci(ratio) + " " + sci(t) + " s");
  }
  return v;
}

// --- 3 -----------------------------------------------------------------------------------------
// A random smooth profile whose range suits the family.
EigenvalueFunction random_profile(std::mt19937_64& rng, double k_lo, double k_hi) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double mid = k_lo + (k_hi - k_lo) * (0.4 + 0.2 * u(rng));
  const double span = 0.35 * (k_hi - k_lo) * u(rng);
  switch (static_cast<int>(u(rng) * 3)) {
    case 0: return EigenvalueFunction::sinusoidal(mid, span, 0.5 + 2.0 * u(rng), 2 * pi * u(rng));
    case 1: return EigenvalueFunction::tanh_ramp(mid - span, mid + span, 1.5 + u(rng), 0.2 + u(rng));
    default: return EigenvalueFunction::linear(mid - span, span);  // x in [1, 3] keeps k in range
  }
}

Verdict determinant_property() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  struct Box {
    BasisFamily fam;
    double k_lo, k_hi;
  };
  const Box boxes[] = {
      {BasisFamily::wave(), 0.5, 2.0},           {BasisFamily::airy(), 0.5, 2.0},
      {BasisFamily::bessel_arg(0.3), 0.5, 2.0},  {BasisFamily::bessel_order(), 0.25, 0.75},
      {BasisFamily::euler_cauchy(), 0.5, 2.0},
  };
  std::mt19937_64 rng(2024);
  double worst = 0.0, worst_literal = 0.0;
  for (int i = 0; i < tol::c3_profiles; ++i) {
    const Box& b = boxes[i % 5];
    const auto kf = random_profile(rng, b.k_lo, b.k_hi);
    // midpoint quadrature of int tr U is O(h^2); 5e3 steps per unit
    const TransferMatrix q = propagate(b.fam, kf, 1.0, 3.0, 10000);
    worst = std::max(worst, std::abs(q.det() - q.expected_det()) / std::abs(q.expected_det()));
    const cplx literal = q.w_from / q.w_to;
    worst_literal = std::max(worst_literal, std::abs(q.det() - literal) / std::abs(literal));
  }
  const double t = seconds_since(t0);
  v.require(worst <= tol::c3_rel, "det vs W(x2;k1)/W(x2;k2) " + sci(worst));
  v.require(t < tol::c3_time, "time " + sci(t) + " s");
  v.detail += "; literal endpoint W1/W2 " + sci(worst_literal) + " (x-dependent W)";
  return v;
}

// --- 4 -----------------------------------------------------------------------------------------
Verdict composition() {
  Verdict v;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(1.1, 2.9);
  const double density = 4000.0;
  const Family cases[] = {
      {BasisFamily::wave(), EigenvalueFunction::sinusoidal(1.0, 0.3, 2.0), 1.0, 3.0},
      {BasisFamily::airy(), EigenvalueFunction::sinusoidal(1.0, 0.3, 2.0), 1.0, 3.0},
      {BasisFamily::bessel_arg(0.3), EigenvalueFunction::sinusoidal(1.0, 0.3, 2.0), 1.0, 3.0},
      {BasisFamily::bessel_order(), EigenvalueFunction::sinusoidal(0.5, 0.2, 2.0), 1.0, 3.0},
      {BasisFamily::euler_cauchy(), EigenvalueFunction::sinusoidal(1.0, 0.3, 2.0), 1.0, 3.0},
  };
  double comp = 0.0, inv = 0.0, id = 0.0;
  for (const auto& c : cases) {
    auto q = [&](double a, double b) {
      return propagate(c.fam, c.kf, a, b, std::max(1, static_cast<int>(std::round(density * std::abs(b - a)))));
    };
    const TransferMatrix full = q(c.lo, c.hi);
    for (int i = 0; i < 3; ++i) {
      // split points on the step lattice so both sides share the same midpoints
      const double x3 = std::round(u(rng) * density) / density;
      comp = std::max(comp, max_abs(compose(q(x3, c.hi), q(c.lo, x3)).m - full.m));
    }
    inv = std::max(inv, max_abs(full.m * q(c.hi, c.lo).m - Mat2::Identity()));
    id = std::max(id, max_abs(propagate(c.fam, c.kf, 2.0, 2.0, 1).m - Mat2::Identity()));
  }
  v.require(comp <= tol::c4_entry, "composition " + sci(comp));
  v.require(inv <= tol::c4_entry, "inversion " + sci(inv));
  v.require(id <= tol::c4_identity, "identity " + sci(id));
  return v;
}

// --- 5 -----------------------------------------------------------------------------------------
Verdict derivative_lemma() {
  Verdict v;
  const auto kf = EigenvalueFunction::sinusoidal(1.0, 0.3, 1.0);
  const BasisFamily w = BasisFamily::wave();
  auto residual = [&](double h) {
    const int n = static_cast<int>(std::round(2.0 / h)) + 1;
    return derivative_lemma_check(solve_ivp(w, kf, 0.0, 1.0, cplx(0, 1), linspace(0.0, 2.0, n)), kf, w);
  };
  const LemmaResidual r1 = residual(tol::c5_h), r2 = residual(tol::c5_h / 2);
  v.require(r1.max() <= tol::c5_residual, "residual " + sci(r1.max()));
  const double q1 = r1.first / r2.first, q2 = r1.second / r2.second;
  v.require(q1 >= tol::c5_ratio_lo && q1 <= tol::c5_ratio_hi, "f' decay " + sci(q1));
  v.require(q2 >= tol::c5_ratio_lo && q2 <= tol::c5_ratio_hi, "f'' decay " + sci(q2));
  return v;
}

// --- 6 -----------------------------------------------------------------------------------------
Verdict kernel_cross_validation() {
  Verdict v;
  struct Case {
    BasisFamily fam;
    double x_lo, x_hi, k_lo, k_hi, tol;
  };
  const Case cases[] = {
      {BasisFamily::wave(), -3.0, 3.0, 0.3, 3.0, tol::c6_closed},
      {BasisFamily::airy(), -3.0, 3.0, 0.3, 2.0, tol::c6_closed},
      {BasisFamily::bessel_arg(0.3), 0.3, 5.0, 0.3, 3.0, tol::c6_closed},
      {BasisFamily::bessel_order(), 0.5, 6.0, 0.1, 0.9, tol::c6_order},
      {BasisFamily::euler_cauchy(), 0.5, 3.0, 0.2, 2.0, tol::c6_closed},
  };
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> ukp(-2.0, 2.0);
  for (const auto& c : cases) {
    std::uniform_real_distribution<double> ux(c.x_lo, c.x_hi), uk(c.k_lo, c.k_hi);
    double worst = 0.0;
    for (int i = 0; i < tol::c6_points; ++i) {
      const double x = ux(rng), k = uk(rng), kp = ukp(rng);
      const auto kf = EigenvalueFunction::linear(k - kp * x, kp);
      const Mat2 ref = kernel_generic(c.fam, kf, x).u;
      worst = std::max(worst, max_abs(kernel(c.fam, kf, x).u - ref) / std::max(1.0, max_abs(ref)));
    }
    v.require(worst <= c.tol, c.fam.name() + " " + sci(worst));
  }
  for (const auto& fam : {BasisFamily::wave(), BasisFamily::euler_cauchy()}) {
    const double X = fam.tag() == FamilyTag::wave ? 1.0 : 2.0;
    const Mat2 ref = kernel_generic(fam, X, 1.0, 1.0).u;
    const double e1 = max_abs(kernel_fd_limit(fam, 1.0, 1e-3, X, 1e-3).u - ref);
    const double e2 = max_abs(kernel_fd_limit(fam, 1.0, 5e-4, X, 5e-4).u - ref);
    v.require(e1 / e2 >= tol::c6_fd_lo && e1 / e2 <= tol::c6_fd_hi, fam.name() + " limit order " + sci(e1 / e2));
  }
  return v;
}

// --- 7 -----------------------------------------------------------------------------------------
Verdict turning_point() {
  Verdict v;
  const auto kf = EigenvalueFunction::linear(-0.5, 1.0);
  std::string msg;
  double where = NAN;
  try {
    solve_ivp(BasisFamily::wave(), kf, -1.0, 1.0, 0.0, linspace(-1.0, 2.0, 31));
  } catch (const TurningPoint& e) {
    msg = e.what();
    where = e.x;
  }
  v.require(std::abs(where - 0.5) <= 1e-9 && msg.find("0.5") != std::string::npos,
            "wave raises TurningPoint at x = " + sci(where));
  // Airy formulation: f'' = k^3 x f changes character at x = 0 yet the basis stays regular there
  const auto ka = EigenvalueFunction::linear(1.0, 0.1);
  const BasisFamily airy = BasisFamily::airy();
  const auto sol = solve_ivp(airy, ka, -2.0, 1.0, 0.0, linspace(-2.0, 2.0, 81));
  const double dev = oracle::oracle_deviation(airy, ka, sol, -2.0, 1.0, 0.0);
  v.require(dev <= tol::c7_oracle, "airy across x = 0 vs oracle " + sci(dev));
  return v;
}

// --- 8 -----------------------------------------------------------------------------------------
Verdict diagonal_approximation() {
  Verdict v;
  const auto kf = EigenvalueFunction::linear(5.0, 0.01);
  const BasisFamily w = BasisFamily::wave();
  PropagationOptions diag;
  diag.method = Method::diagonal;
  const TransferMatrix qo = propagate(w, kf, 0.0, 1.0, 10000);
  const TransferMatrix qd = propagate(w, kf, 0.0, 1.0, 10000, diag);
  const double rel = max_abs(qd.m - qo.m) / max_abs(qo.m);
  v.require(rel <= tol::c8_rel, "diagonal vs ordered " + sci(rel));
  const double det = std::abs(qd.det() - qd.expected_det()) / std::abs(qd.expected_det());
  v.require(det <= tol::c8_det, "det " + sci(det));
  return v;
}

// --- 9 -----------------------------------------------------------------------------------------
double mod_dist(cplx a, cplx b, double L) {
  return std::hypot(std::remainder(a.real() - b.real(), 2 * pi / L), a.imag() - b.imag());
}

double pair_dist(const BlochResult& r, const BlochResult& s) {
  const double L = r.period_L;
  return std::min(std::max(mod_dist(r.kappa[0], s.kappa[0], L), mod_dist(r.kappa[1], s.kappa[1], L)),
                  std::max(mod_dist(r.kappa[0], s.kappa[1], L), mod_dist(r.kappa[1], s.kappa[0], L)));
}

Verdict bloch() {
  Verdict v;
  const double L = 2.0, k = 1.3;
  const auto rc = bloch_wavenumbers(BasisFamily::wave(), EigenvalueFunction::constant(k), 0.0, L, 100);
  BlochResult free = rc;
  free.kappa = {cplx(k), cplx(-k)};
  const double dc = pair_dist(rc, free);
  v.require(dc <= tol::c9_const, "constant k " + sci(dc));

  const auto kf = EigenvalueFunction::sinusoidal(1.0, 0.1, 2 * pi / L);
  std::vector<BlochResult> rs;
  for (double x0 : {0.0, 0.3, 1.1, 1.9}) rs.push_back(bloch_wavenumbers(BasisFamily::wave(), kf, x0, L, 20000));
  double inv = 0.0, sum = 0.0;
  for (const auto& r : rs) {
    inv = std::max(inv, pair_dist(r, rs[0]));
    sum = std::max(sum, mod_dist(r.kappa[0] + r.kappa[1], 0.0, L));
  }
  v.require(inv <= tol::c9_invariance, "base-point spread " + sci(inv));
  v.require(sum <= tol::c9_sum, "kappa1 + kappa2 " + sci(sum));
  return v;
}

// --- 10 ----------------------------------------------------------------------------------------
Verdict special_functions() {
  Verdict v;
  double aw = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double z = -50.0 + 0.1 * i;
    const auto p = specfun::airy(z);
    aw = std::max(aw, std::abs((p.ai.value * p.bi.derivative - p.ai.derivative * p.bi.value) * pi - 1.0));
  }
  v.require(aw <= tol::c10_airy_w, "airy wronskian " + sci(aw));
  double bw = 0.0;
  for (int a = 0; a <= 40; ++a) {
    const double nu = 0.499 * a + 0.013;
    for (int b = 0; b <= 100; ++b) {
      const double x = 0.1 + 0.499 * b;
      const auto p = specfun::bessel_jn(nu, x);
      const double w = p.j.value * p.n.derivative - p.j.derivative * p.n.value;
      bw = std::max(bw, std::abs(w * pi * x / 2 - 1.0));
    }
  }
  v.require(bw <= tol::c10_bessel_w, "bessel wronskian " + sci(bw));
  double sa = 0.0;
  for (int a = -50; a <= 50; ++a) {
    const double nu = 0.1 * a + 0.0137;
    for (int b = 1; b <= 50; ++b) {
      const double x = 0.2 * b;
      sa = std::max(sa, std::abs(specfun::bessel_jn(nu, x).j.value - specfun::bessel_j_series(nu, x, 80)));
    }
  }
  v.require(sa <= tol::c10_series, "series agreement " + sci(sa));
  return v;
}

// --- 11 ----------------------------------------------------------------------------------------
Verdict cli() {
  Verdict v;
  namespace fs = std::filesystem;
  using app::Command;
  std::vector<fs::path> specs;
  for (const auto& e : fs::directory_iterator(DTMM_SPECS_DIR)) specs.push_back(e.path());
  std::sort(specs.begin(), specs.end());
  double worst = 0.0;
  bool deterministic = true, codes = true;
  for (const auto& p : specs) {
    std::ifstream in(p);
    const auto doc = nlohmann::json::parse(in);
    const std::string mode = doc["mode"];
    const Command cmd = mode == "ivp" ? Command::solve_ivp
                        : mode == "bvp" ? Command::solve_bvp
                        : mode == "bloch" ? Command::bloch
                                          : Command::kernel_dump;
    std::ostringstream o1, o2, e1, e2;
    const int c1 = app::run(cmd, p.string(), {}, o1, e1);
    const int c2 = app::run(cmd, p.string(), {}, o2, e2);
    deterministic = deterministic && c1 == c2 && o1.str() == o2.str();
    const int expected = p.filename() == "wave_turning_point.json" ? app::kExitNumericalError : app::kExitOk;
    codes = codes && c1 == expected;
    if (expected != app::kExitOk) continue;
    app::RunOverrides ov;
    ov.format = app::Format::json;
    std::ostringstream ov_out, ov_err;
    if (app::run(Command::verify, p.string(), ov, ov_out, ov_err) != 0) {
      codes = false;
      continue;
    }
    worst = std::max(worst, nlohmann::json::parse(ov_out.str())["metadata"]["max_oracle_deviation"].get<double>());
  }
  nlohmann::json bad = {{"mode", "ivp"}};
  std::ostringstream bo, be;
  codes = codes && app::run(Command::solve_ivp, bad, {}, bo, be) == app::kExitSpecError;
  v.require(codes, std::to_string(specs.size()) + " specs, exit codes");
  v.require(deterministic, "byte-deterministic");
  v.require(worst <= tol::c11_dev, "verify max deviation " + sci(worst));
  return v;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Verdict()>> criteria[] = {
      {"constant-eigenvalue exactness", constant_exactness},
      {"oracle agreement and second order", oracle_agreement},
      {"determinant property", determinant_property},
      {"composition, inversion, identity", composition},
      {"derivative lemma", derivative_lemma},
      {"kernel cross-validation", kernel_cross_validation},
      {"turning-point policy", turning_point},
      {"diagonal approximation", diagonal_approximation},
      {"bloch wavenumbers", bloch},
      {"special functions", special_functions},
      {"cli", cli},
  };
  int failed = 0, n = 0;
  for (const auto& [name, fn] : criteria) {
    ++n;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    std::printf("criterion %2d %s: %s (%.2f s) %s\n", n, v.pass ? "PASS" : "FAIL", name, seconds_since(t0),
                v.detail.c_str());
    std::fflush(stdout);
    failed += v.pass ? 0 : 1;
  }
  std::printf("%d/%d criteria passed\n", n - failed, n);
  return failed == 0 ? 0 : 1;
}
