#include <doctest.h>

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "dtmm/app/problem_spec.hpp"
#include "dtmm/app/runner.hpp"

using namespace dtmm;
using namespace dtmm::app;
namespace fs = std::filesystem;

namespace {

const fs::path kSpecs = DTMM_SPECS_DIR;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult run_file(Command cmd, const std::string& name, RunOverrides ov = {}) {
  std::ostringstream out, err;
  const int code = run(cmd, (kSpecs / name).string(), ov, out, err);
  return {code, out.str(), err.str()};
}

RunResult run_doc(Command cmd, const nlohmann::json& doc, RunOverrides ov = {}) {
  std::ostringstream out, err;
  const int code = run(cmd, doc, ov, out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json load(const std::string& name) {
  std::ifstream in(kSpecs / name);
  return nlohmann::json::parse(in);
}

std::vector<std::string> lines(const std::string& s) {
  std::vector<std::string> r;
  std::istringstream in(s);
  for (std::string l; std::getline(in, l);) r.push_back(l);
  return r;
}

std::vector<double> fields(const std::string& line) {
  std::vector<double> r;
  std::istringstream in(line);
  for (std::string c; std::getline(in, c, ',');) r.push_back(std::stod(c));
  return r;
}

// Runs the installed binary; returns the exit status and captured stdout+stderr.
RunResult exec(const std::string& args) {
  const std::string cmd = std::string(DTMM_CLI_PATH) + " " + args + " 2>&1";
  RunResult r{0, {}, {}};
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  for (std::size_t n; (n = std::fread(buf.data(), 1, buf.size(), p)) > 0;) r.out.append(buf.data(), n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

Command command_for(const std::string& mode) {
  if (mode == "ivp") return Command::solve_ivp;
  if (mode == "bvp") return Command::solve_bvp;
  if (mode == "bloch") return Command::bloch;
  return Command::kernel_dump;
}

}  // namespace

TEST_CASE("wave_sin csv contract") {
  const auto r = run_file(Command::solve_ivp, "wave_sin.json");
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 102);
  CHECK(ls[0] == "x,re_f,im_f,re_fp,im_fp,re_a,im_a,re_b,im_b");
  double prev = -1.0;
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto v = fields(ls[i]);
    REQUIRE(v.size() == 9);
    CHECK(v[0] > prev);
    prev = v[0];
  }
  const auto first = fields(ls[1]);
  CHECK(first[0] == 0.0);
  CHECK(first[1] == doctest::Approx(1.0));
  CHECK(first[4] == doctest::Approx(1.0));
}

TEST_CASE("turning point diagnostic") {
  const auto r = run_file(Command::solve_ivp, "wave_turning_point.json");
  CHECK(r.code == kExitNumericalError);
  CHECK(r.err.find("turning point") != std::string::npos);
  CHECK(r.err.find("0.5") != std::string::npos);
  CHECK(r.err.find("airy") != std::string::npos);
  CHECK(r.out.empty());
}

TEST_CASE("verify on every bundled spec") {
  for (const auto& entry : fs::directory_iterator(kSpecs)) {
    const std::string name = entry.path().filename().string();
    if (name == "wave_turning_point.json") continue;
    CAPTURE(name);
    RunOverrides ov;
    ov.format = Format::json;
    const auto r = run_file(Command::verify, name, ov);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    REQUIRE(j["metadata"]["max_oracle_deviation"].is_number());
    const double dev = j["metadata"]["max_oracle_deviation"].get<double>();
    MESSAGE(name << ": max_oracle_deviation = " << dev);
    CHECK(dev <= 1e-6);
    CHECK(r.err.find("max_oracle_deviation") != std::string::npos);
  }
}

TEST_CASE("outputs are byte-deterministic") {
  for (const auto& entry : fs::directory_iterator(kSpecs)) {
    const std::string name = entry.path().filename().string();
    CAPTURE(name);
    const auto mode = load(name)["mode"].get<std::string>();
    const auto a = run_file(command_for(mode), name);
    const auto b = run_file(command_for(mode), name);
    CHECK(a.code == b.code);
    CHECK(a.out == b.out);
  }
}

TEST_CASE("json round trip preserves metadata") {
  RunOverrides ov;
  ov.format = Format::json;
  ov.verify = true;
  const auto r = run_file(Command::solve_ivp, "bessel_arg_ivp.json", ov);
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  const SolutionGrid g = solution_grid_from_json(j);
  CHECK(g.samples.size() == 46);
  CHECK(g.meta.spec_hash == spec_hash(load("bessel_arg_ivp.json")));
  CHECK(g.meta.max_oracle_deviation.has_value());
  // re-serialising the parsed grid reproduces the emitted document exactly
  CHECK(to_json(g).dump() == j.dump());
  CHECK(metadata_from_json(to_json(g.meta)) == g.meta);
  CHECK(to_csv(g).rfind("x,re_f,im_f", 0) == 0);
}

TEST_CASE("kernel dump of a constant profile is zero") {
  auto doc = load("kernel_wave_linear.json");
  doc["k_profile"] = {{"type", "constant"}, {"params", {{"k0", 1.5}}}};
  const auto r = run_doc(Command::kernel_dump, doc);
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() == 17);
  for (std::size_t i = 1; i < ls.size(); ++i) {
    const auto v = fields(ls[i]);
    for (int c = 1; c <= 8; ++c) CHECK(v[c] == 0.0);
    CHECK(v[10] == doctest::Approx(3.0));
  }
}

TEST_CASE("kernel dump of k = x matches hand substitution") {
  const auto r = run_file(Command::kernel_dump, "kernel_wave_linear.json");
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  CHECK(ls[0] == "x,re_u11,im_u11,re_u12,im_u12,re_u21,im_u21,re_u22,im_u22,re_W,im_W,trace_residual");
  REQUIRE(ls.size() == 17);
  for (std::size_t i : {std::size_t{1}, std::size_t{6}, std::size_t{16}}) {
    const auto v = fields(ls[i]);
    const double x = v[0];
    // u11 = (1/2x)(-1 + 2 i x^2), u12 = (1/2x) e^{2ix^2}, u21 = conj(u12), u22 = conj(u11)
    const std::complex<double> u11(-1.0 / (2 * x), x);
    const std::complex<double> u12 = std::exp(std::complex<double>(0, 2 * x * x)) / (2 * x);
    CHECK(std::abs(std::complex<double>(v[1], v[2]) - u11) < 1e-12);
    CHECK(std::abs(std::complex<double>(v[3], v[4]) - u12) < 1e-12);
    CHECK(std::abs(std::complex<double>(v[5], v[6]) - std::conj(u12)) < 1e-12);
    CHECK(std::abs(std::complex<double>(v[7], v[8]) - std::conj(u11)) < 1e-12);
    CHECK(v[9] == 0.0);
    CHECK(v[10] == doctest::Approx(2 * x));
  }
  for (std::size_t i = 1; i < ls.size(); ++i) CHECK(fields(ls[i])[11] <= 1e-6);
}

TEST_CASE("spec errors exit with 2") {
  auto doc = load("wave_sin.json");
  CHECK(run_doc(Command::solve_ivp, doc).code == 0);

  auto missing = doc;
  missing["conditions"].erase("fp_c");
  const auto r = run_doc(Command::solve_ivp, missing);
  CHECK(r.code == kExitSpecError);
  CHECK(r.err.find("spec error") != std::string::npos);

  auto bad_format = doc;
  bad_format["output"]["format"] = "xml";
  CHECK(run_doc(Command::solve_ivp, bad_format).code == kExitSpecError);

  auto bad_grid = doc;
  bad_grid["output"]["grid"]["n"] = 0;
  CHECK(run_doc(Command::solve_ivp, bad_grid).code == kExitSpecError);

  auto bad_family = doc;
  bad_family["equation"]["family"] = "hankel";
  CHECK(run_doc(Command::solve_ivp, bad_family).code == kExitSpecError);

  auto scalar_complex = doc;
  scalar_complex["conditions"]["f_c"] = {1.0, 0.0, 2.0};
  CHECK(run_doc(Command::solve_ivp, scalar_complex).code == kExitSpecError);

  CHECK(run_doc(Command::solve_bvp, doc).code == kExitSpecError);
  CHECK(run_doc(Command::bloch, doc).code == kExitSpecError);

  std::ostringstream out, err;
  CHECK(run(Command::solve_ivp, std::string("/nonexistent/spec.json"), {}, out, err) == kExitSpecError);
}

TEST_CASE("numerical errors exit with 3 and name the error") {
  auto doc = load("airy_linear_bvp.json");
  doc["equation"]["family"] = "wave";
  doc["k_profile"] = {{"type", "constant"}, {"params", {{"k0", 1.0}}}};
  doc["conditions"]["c1"] = 0.0;
  doc["conditions"]["c2"] = std::acos(-1.0);
  doc["output"]["grid"] = {{"start", 0.0}, {"stop", 3.0}, {"n", 11}};
  const auto r = run_doc(Command::solve_bvp, doc);
  CHECK(r.code == kExitNumericalError);
  CHECK(r.err.find("ResonantBVP") != std::string::npos);

  auto per = load("bloch_periodic.json");
  per["conditions"]["L"] = 1.5;
  const auto p = run_doc(Command::bloch, per);
  CHECK(p.code == kExitNumericalError);
  CHECK(p.err.find("PeriodicityViolation") != std::string::npos);
}

TEST_CASE("overrides") {
  RunOverrides ov;
  ov.format = Format::json;
  ov.steps_per_unit = 500;
  ov.method = Method::magnus1;
  const auto r = run_file(Command::solve_ivp, "wave_sin.json", ov);
  REQUIRE(r.code == 0);
  const auto g = solution_grid_from_json(nlohmann::json::parse(r.out));
  CHECK(g.meta.method == "magnus1");
  CHECK(g.meta.steps_per_unit == 500);
  CHECK(!g.meta.max_oracle_deviation.has_value());
}

TEST_CASE("binary: exit codes, files and sidecar") {
  const fs::path dir = fs::temp_directory_path() / "dtmm_test_cli";
  fs::create_directories(dir);
  const fs::path out = dir / "wave.csv";
  fs::remove(out);
  fs::remove(dir / "wave.csv.meta.json");

  auto ok = exec("solve-ivp --spec " + (kSpecs / "wave_sin.json").string() + " --out " + out.string() + " --verify");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("max_oracle_deviation") != std::string::npos);
  REQUIRE(fs::exists(out));
  REQUIRE(fs::exists(dir / "wave.csv.meta.json"));
  std::ifstream meta(dir / "wave.csv.meta.json");
  const auto m = nlohmann::json::parse(meta);
  CHECK(m["max_oracle_deviation"].get<double>() <= 1e-6);
  CHECK(m["mode"] == "ivp");

  CHECK(exec("solve-ivp --spec " + (kSpecs / "wave_turning_point.json").string()).code == 3);
  CHECK(exec("solve-ivp --spec /nonexistent.json").code == 2);
  CHECK(exec("solve-ivp --spec " + (kSpecs / "wave_sin.json").string() + " --format xml").code == 2);
  CHECK(exec("frobnicate").code == 2);
  CHECK(exec("--help").code == 0);
  fs::remove_all(dir);
}
