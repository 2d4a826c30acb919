#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <spdlog/cfg/helpers.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "dtmm/app/runner.hpp"

namespace {

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("dtmm");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("DTMM_LOG")) spdlog::cfg::helpers::load_levels(level);
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  using dtmm::app::Command;

  CLI::App app{"Differential transfer matrix solver for second-order ODEs with a variable eigenvalue"};
  app.require_subcommand(1);

  std::string spec_path;
  std::string out_path;
  std::string format;
  std::string method;
  double steps = 0.0;
  bool verify = false;

  struct Sub {
    const char* name;
    const char* help;
    Command cmd;
  };
  const Sub subs[] = {
      {"solve-ivp", "Initial value problem on the spec grid", Command::solve_ivp},
      {"solve-bvp", "Two-point boundary value problem on the spec grid", Command::solve_bvp},
      {"bloch", "Bloch wavenumbers of a periodic profile", Command::bloch},
      {"kernel-dump", "Tabulate kernel entries, Wronskian and trace residual", Command::kernel_dump},
      {"verify", "Run the spec's mode and compare against direct integration", Command::verify},
  };
  Command chosen = Command::solve_ivp;
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--spec", spec_path, "Problem spec (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--steps", steps, "Steps per unit length")->check(CLI::PositiveNumber);
    sub->add_option("--method", method, "ordered, magnus1, diagonal or series")
        ->check(CLI::IsMember({"ordered", "magnus1", "diagonal", "series"}));
    sub->add_flag("--verify", verify, "Compare against the direct-integration oracle");
    sub->callback([&chosen, cmd = s.cmd] { chosen = cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return dtmm::app::kExitSpecError;
  }

  dtmm::app::RunOverrides ov;
  if (!out_path.empty()) ov.out = out_path;
  if (!format.empty()) ov.format = dtmm::app::parse_format(format);
  if (!method.empty()) ov.method = dtmm::app::parse_method(method);
  if (steps > 0.0) ov.steps_per_unit = steps;
  ov.verify = verify;
  return dtmm::app::run(chosen, spec_path, ov, std::cout, std::cerr);
}
