#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "dtmm/app/problem_spec.hpp"

namespace dtmm::app {

enum class Command { solve_ivp, solve_bvp, bloch, kernel_dump, verify };

struct RunOverrides {
  std::optional<std::string> out;
  std::optional<Format> format;
  std::optional<double> steps_per_unit;
  std::optional<Method> method;
  bool verify = false;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitSpecError = 2;
inline constexpr int kExitNumericalError = 3;

/// Executes one command on a spec file. Results go to overrides.out (or `out` when unset);
/// diagnostics go to `err`. Returns the process exit code.
int run(Command cmd, const std::string& spec_path, const RunOverrides& overrides, std::ostream& out,
        std::ostream& err);

/// Same, on an already-parsed spec document.
int run(Command cmd, const nlohmann::json& doc, const RunOverrides& overrides, std::ostream& out,
        std::ostream& err);

/// Steps per unit used when the spec does not set one: 2000 * max(1, sup|k'|).
double default_steps_per_unit(const EigenvalueFunction& kf, double lo, double hi);

}  // namespace dtmm::app
