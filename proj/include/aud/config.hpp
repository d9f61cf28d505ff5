#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "aud/experiments.hpp"

namespace aud {

// Configuration problems (bad file, unknown key, out-of-range value) are
// reported separately from runtime failures so the CLI can map them to a
// distinct exit code.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Angle as a rational multiple of pi; keeps config values exact across
// parse/render round trips.
struct AngleSpec {
  long num = 0;
  long den = 1;

  double radians() const;
  std::string text() const;
};

AngleSpec parse_angle(const std::string& text);

// [sweep] keys present in the file; unset keys fall back to the chosen
// experiment's built-in plan.
struct SweepOverrides {
  std::optional<SweepVariable> variable;
  std::optional<std::vector<double>> grid;
  std::optional<int> trials;
  std::optional<std::vector<Method>> methods;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct ParsedConfig {
  Scenario scenario;
  std::optional<bool> fixed_k;  // unset: the num_active experiment turns it on
  AngleSpec theta_min{-3, 7};
  AngleSpec theta_max{3, 7};
  DetectorBank detectors;
  SweepOverrides sweep;
};

// Flat INI with sections [scenario], [admm], [sweep]. Unknown keys and
// sections are hard errors; missing keys take the defaults.
ParsedConfig parse_config_text(const std::string& text, const std::string& origin = "<string>");
ParsedConfig parse_config(const std::string& path);

// Builds the runnable plan for one of the built-in experiment names,
// applying the config's scenario, solver settings, and sweep overrides.
ExperimentPlan assemble_plan(const ParsedConfig& config, const std::string& experiment);

// Renders every effective key; parse_config_text(render_config(c)) yields
// an equivalent configuration.
std::string render_config(const ParsedConfig& config);

// Config whose render reproduces `plan` exactly: scenario and detectors are
// taken from the plan and all sweep keys are pinned.
ParsedConfig effective_config(const ParsedConfig& input, const ExperimentPlan& plan);

}  // namespace aud
