#include "aud/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace aud {

namespace {

std::string trim(const std::string& s) {
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) {
    ++begin;
  }
  while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) {
    --end;
  }
  return s.substr(begin, end - begin);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& message) {
  throw ConfigError(origin + ":" + std::to_string(line) + ": " + message);
}

double parse_double(const std::string& value) {
  const std::string v = trim(value);
  if (v == "inf" || v == "+inf" || v == "infinity") {
    return std::numeric_limits<double>::infinity();
  }
  if (v == "-inf" || v == "-infinity") {
    return -std::numeric_limits<double>::infinity();
  }
  std::size_t consumed = 0;
  double parsed = 0.0;
  try {
    parsed = std::stod(v, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + value + "'");
  }
  if (consumed != v.size()) {
    throw ConfigError("trailing characters in number: '" + value + "'");
  }
  return parsed;
}

long parse_long(const std::string& value) {
  const std::string v = trim(value);
  std::size_t consumed = 0;
  long parsed = 0;
  try {
    parsed = std::stol(v, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("not an integer: '" + value + "'");
  }
  if (consumed != v.size()) {
    throw ConfigError("trailing characters in integer: '" + value + "'");
  }
  return parsed;
}

int parse_int(const std::string& value) { return static_cast<int>(parse_long(value)); }

std::uint64_t parse_uint64(const std::string& value) {
  const std::string v = trim(value);
  std::size_t consumed = 0;
  unsigned long long parsed = 0;
  try {
    parsed = std::stoull(v, &consumed);
  } catch (const std::exception&) {
    throw ConfigError("not an unsigned integer: '" + value + "'");
  }
  if (consumed != v.size()) {
    throw ConfigError("trailing characters in integer: '" + value + "'");
  }
  return static_cast<std::uint64_t>(parsed);
}

bool parse_bool(const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes") {
    return true;
  }
  if (v == "false" || v == "0" || v == "no") {
    return false;
  }
  throw ConfigError("not a boolean: '" + value + "' (expected true/false)");
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::string current;
  std::stringstream stream(value);
  while (std::getline(stream, current, ',')) {
    const std::string item = trim(current);
    if (item.empty()) {
      throw ConfigError("empty element in list: '" + value + "'");
    }
    items.push_back(item);
  }
  if (items.empty()) {
    throw ConfigError("empty list");
  }
  return items;
}

std::string format_double(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace

double AngleSpec::radians() const {
  return static_cast<double>(num) * Scenario::kPi / static_cast<double>(den);
}

std::string AngleSpec::text() const {
  if (num == 0) {
    return "0";
  }
  if (den == 1) {
    return std::to_string(num) + " pi";
  }
  return std::to_string(num) + "/" + std::to_string(den) + " pi";
}

AngleSpec parse_angle(const std::string& text) {
  std::string v = trim(text);
  if (v == "0") {
    return AngleSpec{0, 1};
  }
  if (v.size() < 2 || v.substr(v.size() - 2) != "pi") {
    throw ConfigError("angle must be a rational multiple of pi (like '-3/7 pi' or '0'): '" +
                      text + "'");
  }
  v = trim(v.substr(0, v.size() - 2));
  long num = 1;
  long den = 1;
  if (v.empty()) {
    num = 1;
  } else if (v == "-") {
    num = -1;
  } else {
    const std::size_t slash = v.find('/');
    try {
      if (slash == std::string::npos) {
        num = parse_long(v);
      } else {
        num = parse_long(v.substr(0, slash));
        den = parse_long(v.substr(slash + 1));
      }
    } catch (const ConfigError&) {
      throw ConfigError("malformed angle: '" + text + "'");
    }
    if (den <= 0) {
      throw ConfigError("angle denominator must be positive: '" + text + "'");
    }
  }
  return AngleSpec{num, den};
}

ParsedConfig parse_config_text(const std::string& text, const std::string& origin) {
  ParsedConfig config;
  std::istringstream stream(text);
  std::string raw_line;
  std::string section;
  int line_no = 0;

  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string line = raw_line;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) {
      line = line.substr(0, comment);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') {
        fail(origin, line_no, "malformed section header: '" + line + "'");
      }
      section = trim(line.substr(1, line.size() - 2));
      if (section != "scenario" && section != "admm" && section != "sweep") {
        fail(origin, line_no,
             "unknown section [" + section + "] (expected [scenario], [admm], [sweep])");
      }
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      fail(origin, line_no, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty()) {
      fail(origin, line_no, "key '" + key + "' appears before any section header");
    }
    if (key.empty()) {
      fail(origin, line_no, "empty key");
    }
    if (value.empty()) {
      fail(origin, line_no, "empty value for key '" + key + "'");
    }

    try {
      if (section == "scenario") {
        if (key == "num_users") {
          config.scenario.num_users = parse_int(value);
        } else if (key == "num_active") {
          config.scenario.num_active = parse_int(value);
        } else if (key == "num_antennas") {
          config.scenario.num_antennas = parse_int(value);
        } else if (key == "carrier_hz") {
          config.scenario.carrier_hz = parse_double(value);
        } else if (key == "r_min") {
          config.scenario.r_min = parse_double(value);
        } else if (key == "r_max") {
          config.scenario.r_max = parse_double(value);
        } else if (key == "theta_min") {
          config.theta_min = parse_angle(value);
          config.scenario.theta_min = config.theta_min.radians();
        } else if (key == "theta_max") {
          config.theta_max = parse_angle(value);
          config.scenario.theta_max = config.theta_max.radians();
        } else if (key == "pilot_length") {
          config.scenario.pilot_length = parse_int(value);
        } else if (key == "snr_db") {
          config.scenario.snr_db = parse_double(value);
        } else if (key == "mu") {
          config.scenario.mu = parse_double(value);
        } else if (key == "sigma") {
          config.scenario.sigma = parse_double(value);
        } else if (key == "fixed_k") {
          config.fixed_k = parse_bool(value);
          config.scenario.fixed_active_count = *config.fixed_k;
        } else if (key == "orthonormal_pilots") {
          config.scenario.orthonormal_pilots = parse_bool(value);
        } else {
          throw ConfigError("unknown key '" + key + "' in [scenario]");
        }
      } else if (section == "admm") {
        if (key == "beta") {
          config.detectors.admm_li.beta = parse_double(value);
          config.detectors.baseline.beta = config.detectors.admm_li.beta;
        } else if (key == "rho") {
          config.detectors.admm_li.rho = parse_double(value);
          config.detectors.baseline.rho = config.detectors.admm_li.rho;
        } else if (key == "epsilon0") {
          config.detectors.admm_li.epsilon0 = parse_double(value);
          config.detectors.baseline.epsilon0 = config.detectors.admm_li.epsilon0;
        } else if (key == "outer_iterations") {
          config.detectors.admm_li.outer_iterations = parse_int(value);
          config.detectors.baseline.outer_iterations = config.detectors.admm_li.outer_iterations;
        } else if (key == "inner_iterations") {
          config.detectors.admm_li.inner_iterations = parse_int(value);
          config.detectors.baseline.inner_iterations = config.detectors.admm_li.inner_iterations;
        } else if (key == "threshold_li") {
          config.detectors.admm_li.activity_threshold = parse_double(value);
        } else if (key == "threshold_baseline") {
          config.detectors.baseline.activity_threshold = parse_double(value);
        } else {
          throw ConfigError("unknown key '" + key + "' in [admm]");
        }
      } else {  // sweep
        if (key == "variable") {
          config.sweep.variable = parse_sweep_variable(trim(value));
        } else if (key == "grid") {
          std::vector<double> grid;
          for (const std::string& item : split_list(value)) {
            grid.push_back(parse_double(item));
          }
          config.sweep.grid = grid;
        } else if (key == "trials") {
          config.sweep.trials = parse_int(value);
        } else if (key == "methods") {
          std::vector<Method> methods;
          for (const std::string& item : split_list(value)) {
            methods.push_back(parse_method(item));
          }
          config.sweep.methods = methods;
        } else if (key == "seed") {
          config.sweep.seed = parse_uint64(value);
        } else if (key == "threads") {
          config.sweep.threads = parse_int(value);
        } else {
          throw ConfigError("unknown key '" + key + "' in [sweep]");
        }
      }
    } catch (const ConfigError& e) {
      fail(origin, line_no, e.what());
    } catch (const std::invalid_argument& e) {
      fail(origin, line_no, e.what());
    }
  }

  // Surface out-of-range values (naming the violated invariant) at parse
  // time rather than first use.
  try {
    config.scenario.validate();
    config.detectors.admm_li.validate();
    config.detectors.baseline.validate();
  } catch (const std::exception& e) {
    throw ConfigError(origin + ": " + e.what());
  }
  return config;
}

ParsedConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("cannot open config file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str(), path);
}

ExperimentPlan assemble_plan(const ParsedConfig& config, const std::string& experiment) {
  ExperimentPlan plan = builtin_experiment(experiment);
  const bool builtin_fixed_k = plan.base.fixed_active_count;
  plan.base = config.scenario;
  plan.base.fixed_active_count = config.fixed_k.value_or(builtin_fixed_k);
  plan.detectors = config.detectors;
  if (config.sweep.variable) {
    plan.variable = *config.sweep.variable;
  }
  if (config.sweep.grid) {
    plan.grid = *config.sweep.grid;
  }
  if (config.sweep.trials) {
    plan.trials = *config.sweep.trials;
  }
  if (config.sweep.methods) {
    plan.methods = *config.sweep.methods;
  }
  if (config.sweep.seed) {
    plan.master_seed = *config.sweep.seed;
  }
  if (config.sweep.threads) {
    plan.threads = *config.sweep.threads;
  }
  return plan;
}

std::string render_config(const ParsedConfig& config) {
  const Scenario& s = config.scenario;
  std::ostringstream out;
  out << "[scenario]\n";
  out << "num_users = " << s.num_users << "\n";
  out << "num_active = " << s.num_active << "\n";
  out << "num_antennas = " << s.num_antennas << "\n";
  out << "carrier_hz = " << format_double(s.carrier_hz) << "\n";
  out << "r_min = " << format_double(s.r_min) << "\n";
  out << "r_max = " << format_double(s.r_max) << "\n";
  out << "theta_min = " << config.theta_min.text() << "\n";
  out << "theta_max = " << config.theta_max.text() << "\n";
  out << "pilot_length = " << s.pilot_length << "\n";
  out << "snr_db = " << format_double(s.snr_db) << "\n";
  out << "mu = " << format_double(s.mu) << "\n";
  out << "sigma = " << format_double(s.sigma) << "\n";
  out << "fixed_k = " << (s.fixed_active_count ? "true" : "false") << "\n";
  out << "orthonormal_pilots = " << (s.orthonormal_pilots ? "true" : "false") << "\n";
  out << "\n[admm]\n";
  const AdmmConfig& li = config.detectors.admm_li;
  out << "beta = " << format_double(li.beta) << "\n";
  out << "rho = " << format_double(li.rho) << "\n";
  out << "epsilon0 = " << format_double(li.epsilon0) << "\n";
  out << "outer_iterations = " << li.outer_iterations << "\n";
  out << "inner_iterations = " << li.inner_iterations << "\n";
  out << "threshold_li = " << format_double(li.activity_threshold) << "\n";
  out << "threshold_baseline = " << format_double(config.detectors.baseline.activity_threshold)
      << "\n";
  out << "\n[sweep]\n";
  if (config.sweep.variable) {
    out << "variable = " << sweep_variable_name(*config.sweep.variable) << "\n";
  }
  if (config.sweep.grid) {
    out << "grid = ";
    for (std::size_t i = 0; i < config.sweep.grid->size(); ++i) {
      out << (i ? ", " : "") << format_double((*config.sweep.grid)[i]);
    }
    out << "\n";
  }
  if (config.sweep.trials) {
    out << "trials = " << *config.sweep.trials << "\n";
  }
  if (config.sweep.methods) {
    out << "methods = ";
    for (std::size_t i = 0; i < config.sweep.methods->size(); ++i) {
      out << (i ? ", " : "") << method_name((*config.sweep.methods)[i]);
    }
    out << "\n";
  }
  if (config.sweep.seed) {
    out << "seed = " << *config.sweep.seed << "\n";
  }
  if (config.sweep.threads) {
    out << "threads = " << *config.sweep.threads << "\n";
  }
  return out.str();
}

ParsedConfig effective_config(const ParsedConfig& input, const ExperimentPlan& plan) {
  ParsedConfig out = input;
  out.scenario = plan.base;
  out.fixed_k = plan.base.fixed_active_count;
  out.detectors = plan.detectors;
  out.sweep.variable = plan.variable;
  out.sweep.grid = plan.grid;
  out.sweep.trials = plan.trials;
  out.sweep.methods = plan.methods;
  out.sweep.seed = plan.master_seed;
  out.sweep.threads = plan.threads;
  return out;
}

}  // namespace aud
