#include "aud/cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "aud/config.hpp"
#include "aud/csv.hpp"
#include "aud/experiments.hpp"

namespace aud {

namespace {

constexpr int kConfigExit = 2;
constexpr int kRuntimeExit = 3;

std::vector<Method> parse_method_list(const std::string& list) {
  std::vector<Method> methods;
  std::stringstream stream(list);
  std::string item;
  while (std::getline(stream, item, ',')) {
    const auto begin = item.find_first_not_of(" \t");
    const auto end = item.find_last_not_of(" \t");
    if (begin == std::string::npos) {
      throw ConfigError("empty method name in '" + list + "'");
    }
    methods.push_back(parse_method(item.substr(begin, end - begin + 1)));
  }
  if (methods.empty()) {
    throw ConfigError("no methods given");
  }
  return methods;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << content;
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

void print_summary(const SweepResult& result, std::ostream& out) {
  for (const SweepCell& cell : result.cells) {
    for (const MethodAggregate& agg : cell.per_method) {
      out << result.experiment << " " << result.sweep_param << "=" << cell.sweep_value << " "
          << method_name(agg.method) << ": 1-A=" << agg.mean_one_minus_a
          << " (se=" << agg.std_err << ") tpr=" << agg.mean_tpr << " tnr=" << agg.mean_tnr
          << " trials=" << agg.trials_requested - agg.failed_trials << "/"
          << agg.trials_requested << " wall=" << agg.mean_wall_ms << " ms/trial\n";
    }
    for (const std::string& message : cell.failure_messages) {
      out << "  failed: " << message << "\n";
    }
  }
}

struct RunArgs {
  std::string experiment;
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<std::string> methods;
  std::optional<int> threads;
  std::optional<double> threshold_li;
  std::optional<double> threshold_baseline;
};

int do_run(const RunArgs& args) {
  ParsedConfig config;
  ExperimentPlan plan;
  try {
    config = parse_config(args.config_path);
    plan = assemble_plan(config, args.experiment);
    if (args.seed) {
      plan.master_seed = *args.seed;
    }
    if (args.trials) {
      plan.trials = *args.trials;
    }
    if (args.methods) {
      plan.methods = parse_method_list(*args.methods);
    }
    if (args.threads) {
      plan.threads = *args.threads;
    }
    if (args.threshold_li) {
      plan.detectors.admm_li.activity_threshold = *args.threshold_li;
    }
    if (args.threshold_baseline) {
      plan.detectors.baseline.activity_threshold = *args.threshold_baseline;
    }
    plan.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  }

  try {
    const SweepResult result = run_sweep(plan);
    std::filesystem::create_directories(args.out_dir);
    const std::string csv_path =
        (std::filesystem::path(args.out_dir) / (plan.name + ".csv")).string();
    emit_csv(result, csv_path);
    const std::string config_path =
        (std::filesystem::path(args.out_dir) / "effective_config.ini").string();
    write_file(config_path, render_config(effective_config(config, plan)));
    print_summary(result, std::cout);
    std::cout << "wrote " << csv_path << "\n";
    std::cout << "wrote " << config_path << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}

int do_validate(const std::string& config_path) {
  try {
    const ParsedConfig config = parse_config(config_path);
    // Exercise the sweep overrides against a plan so bad grids surface here.
    ExperimentPlan plan = assemble_plan(config, "single");
    plan.validate();
    std::cout << "configuration OK\n" << render_config(effective_config(config, plan));
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  }
}

int do_calibrate(const std::string& config_path, int trials, std::uint64_t seed) {
  ParsedConfig config;
  try {
    config = parse_config(config_path);
    if (trials < 1) {
      throw ConfigError("trials must be >= 1");
    }
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  }
  try {
    const CalibrationResult result = calibrate_baseline_threshold(
        config.scenario, config.detectors.baseline, trials, seed);
    std::cout << "baseline threshold = " << std::setprecision(17) << result.threshold << "\n";
    std::cout << "mean 1-A at optimum = " << result.mean_one_minus_a << "\n";
    std::cout << "trials = " << result.trials << ", seed = " << seed << "\n";
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}

int do_plot_data(const std::string& csv_path, const std::string& out_dir) {
  try {
    const std::vector<CsvRow> rows = read_csv(csv_path);
    if (rows.empty()) {
      throw std::runtime_error("csv has no data rows: " + csv_path);
    }
    std::filesystem::create_directories(out_dir);
    std::set<std::string> methods;
    for (const CsvRow& row : rows) {
      methods.insert(row.method);
    }
    for (const std::string& method : methods) {
      const std::string path =
          (std::filesystem::path(out_dir) / (rows.front().experiment + "_" + method + ".dat"))
              .string();
      write_file(path, render_gnuplot_series(rows, method));
      std::cout << "wrote " << path << "\n";
    }
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeExit;
  }
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"active-user detection simulator (location-aided ADMM vs baseline)"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run an experiment sweep and write CSV results");
  std::string experiments_help;
  for (const std::string& name : builtin_experiment_names()) {
    experiments_help += experiments_help.empty() ? name : ", " + name;
  }
  run->add_option("--experiment", run_args.experiment, "one of: " + experiments_help)
      ->required();
  run->add_option("--config", run_args.config_path, "configuration file")->required();
  run->add_option("--out", run_args.out_dir, "output directory")->required();
  std::uint64_t seed_arg = 0;
  int trials_arg = 0;
  std::string methods_arg;
  int threads_arg = 0;
  CLI::Option* seed_opt = run->add_option("--seed", seed_arg, "master seed override");
  CLI::Option* trials_opt = run->add_option("--trials", trials_arg, "trials per grid point");
  CLI::Option* methods_opt =
      run->add_option("--methods", methods_arg, "comma-separated: admm_li,baseline");
  CLI::Option* threads_opt =
      run->add_option("--threads", threads_arg, "worker threads (0 = hardware)");
  double threshold_li_arg = 0.0;
  double threshold_baseline_arg = 0.0;
  CLI::Option* threshold_li_opt = run->add_option(
      "--threshold-li", threshold_li_arg, "activity threshold override for admm_li");
  CLI::Option* threshold_baseline_opt = run->add_option(
      "--threshold-baseline", threshold_baseline_arg, "activity threshold override for baseline");

  std::string validate_config;
  CLI::App* validate = app.add_subcommand("validate", "check a configuration file");
  validate->add_option("--config", validate_config, "configuration file")->required();

  std::string calibrate_config;
  int calibrate_trials = 1000;
  std::uint64_t calibrate_seed = 271828;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate-threshold", "sweep the baseline decision threshold for best mean accuracy");
  calibrate->add_option("--config", calibrate_config, "configuration file")->required();
  calibrate->add_option("--trials", calibrate_trials, "calibration trials");
  calibrate->add_option("--seed", calibrate_seed, "calibration seed");

  std::string plot_csv;
  std::string plot_out;
  CLI::App* plot = app.add_subcommand("plot-data", "split a result CSV into gnuplot series");
  plot->add_option("--csv", plot_csv, "input CSV from `aud run`")->required();
  plot->add_option("--out", plot_out, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  if (run->parsed()) {
    if (seed_opt->count() > 0) {
      run_args.seed = seed_arg;
    }
    if (trials_opt->count() > 0) {
      run_args.trials = trials_arg;
    }
    if (methods_opt->count() > 0) {
      run_args.methods = methods_arg;
    }
    if (threads_opt->count() > 0) {
      run_args.threads = threads_arg;
    }
    if (threshold_li_opt->count() > 0) {
      run_args.threshold_li = threshold_li_arg;
    }
    if (threshold_baseline_opt->count() > 0) {
      run_args.threshold_baseline = threshold_baseline_arg;
    }
    return do_run(run_args);
  }
  if (validate->parsed()) {
    return do_validate(validate_config);
  }
  if (calibrate->parsed()) {
    return do_calibrate(calibrate_config, calibrate_trials, calibrate_seed);
  }
  return do_plot_data(plot_csv, plot_out);
}

}  // namespace aud
