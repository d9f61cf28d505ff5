#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "aud/cli.hpp"
#include "aud/config.hpp"
#include "aud/csv.hpp"
#include "doctest.h"

using namespace aud;
namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct TempDir {
  fs::path path;

  TempDir() {
    path = fs::temp_directory_path() / ("aud_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::string file(const std::string& name, const std::string& content) const {
    const std::string full = (path / name).string();
    std::ofstream out(full, std::ios::binary);
    out << content;
    return full;
  }
};

// Invokes the command-line entry point with stdout/stderr captured, so test
// logs stay readable and the text is assertable.
struct CliResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

CliResult call_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "aud");
  std::vector<char*> argv;
  argv.reserve(args.size());
  for (std::string& arg : args) {
    argv.push_back(arg.data());
  }
  std::ostringstream captured_out;
  std::ostringstream captured_err;
  std::streambuf* old_out = std::cout.rdbuf(captured_out.rdbuf());
  std::streambuf* old_err = std::cerr.rdbuf(captured_err.rdbuf());
  CliResult result;
  result.exit_code = run_cli(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  result.out = captured_out.str();
  result.err = captured_err.str();
  return result;
}

// Scenario small enough for end-to-end runs inside the unit suite.
const char* kSmallScenario =
    "[scenario]\n"
    "num_users = 8\n"
    "num_active = 2\n"
    "pilot_length = 4\n";

void check_equal(const ParsedConfig& a, const ParsedConfig& b) {
  CHECK(a.scenario.num_users == b.scenario.num_users);
  CHECK(a.scenario.num_active == b.scenario.num_active);
  CHECK(a.scenario.num_antennas == b.scenario.num_antennas);
  CHECK(a.scenario.carrier_hz == b.scenario.carrier_hz);
  CHECK(a.scenario.r_min == b.scenario.r_min);
  CHECK(a.scenario.r_max == b.scenario.r_max);
  CHECK(a.scenario.theta_min == b.scenario.theta_min);
  CHECK(a.scenario.theta_max == b.scenario.theta_max);
  CHECK(a.scenario.pilot_length == b.scenario.pilot_length);
  CHECK(a.scenario.snr_db == b.scenario.snr_db);
  CHECK(a.scenario.mu == b.scenario.mu);
  CHECK(a.scenario.sigma == b.scenario.sigma);
  CHECK(a.scenario.fixed_active_count == b.scenario.fixed_active_count);
  CHECK(a.scenario.orthonormal_pilots == b.scenario.orthonormal_pilots);
  CHECK(a.detectors.admm_li.beta == b.detectors.admm_li.beta);
  CHECK(a.detectors.admm_li.rho == b.detectors.admm_li.rho);
  CHECK(a.detectors.admm_li.epsilon0 == b.detectors.admm_li.epsilon0);
  CHECK(a.detectors.admm_li.outer_iterations == b.detectors.admm_li.outer_iterations);
  CHECK(a.detectors.admm_li.inner_iterations == b.detectors.admm_li.inner_iterations);
  CHECK(a.detectors.admm_li.activity_threshold == b.detectors.admm_li.activity_threshold);
  CHECK(a.detectors.baseline.activity_threshold == b.detectors.baseline.activity_threshold);
  CHECK(a.sweep.variable == b.sweep.variable);
  CHECK(a.sweep.grid == b.sweep.grid);
  CHECK(a.sweep.trials == b.sweep.trials);
  CHECK(a.sweep.methods == b.sweep.methods);
  CHECK(a.sweep.seed == b.sweep.seed);
  CHECK(a.sweep.threads == b.sweep.threads);
}

}  // namespace

TEST_CASE("angle parsing") {
  CHECK(parse_angle("0").num == 0);
  CHECK(parse_angle("pi").num == 1);
  CHECK(parse_angle("pi").den == 1);
  CHECK(parse_angle("-pi").num == -1);
  CHECK(parse_angle("3/7 pi").num == 3);
  CHECK(parse_angle("3/7 pi").den == 7);
  CHECK(parse_angle("-3/7 pi").num == -3);
  CHECK(parse_angle("2 pi").num == 2);
  CHECK(parse_angle(" -1/2 pi ").den == 2);
  CHECK_THROWS_AS(parse_angle("1.5 pi"), ConfigError);
  CHECK_THROWS_AS(parse_angle("3/0 pi"), ConfigError);
  CHECK_THROWS_AS(parse_angle("3/-2 pi"), ConfigError);
  CHECK_THROWS_AS(parse_angle("90deg"), ConfigError);

  // The default sector must reproduce the scenario default bit for bit so
  // that untouched configs round-trip exactly.
  const Scenario defaults;
  CHECK(AngleSpec{-3, 7}.radians() == defaults.theta_min);
  CHECK(AngleSpec{3, 7}.radians() == defaults.theta_max);
  CHECK(AngleSpec{-3, 7}.text() == "-3/7 pi");
  CHECK(AngleSpec{0, 1}.text() == "0");
  CHECK(AngleSpec{2, 1}.text() == "2 pi");
}

TEST_CASE("empty config text yields the reference operating point") {
  const ParsedConfig config = parse_config_text("");
  CHECK(config.scenario.num_users == 24);
  CHECK(config.scenario.num_active == 4);
  CHECK(config.scenario.num_antennas == 32);
  CHECK(config.scenario.carrier_hz == 1710e6);
  CHECK(config.scenario.r_min == 20.0);
  CHECK(config.scenario.r_max == 80.0);
  CHECK(config.scenario.pilot_length == 6);
  CHECK(config.scenario.snr_db == 0.0);
  CHECK(config.scenario.noise_variance() == 1.0);
  CHECK(std::isinf(config.scenario.mu));
  CHECK(config.scenario.sigma == 0.0);
  CHECK_FALSE(config.scenario.fixed_active_count);
  CHECK_FALSE(config.fixed_k.has_value());
  CHECK(config.detectors.admm_li.beta == 1e-5);
  CHECK(config.detectors.admm_li.rho == 0.1);
  CHECK(config.detectors.admm_li.epsilon0 == 0.1);
  CHECK(config.detectors.admm_li.outer_iterations == 10);
  CHECK(config.detectors.admm_li.inner_iterations == 10);
  CHECK(config.detectors.admm_li.activity_threshold == 0.5);
  CHECK(config.detectors.baseline.activity_threshold == kCalibratedBaselineThreshold);
  CHECK_FALSE(config.sweep.variable.has_value());
  CHECK_FALSE(config.sweep.grid.has_value());
}

TEST_CASE("scenario and solver keys are applied") {
  const ParsedConfig config = parse_config_text(
      "[scenario]\n"
      "num_users = 12\n"
      "num_active = 3\n"
      "snr_db = inf\n"
      "mu = 2\n"
      "sigma = 1.5\n"
      "theta_min = -1/3 pi\n"
      "theta_max = 1/3 pi\n"
      "fixed_k = true\n"
      "\n"
      "[admm]\n"
      "beta = 2e-5\n"
      "rho = 0.25 ; comment after value\n"
      "threshold_baseline = 0.1\n"
      "\n"
      "[sweep]\n"
      "variable = snr_db\n"
      "grid = -10, 0, inf\n"
      "trials = 17\n"
      "methods = baseline\n"
      "seed = 42\n"
      "threads = 2\n");
  CHECK(config.scenario.num_users == 12);
  CHECK(config.scenario.num_active == 3);
  CHECK(std::isinf(config.scenario.snr_db));
  CHECK(config.scenario.noise_variance() == 0.0);
  CHECK(config.scenario.mu == 2.0);
  CHECK(config.scenario.sigma == 1.5);
  CHECK(config.scenario.theta_min == AngleSpec{-1, 3}.radians());
  CHECK(config.fixed_k == true);
  CHECK(config.scenario.fixed_active_count);
  // Shared hyper-parameters land in both solvers; thresholds stay separate.
  CHECK(config.detectors.admm_li.beta == 2e-5);
  CHECK(config.detectors.baseline.beta == 2e-5);
  CHECK(config.detectors.admm_li.rho == 0.25);
  CHECK(config.detectors.baseline.rho == 0.25);
  CHECK(config.detectors.admm_li.activity_threshold == 0.5);
  CHECK(config.detectors.baseline.activity_threshold == 0.1);
  CHECK(config.sweep.variable == SweepVariable::snr_db);
  CHECK(config.sweep.grid == std::vector<double>{-10.0, 0.0, kInf});
  CHECK(config.sweep.trials == 17);
  CHECK(config.sweep.methods == std::vector<Method>{Method::baseline});
  CHECK(config.sweep.seed == std::uint64_t{42});
  CHECK(config.sweep.threads == 2);
}

TEST_CASE("config errors carry origin and line number") {
  const auto message_of = [](const std::string& text) {
    try {
      parse_config_text(text, "test.ini");
      return std::string("(no error)");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
  };

  CHECK(message_of("[scenario]\nbogus = 1\n").find("test.ini:2") == 0);
  CHECK(message_of("[scenario]\nbogus = 1\n").find("unknown key 'bogus'") != std::string::npos);
  CHECK(message_of("[frobnicate]\n").find("test.ini:1") == 0);
  CHECK(message_of("num_users = 8\n").find("before any section") != std::string::npos);
  CHECK(message_of("[scenario]\nnum_users banana\n").find("expected 'key = value'") !=
        std::string::npos);
  CHECK(message_of("[scenario]\nnum_users = banana\n").find("test.ini:2") == 0);
  CHECK(message_of("[scenario]\nnum_users =\n").find("empty value") != std::string::npos);
  CHECK(message_of("[sweep]\nmethods = baseline,,admm_li\n").find("empty element") !=
        std::string::npos);
  CHECK(message_of("[sweep]\nvariable = warp\n").find("unknown sweep variable") !=
        std::string::npos);

  // Out-of-range values fail at parse time, naming the violated invariant.
  CHECK(message_of("[scenario]\nnum_users = 1\n").find("num_users must be >= 2") !=
        std::string::npos);
  CHECK(message_of("[scenario]\nr_max = 500\n").find("near-field") != std::string::npos);
  CHECK(message_of("[admm]\nrho = 0\n").find("rho") != std::string::npos);
}

TEST_CASE("config render/parse round trip") {
  const std::string text =
      "[scenario]\n"
      "num_users = 10\n"
      "num_active = 3\n"
      "sigma = 2.5\n"
      "theta_min = -2/5 pi\n"
      "theta_max = 2/5 pi\n"
      "[admm]\n"
      "beta = 3.5e-6\n"
      "threshold_baseline = 0.07\n"
      "[sweep]\n"
      "variable = sigma\n"
      "grid = 0, 2.5, 10\n"
      "trials = 5\n"
      "methods = admm_li, baseline\n"
      "seed = 99\n";
  const ParsedConfig config = parse_config_text(text);
  const ParsedConfig reparsed = parse_config_text(render_config(config));
  check_equal(config, reparsed);
}

TEST_CASE("plan assembly merges builtins, config, and overrides") {
  SUBCASE("untouched config keeps the builtin sweep") {
    const ParsedConfig config = parse_config_text("");
    const ExperimentPlan plan = assemble_plan(config, "snr");
    CHECK(plan.name == "snr");
    CHECK(plan.variable == SweepVariable::snr_db);
    CHECK(plan.grid == std::vector<double>{-10.0, -5.0, 0.0, 5.0});
    CHECK(plan.trials == 1000);
    CHECK(plan.master_seed == 1710);
    CHECK(plan.methods == std::vector<Method>{Method::admm_li, Method::baseline});
  }

  SUBCASE("the num_active experiment flips to fixed counts unless overridden") {
    CHECK(assemble_plan(parse_config_text(""), "num_active").base.fixed_active_count);
    CHECK_FALSE(assemble_plan(parse_config_text(""), "snr").base.fixed_active_count);
    const ParsedConfig off = parse_config_text("[scenario]\nfixed_k = false\n");
    CHECK_FALSE(assemble_plan(off, "num_active").base.fixed_active_count);
    const ParsedConfig on = parse_config_text("[scenario]\nfixed_k = true\n");
    CHECK(assemble_plan(on, "snr").base.fixed_active_count);
  }

  SUBCASE("sweep keys override the builtin plan") {
    const ParsedConfig config = parse_config_text(
        "[sweep]\n"
        "grid = -4, 4\n"
        "trials = 7\n"
        "seed = 5\n"
        "threads = 1\n");
    const ExperimentPlan plan = assemble_plan(config, "snr");
    CHECK(plan.grid == std::vector<double>{-4.0, 4.0});
    CHECK(plan.trials == 7);
    CHECK(plan.master_seed == 5);
    CHECK(plan.threads == 1);
    CHECK(plan.variable == SweepVariable::snr_db);  // untouched
  }

  SUBCASE("effective config reproduces the plan through a render cycle") {
    const ParsedConfig config = parse_config_text(
        "[scenario]\n"
        "num_users = 12\n"
        "[sweep]\n"
        "trials = 9\n");
    const ExperimentPlan plan = assemble_plan(config, "mu");
    const ParsedConfig effective = effective_config(config, plan);
    const ParsedConfig reparsed = parse_config_text(render_config(effective));
    check_equal(effective, reparsed);
    const ExperimentPlan replan = assemble_plan(reparsed, "mu");
    CHECK(replan.grid == plan.grid);
    CHECK(replan.trials == plan.trials);
    CHECK(replan.master_seed == plan.master_seed);
    CHECK(replan.base.num_users == plan.base.num_users);
    CHECK(replan.base.fixed_active_count == plan.base.fixed_active_count);
    CHECK(replan.variable == plan.variable);
  }
}

TEST_CASE("csv rendering and parsing") {
  SweepResult result;
  result.experiment = "mu";
  result.sweep_param = "mu";
  result.master_seed = 1710;
  for (double value : {0.5, kInf}) {
    SweepCell cell;
    cell.sweep_value = value;
    for (Method method : {Method::admm_li, Method::baseline}) {
      MethodAggregate agg;
      agg.method = method;
      agg.mean_one_minus_a = value == 0.5 ? 0.125 : 0.0625;
      agg.mean_tpr = 0.9;
      agg.mean_tnr = 0.95;
      agg.std_err = 0.001953125;
      agg.mean_wall_ms = 1.5;
      agg.trials_requested = 100;
      agg.failed_trials = value == 0.5 ? 1 : 0;
      cell.per_method.push_back(agg);
    }
    result.cells.push_back(cell);
  }

  const std::string text = render_csv(result);
  const std::vector<std::string> lines = [&] {
    std::vector<std::string> out;
    std::istringstream stream(text);
    std::string line;
    while (std::getline(stream, line)) {
      out.push_back(line);
    }
    return out;
  }();
  REQUIRE(lines.size() == 5);
  CHECK(lines[0] ==
        "experiment,sweep_param,sweep_value,method,one_minus_A,tpr,tnr,trials,"
        "failed_trials,std_err,wall_ms_per_trial,master_seed");
  CHECK(lines[1].find("mu,mu,0.5,admm_li,0.125,") == 0);
  CHECK(lines[3].find("mu,mu,inf,admm_li,") == 0);

  const std::vector<CsvRow> rows = parse_csv(text);
  REQUIRE(rows.size() == 4);
  CHECK(rows[0].experiment == "mu");
  CHECK(rows[0].sweep_value == 0.5);
  CHECK(rows[0].one_minus_a == 0.125);
  CHECK(rows[0].std_err == 0.001953125);
  CHECK(rows[0].trials == 100);
  CHECK(rows[0].failed_trials == 1);
  CHECK(rows[0].master_seed == 1710);
  CHECK(std::isinf(rows[2].sweep_value));
  CHECK(rows[3].method == "baseline");

  CHECK_THROWS_AS(parse_csv("bogus header\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv(std::string(lines[0]) + "\nonly,three,fields\n"),
                  std::invalid_argument);

  const std::string series = render_gnuplot_series(rows, "baseline");
  CHECK(series == "# sweep_value one_minus_A (baseline)\n0.5 0.125\ninf 0.0625\n");
}

TEST_CASE("command line end to end") {
  TempDir tmp;
  const std::string config_path = tmp.file("config.ini", kSmallScenario);
  const std::string out_dir = (tmp.path / "results").string();

  SUBCASE("run writes csv and effective config") {
    const CliResult result =
        call_cli({"run", "--experiment", "single", "--config", config_path, "--out", out_dir,
                  "--trials", "2", "--methods", "baseline", "--threads", "1", "--seed", "77"});
    CAPTURE(result.err);
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("wrote") != std::string::npos);

    const std::vector<CsvRow> rows = read_csv((fs::path(out_dir) / "single.csv").string());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].experiment == "single");
    CHECK(rows[0].method == "baseline");
    CHECK(rows[0].trials == 2);
    CHECK(rows[0].master_seed == 77);

    // The effective config is itself a valid config that pins the run.
    const ParsedConfig effective =
        parse_config((fs::path(out_dir) / "effective_config.ini").string());
    CHECK(effective.scenario.num_users == 8);
    CHECK(effective.sweep.trials == 2);
    CHECK(effective.sweep.seed == std::uint64_t{77});
    CHECK(effective.sweep.methods == std::vector<Method>{Method::baseline});
  }

  SUBCASE("threshold overrides reach the detectors") {
    // An absurdly high baseline threshold silences every detection, so half
    // the users (the active half here) are misclassified and 1-A pins at 0.5.
    const CliResult result =
        call_cli({"run", "--experiment", "single", "--config", config_path, "--out", out_dir,
                  "--trials", "3", "--methods", "baseline", "--threads", "1",
                  "--threshold-baseline", "1e12"});
    CAPTURE(result.err);
    CHECK(result.exit_code == 0);
    const std::vector<CsvRow> rows = read_csv((fs::path(out_dir) / "single.csv").string());
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].one_minus_a == doctest::Approx(0.5));

    // A negative override is a config problem, not a crash.
    const CliResult bad =
        call_cli({"run", "--experiment", "single", "--config", config_path, "--out", out_dir,
                  "--trials", "1", "--threshold-li", "-0.25"});
    CHECK(bad.exit_code == 2);
    CHECK(bad.err.find("activity_threshold") != std::string::npos);
  }

  SUBCASE("validate accepts a good config and prints the effective keys") {
    const CliResult result = call_cli({"validate", "--config", config_path});
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("configuration OK") != std::string::npos);
    CHECK(result.out.find("num_users = 8") != std::string::npos);
  }

  SUBCASE("config problems exit with the config code") {
    const std::string broken = tmp.file("broken.ini", "[scenario]\nnope = 1\n");
    CHECK(call_cli({"validate", "--config", broken}).exit_code == 2);
    CHECK(call_cli({"run", "--experiment", "single", "--config", broken, "--out", out_dir})
              .exit_code == 2);
    CHECK(call_cli({"run", "--experiment", "warp", "--config", config_path, "--out", out_dir})
              .exit_code == 2);
    CHECK(call_cli({"validate", "--config", (tmp.path / "missing.ini").string()}).exit_code ==
          2);
    // Bad command line (missing required option) is a config problem too.
    CHECK(call_cli({"validate"}).exit_code == 2);
    CHECK(call_cli({}).exit_code == 2);
  }

  SUBCASE("runtime failures exit with the runtime code") {
    // Using a regular file as the output directory cannot work.
    const std::string blocker = tmp.file("blocker", "");
    const CliResult result =
        call_cli({"run", "--experiment", "single", "--config", config_path, "--out",
                  (fs::path(blocker) / "sub").string(), "--trials", "1", "--methods",
                  "baseline"});
    CHECK(result.exit_code == 3);
    CHECK(result.err.find("error:") != std::string::npos);
  }

  SUBCASE("threshold calibration prints a full-precision threshold") {
    const CliResult result =
        call_cli({"calibrate-threshold", "--config", config_path, "--trials", "10"});
    CHECK(result.exit_code == 0);
    CHECK(result.out.find("baseline threshold = ") != std::string::npos);
    CHECK(result.out.find("seed = 271828") != std::string::npos);
  }

  SUBCASE("plot-data splits a csv per method") {
    const CliResult run_result =
        call_cli({"run", "--experiment", "single", "--config", config_path, "--out", out_dir,
                  "--trials", "1", "--threads", "1"});
    REQUIRE(run_result.exit_code == 0);
    const std::string csv_path = (fs::path(out_dir) / "single.csv").string();
    const std::string plot_dir = (tmp.path / "plots").string();
    const CliResult plot_result = call_cli({"plot-data", "--csv", csv_path, "--out", plot_dir});
    CHECK(plot_result.exit_code == 0);
    CHECK(fs::exists(fs::path(plot_dir) / "single_admm_li.dat"));
    CHECK(fs::exists(fs::path(plot_dir) / "single_baseline.dat"));
    CHECK(call_cli({"plot-data", "--csv", (tmp.path / "nope.csv").string(), "--out", plot_dir})
              .exit_code == 3);
  }
}
