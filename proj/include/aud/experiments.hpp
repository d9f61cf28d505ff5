#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "aud/admm.hpp"
#include "aud/channel.hpp"
#include "aud/geometry.hpp"
#include "aud/metrics.hpp"
#include "aud/rng.hpp"

namespace aud {

// One simulated operating point. Defaults are the base parameters:
// 24 users, 4 nominally active, 32 antennas at 1710 MHz, users 20-80 m
// from the array within +-3pi/7, 6-symbol pilots, SNR 0 dB, pure LoS,
// perfect location estimates.
struct Scenario {
  int num_users = 24;
  int num_active = 4;
  int num_antennas = 32;
  double carrier_hz = 1710e6;
  double r_min = 20.0;
  double r_max = 80.0;
  double theta_min = -3.0 * kPi / 7.0;
  double theta_max = 3.0 * kPi / 7.0;
  int pilot_length = 6;
  double snr_db = 0.0;
  double mu = std::numeric_limits<double>::infinity();
  double sigma = 0.0;
  // Exactly num_active users per trial instead of Bernoulli(num_active/N).
  bool fixed_active_count = false;
  // Replace pilot columns with an orthonormal basis (needs T >= N).
  bool orthonormal_pilots = false;

  static constexpr double kPi = 3.14159265358979323846;

  void validate() const;
  ArrayLayout layout() const;
  DeploymentRegion region() const;
  double noise_variance() const;
};

enum class Method { admm_li, baseline };

std::string method_name(Method method);
Method parse_method(const std::string& name);

// Per-method solver settings. The two detectors share hyper-parameters by
// default and differ only in the decision threshold: 0.5 for the
// location-aided solver (power control puts active scores near 1) and a
// calibrated value for the baseline (see calibrate_baseline_threshold).
struct DetectorBank {
  AdmmConfig admm_li;
  AdmmConfig baseline;

  DetectorBank();
  const AdmmConfig& config_for(Method method) const;
};

// Baseline score threshold maximizing mean balanced accuracy at the default
// operating point, frozen from calibrate_baseline_threshold (1000 trials,
// seed 271828).
inline constexpr double kCalibratedBaselineThreshold = 2.0464515868797362;

// Everything sampled for one Monte Carlo trial. Each component draws from
// its own seed stream, so any one component's realization is independent of
// the method list and of how many draws the others consume.
struct TrialRealization {
  UserField field;
  PilotMatrix pilots;
  ActivityState activity;
  ChannelSet channels;
  ReceivedSignal signal;
};

TrialRealization realize_trial(const Scenario& scenario, std::uint64_t master_seed,
                               std::uint64_t cell_index, std::uint64_t trial_index);

struct TrialOutcome {
  Method method = Method::admm_li;
  DetectionResult detection;
  ConfusionCounts confusion_counts;
  double one_minus_a = 0.0;
  double wall_ms = 0.0;
};

// Runs every requested method on the SAME realization (paired comparison).
// Solver failures are rethrown with the (seed, cell, trial) coordinates
// attached for replay.
std::vector<TrialOutcome> run_trial(const Scenario& scenario, const DetectorBank& detectors,
                                    const std::vector<Method>& methods,
                                    std::uint64_t master_seed, std::uint64_t cell_index,
                                    std::uint64_t trial_index);

enum class SweepVariable {
  none,
  snr_db,
  mu,
  sigma,
  pilot_length,
  num_users,
  num_active,
  num_antennas,
};

std::string sweep_variable_name(SweepVariable variable);
SweepVariable parse_sweep_variable(const std::string& name);

struct ExperimentPlan {
  std::string name = "single";
  Scenario base;
  SweepVariable variable = SweepVariable::none;
  std::vector<double> grid = {0.0};
  std::vector<Method> methods = {Method::admm_li, Method::baseline};
  int trials = 1000;
  std::uint64_t master_seed = 1710;
  DetectorBank detectors;
  int threads = 0;  // 0 selects hardware concurrency

  void validate() const;
};

// Base scenario with the sweep variable set to `value` (integer-valued
// variables reject non-integral grid points).
Scenario scenario_at(const ExperimentPlan& plan, double value);

struct MethodAggregate {
  Method method = Method::admm_li;
  double mean_one_minus_a = 0.0;
  double mean_tpr = 0.0;
  double mean_tnr = 0.0;
  double std_err = 0.0;
  double mean_wall_ms = 0.0;
  int trials_requested = 0;
  int failed_trials = 0;
};

struct SweepCell {
  double sweep_value = 0.0;
  std::vector<MethodAggregate> per_method;
  std::vector<std::string> failure_messages;  // one per failed trial
};

struct SweepResult {
  std::string experiment;
  std::string sweep_param;
  std::uint64_t master_seed = 0;
  std::vector<SweepCell> cells;
};

// Executes all (grid point x trial) cells. Trials run on a thread pool;
// aggregation is a fixed-order reduction over preallocated slots, so the
// result is identical for any thread count. Failed trials are excluded
// from the means and surfaced through failed_trials/failure_messages.
SweepResult run_sweep(const ExperimentPlan& plan);

// Built-in sweeps: snr, mu, sigma, pilot_length, num_users, num_active,
// single. Grids cover the reference operating ranges at desk scale.
ExperimentPlan builtin_experiment(const std::string& name);
std::vector<std::string> builtin_experiment_names();

struct CalibrationResult {
  double threshold = 0.0;
  double mean_one_minus_a = 0.0;
  int trials = 0;
};

// Sweeps the baseline decision threshold over all candidate cut points of
// the pooled score distribution and returns the balanced-accuracy argmax.
CalibrationResult calibrate_baseline_threshold(const Scenario& scenario, const AdmmConfig& cfg,
                                               int trials, std::uint64_t master_seed);

}  // namespace aud
