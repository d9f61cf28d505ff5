#include "aud/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace aud {

void Scenario::validate() const {
  if (num_users < 2) {
    throw std::invalid_argument("Scenario: num_users must be >= 2");
  }
  if (num_active < 1 || num_active > num_users) {
    throw std::invalid_argument("Scenario: requires 1 <= num_active <= num_users");
  }
  if (pilot_length < 1) {
    throw std::invalid_argument("Scenario: pilot_length must be >= 1");
  }
  if (orthonormal_pilots && pilot_length < num_users) {
    throw std::invalid_argument("Scenario: orthonormal_pilots needs pilot_length >= num_users");
  }
  if (std::isnan(snr_db) || (std::isinf(snr_db) && snr_db < 0.0)) {
    throw std::invalid_argument("Scenario: snr_db must be finite or +inf (noise-free)");
  }
  if (std::isnan(mu) || mu < 0.0) {
    throw std::invalid_argument("Scenario: mu must be >= 0 or infinite");
  }
  if (!(sigma >= 0.0) || std::isinf(sigma)) {
    throw std::invalid_argument("Scenario: sigma must be finite and >= 0");
  }
  // Constructs the layout and region, which enforce array validity and the
  // near-field distance bounds.
  region();
}

ArrayLayout Scenario::layout() const {
  return ArrayLayout::uniform_linear(num_antennas, carrier_hz);
}

DeploymentRegion Scenario::region() const {
  return DeploymentRegion(r_min, r_max, theta_min, theta_max, layout());
}

double Scenario::noise_variance() const { return noise_variance_from_snr_db(snr_db); }

std::string method_name(Method method) {
  switch (method) {
    case Method::admm_li:
      return "admm_li";
    case Method::baseline:
      return "baseline";
  }
  throw std::logic_error("method_name: unknown method");
}

Method parse_method(const std::string& name) {
  if (name == "admm_li") {
    return Method::admm_li;
  }
  if (name == "baseline") {
    return Method::baseline;
  }
  throw std::invalid_argument("unknown method '" + name + "' (expected admm_li or baseline)");
}

DetectorBank::DetectorBank() { baseline.activity_threshold = kCalibratedBaselineThreshold; }

const AdmmConfig& DetectorBank::config_for(Method method) const {
  return method == Method::admm_li ? admm_li : baseline;
}

TrialRealization realize_trial(const Scenario& scenario, std::uint64_t master_seed,
                               std::uint64_t cell_index, std::uint64_t trial_index) {
  scenario.validate();
  const ArrayLayout layout = scenario.layout();
  const DeploymentRegion region = scenario.region();

  TrialRealization trial;
  {
    Rng rng = make_stream(master_seed, cell_index, trial_index, StreamTag::user_field);
    trial.field = sample_user_field(region, scenario.num_users, scenario.sigma, rng);
  }
  {
    Rng rng = make_stream(master_seed, cell_index, trial_index, StreamTag::pilots);
    trial.pilots = generate_pilots(scenario.pilot_length, scenario.num_users, rng);
    if (scenario.orthonormal_pilots) {
      trial.pilots = orthonormalize_pilots(trial.pilots);
    }
  }
  {
    Rng rng = make_stream(master_seed, cell_index, trial_index, StreamTag::activity);
    trial.activity = sample_activity(scenario.num_users, scenario.num_active, trial.field,
                                     layout.wavelength, rng, scenario.fixed_active_count);
  }
  {
    Rng rng = make_stream(master_seed, cell_index, trial_index, StreamTag::nlos);
    trial.channels = build_channel_set(trial.field, layout, scenario.mu, rng);
  }
  {
    Rng rng = make_stream(master_seed, cell_index, trial_index, StreamTag::noise);
    trial.signal = synthesize_signal(trial.pilots.matrix, trial.activity.x_diag,
                                     trial.channels.h_total, scenario.noise_variance(), rng);
  }
  return trial;
}

std::vector<TrialOutcome> run_trial(const Scenario& scenario, const DetectorBank& detectors,
                                    const std::vector<Method>& methods,
                                    std::uint64_t master_seed, std::uint64_t cell_index,
                                    std::uint64_t trial_index) {
  try {
    const TrialRealization trial = realize_trial(scenario, master_seed, cell_index, trial_index);
    std::vector<TrialOutcome> outcomes;
    outcomes.reserve(methods.size());
    for (Method method : methods) {
      TrialOutcome outcome;
      outcome.method = method;
      const AdmmConfig& cfg = detectors.config_for(method);
      const auto start = std::chrono::steady_clock::now();
      outcome.detection =
          method == Method::admm_li
              ? admm_li_solve(trial.signal.y, trial.pilots.matrix, trial.channels.h_hat, cfg)
              : admm_baseline_solve(trial.signal.y, trial.pilots.matrix, cfg);
      const auto stop = std::chrono::steady_clock::now();
      outcome.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
      outcome.confusion_counts =
          confusion(trial.activity.active_set, outcome.detection.detected_set,
                    scenario.num_users);
      outcome.one_minus_a = one_minus_balanced_accuracy(outcome.confusion_counts);
      outcomes.push_back(std::move(outcome));
    }
    return outcomes;
  } catch (const std::exception& e) {
    throw std::runtime_error("trial failed (master_seed=" + std::to_string(master_seed) +
                             ", cell=" + std::to_string(cell_index) +
                             ", trial=" + std::to_string(trial_index) + "): " + e.what());
  }
}

std::string sweep_variable_name(SweepVariable variable) {
  switch (variable) {
    case SweepVariable::none:
      return "none";
    case SweepVariable::snr_db:
      return "snr_db";
    case SweepVariable::mu:
      return "mu";
    case SweepVariable::sigma:
      return "sigma";
    case SweepVariable::pilot_length:
      return "pilot_length";
    case SweepVariable::num_users:
      return "num_users";
    case SweepVariable::num_active:
      return "num_active";
    case SweepVariable::num_antennas:
      return "num_antennas";
  }
  throw std::logic_error("sweep_variable_name: unknown variable");
}

SweepVariable parse_sweep_variable(const std::string& name) {
  for (SweepVariable v :
       {SweepVariable::none, SweepVariable::snr_db, SweepVariable::mu, SweepVariable::sigma,
        SweepVariable::pilot_length, SweepVariable::num_users, SweepVariable::num_active,
        SweepVariable::num_antennas}) {
    if (sweep_variable_name(v) == name) {
      return v;
    }
  }
  throw std::invalid_argument("unknown sweep variable '" + name + "'");
}

namespace {

int integral_grid_value(double value, const char* variable) {
  const double rounded = std::nearbyint(value);
  if (!std::isfinite(value) || std::abs(value - rounded) > 1e-9) {
    throw std::invalid_argument(std::string("sweep variable ") + variable +
                                " requires integer grid values, got " + std::to_string(value));
  }
  return static_cast<int>(rounded);
}

}  // namespace

Scenario scenario_at(const ExperimentPlan& plan, double value) {
  Scenario scenario = plan.base;
  switch (plan.variable) {
    case SweepVariable::none:
      break;
    case SweepVariable::snr_db:
      scenario.snr_db = value;
      break;
    case SweepVariable::mu:
      scenario.mu = value;
      break;
    case SweepVariable::sigma:
      scenario.sigma = value;
      break;
    case SweepVariable::pilot_length:
      scenario.pilot_length = integral_grid_value(value, "pilot_length");
      break;
    case SweepVariable::num_users:
      scenario.num_users = integral_grid_value(value, "num_users");
      break;
    case SweepVariable::num_active:
      scenario.num_active = integral_grid_value(value, "num_active");
      break;
    case SweepVariable::num_antennas:
      scenario.num_antennas = integral_grid_value(value, "num_antennas");
      break;
  }
  scenario.validate();
  return scenario;
}

void ExperimentPlan::validate() const {
  if (name.empty()) {
    throw std::invalid_argument("ExperimentPlan: name must be non-empty");
  }
  if (grid.empty()) {
    throw std::invalid_argument("ExperimentPlan: sweep grid must be non-empty");
  }
  if (methods.empty()) {
    throw std::invalid_argument("ExperimentPlan: method list must be non-empty");
  }
  if (trials < 1) {
    throw std::invalid_argument("ExperimentPlan: trials must be >= 1");
  }
  if (threads < 0) {
    throw std::invalid_argument("ExperimentPlan: threads must be >= 0");
  }
  detectors.admm_li.validate();
  detectors.baseline.validate();
  for (double value : grid) {
    scenario_at(*this, value);  // throws if any grid point is invalid
  }
}

namespace {

struct TrialRecord {
  bool ok = false;
  std::string error;
  std::vector<TrialOutcome> outcomes;
};

MethodAggregate aggregate_method(Method method, const std::vector<TrialRecord>& records,
                                 int trials_requested) {
  MethodAggregate agg;
  agg.method = method;
  agg.trials_requested = trials_requested;
  std::vector<double> one_minus_a_values;
  one_minus_a_values.reserve(records.size());
  double sum_tpr = 0.0;
  double sum_tnr = 0.0;
  double sum_wall = 0.0;
  for (const TrialRecord& record : records) {
    if (!record.ok) {
      ++agg.failed_trials;
      continue;
    }
    for (const TrialOutcome& outcome : record.outcomes) {
      if (outcome.method != method) {
        continue;
      }
      one_minus_a_values.push_back(outcome.one_minus_a);
      const ConfusionCounts& c = outcome.confusion_counts;
      sum_tpr += static_cast<double>(c.tp) / c.k_true;
      sum_tnr += static_cast<double>(c.tn) / (c.n_total - c.k_true);
      sum_wall += outcome.wall_ms;
    }
  }
  const std::size_t n_ok = one_minus_a_values.size();
  if (n_ok == 0) {
    return agg;
  }
  double sum = 0.0;
  for (double v : one_minus_a_values) {
    sum += v;
  }
  const double mean = sum / static_cast<double>(n_ok);
  agg.mean_one_minus_a = mean;
  agg.mean_tpr = sum_tpr / static_cast<double>(n_ok);
  agg.mean_tnr = sum_tnr / static_cast<double>(n_ok);
  agg.mean_wall_ms = sum_wall / static_cast<double>(n_ok);
  if (n_ok > 1) {
    double sq_dev = 0.0;
    for (double v : one_minus_a_values) {
      sq_dev += (v - mean) * (v - mean);
    }
    const double sample_std = std::sqrt(sq_dev / static_cast<double>(n_ok - 1));
    agg.std_err = sample_std / std::sqrt(static_cast<double>(n_ok));
  }
  return agg;
}

}  // namespace

SweepResult run_sweep(const ExperimentPlan& plan) {
  plan.validate();
  const std::size_t n_cells = plan.grid.size();
  const std::size_t n_trials = static_cast<std::size_t>(plan.trials);

  std::vector<Scenario> scenarios;
  scenarios.reserve(n_cells);
  for (double value : plan.grid) {
    scenarios.push_back(scenario_at(plan, value));
  }

  // Preallocated slot per (cell, trial): workers write disjoint slots, the
  // reduction below walks them in fixed order, so the aggregate does not
  // depend on thread count or scheduling.
  std::vector<std::vector<TrialRecord>> records(n_cells, std::vector<TrialRecord>(n_trials));
  const std::size_t total = n_cells * n_trials;
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (;;) {
      const std::size_t index = next.fetch_add(1);
      if (index >= total) {
        return;
      }
      const std::size_t cell = index / n_trials;
      const std::size_t trial = index % n_trials;
      TrialRecord& record = records[cell][trial];
      try {
        record.outcomes = run_trial(scenarios[cell], plan.detectors, plan.methods,
                                    plan.master_seed, cell, trial);
        record.ok = true;
      } catch (const std::exception& e) {
        record.ok = false;
        record.error = e.what();
      }
    }
  };

  unsigned n_threads = plan.threads > 0 ? static_cast<unsigned>(plan.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  n_threads = static_cast<unsigned>(std::min<std::size_t>(n_threads, total));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }

  SweepResult result;
  result.experiment = plan.name;
  result.sweep_param = sweep_variable_name(plan.variable);
  result.master_seed = plan.master_seed;
  result.cells.reserve(n_cells);
  for (std::size_t cell = 0; cell < n_cells; ++cell) {
    SweepCell out;
    out.sweep_value = plan.grid[cell];
    for (Method method : plan.methods) {
      out.per_method.push_back(aggregate_method(method, records[cell], plan.trials));
    }
    for (const TrialRecord& record : records[cell]) {
      if (!record.ok) {
        out.failure_messages.push_back(record.error);
      }
    }
    result.cells.push_back(std::move(out));
  }
  return result;
}

ExperimentPlan builtin_experiment(const std::string& name) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  ExperimentPlan plan;
  plan.name = name;
  if (name == "snr") {
    plan.variable = SweepVariable::snr_db;
    plan.grid = {-10.0, -5.0, 0.0, 5.0};
  } else if (name == "mu") {
    plan.variable = SweepVariable::mu;
    plan.grid = {0.5, 1.0, 2.0, 4.0, 8.0, kInf};
  } else if (name == "sigma") {
    plan.variable = SweepVariable::sigma;
    plan.grid = {0.0, 1.0, 2.0, 4.0, 6.0, 8.0, 10.0};
  } else if (name == "pilot_length") {
    plan.variable = SweepVariable::pilot_length;
    plan.grid = {2.0, 4.0, 6.0, 8.0, 10.0, 12.0};
  } else if (name == "num_users") {
    plan.variable = SweepVariable::num_users;
    plan.grid = {12.0, 16.0, 20.0, 24.0, 28.0, 32.0};
  } else if (name == "num_active") {
    plan.variable = SweepVariable::num_active;
    plan.grid = {2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0};
    plan.base.fixed_active_count = true;
  } else if (name == "single") {
    plan.variable = SweepVariable::none;
    plan.grid = {0.0};
  } else {
    std::string known;
    for (const std::string& k : builtin_experiment_names()) {
      known += known.empty() ? k : ", " + k;
    }
    throw std::invalid_argument("unknown experiment '" + name + "' (known: " + known + ")");
  }
  return plan;
}

std::vector<std::string> builtin_experiment_names() {
  return {"snr", "mu", "sigma", "pilot_length", "num_users", "num_active", "single"};
}

CalibrationResult calibrate_baseline_threshold(const Scenario& scenario, const AdmmConfig& cfg,
                                               int trials, std::uint64_t master_seed) {
  scenario.validate();
  cfg.validate();
  if (trials < 1) {
    throw std::invalid_argument("calibrate_baseline_threshold: trials must be >= 1");
  }

  struct ScoredUser {
    double score;
    bool active;
    int trial;
  };
  std::vector<ScoredUser> pool;
  pool.reserve(static_cast<std::size_t>(trials) * scenario.num_users);
  std::vector<int> k_true(trials);

  for (int t = 0; t < trials; ++t) {
    const TrialRealization trial =
        realize_trial(scenario, master_seed, 0, static_cast<std::uint64_t>(t));
    const DetectionResult det =
        admm_baseline_solve(trial.signal.y, trial.pilots.matrix, cfg);
    std::vector<char> is_active(scenario.num_users, 0);
    for (int n : trial.activity.active_set) {
      is_active[n] = 1;
    }
    k_true[t] = static_cast<int>(trial.activity.active_set.size());
    for (int n = 0; n < scenario.num_users; ++n) {
      pool.push_back({det.scores(n), is_active[n] != 0, t});
    }
  }

  std::sort(pool.begin(), pool.end(),
            [](const ScoredUser& a, const ScoredUser& b) { return a.score > b.score; });

  // Walk the thresholds downwards through every distinct cut point of the
  // pooled score distribution, updating the mean complement of the balanced
  // accuracy incrementally: detecting an active user of trial t improves
  // TPR_t by 1/k_t, detecting an inactive one degrades TNR_t by 1/(N-k_t).
  const double inv_trials = 1.0 / static_cast<double>(trials);
  double objective = 0.5;  // nothing detected: TPR = 0, TNR = 1 in every trial
  double best_objective = objective;
  double best_threshold = pool.front().score + 1.0;

  std::size_t i = 0;
  while (i < pool.size()) {
    const double score = pool[i].score;
    for (; i < pool.size() && pool[i].score == score; ++i) {
      const int t = pool[i].trial;
      if (pool[i].active) {
        objective -= 0.5 * inv_trials / k_true[t];
      } else {
        objective += 0.5 * inv_trials / (scenario.num_users - k_true[t]);
      }
    }
    const double next_score = i < pool.size() ? pool[i].score : 0.0;
    const double threshold = 0.5 * (score + next_score);
    if (threshold < score && objective < best_objective) {
      best_objective = objective;
      best_threshold = threshold;
    }
  }

  return CalibrationResult{best_threshold, best_objective, trials};
}

}  // namespace aud
