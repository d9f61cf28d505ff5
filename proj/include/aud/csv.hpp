#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aud/experiments.hpp"

namespace aud {

// Fixed column order:
// experiment,sweep_param,sweep_value,method,one_minus_A,tpr,tnr,trials,
// failed_trials,std_err,wall_ms_per_trial,master_seed
// One data row per (grid value, method); numbers are full-precision decimal,
// lines end with LF.
std::string render_csv(const SweepResult& result);
void emit_csv(const SweepResult& result, const std::string& path);

struct CsvRow {
  std::string experiment;
  std::string sweep_param;
  double sweep_value = 0.0;
  std::string method;
  double one_minus_a = 0.0;
  double tpr = 0.0;
  double tnr = 0.0;
  long trials = 0;
  long failed_trials = 0;
  double std_err = 0.0;
  double wall_ms_per_trial = 0.0;
  std::uint64_t master_seed = 0;
};

std::vector<CsvRow> parse_csv(const std::string& text);
std::vector<CsvRow> read_csv(const std::string& path);

// Two-column (sweep_value, one_minus_A) series for one method, ready for
// gnuplot's `plot "file" with linespoints`.
std::string render_gnuplot_series(const std::vector<CsvRow>& rows, const std::string& method);

}  // namespace aud
