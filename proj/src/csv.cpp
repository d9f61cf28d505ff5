#include "aud/csv.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace aud {

namespace {

const char* kHeader =
    "experiment,sweep_param,sweep_value,method,one_minus_A,tpr,tnr,trials,"
    "failed_trials,std_err,wall_ms_per_trial,master_seed";

std::string format_double(double value) {
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

double parse_double(const std::string& value) {
  if (value == "inf") {
    return std::numeric_limits<double>::infinity();
  }
  if (value == "-inf") {
    return -std::numeric_limits<double>::infinity();
  }
  std::size_t consumed = 0;
  const double parsed = std::stod(value, &consumed);
  if (consumed != value.size()) {
    throw std::invalid_argument("csv: malformed number '" + value + "'");
  }
  return parsed;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    fields.push_back(field);
  }
  return fields;
}

}  // namespace

std::string render_csv(const SweepResult& result) {
  std::ostringstream out;
  out << kHeader << "\n";
  for (const SweepCell& cell : result.cells) {
    for (const MethodAggregate& agg : cell.per_method) {
      out << result.experiment << ',' << result.sweep_param << ','
          << format_double(cell.sweep_value) << ',' << method_name(agg.method) << ','
          << format_double(agg.mean_one_minus_a) << ',' << format_double(agg.mean_tpr) << ','
          << format_double(agg.mean_tnr) << ',' << agg.trials_requested << ','
          << agg.failed_trials << ',' << format_double(agg.std_err) << ','
          << format_double(agg.mean_wall_ms) << ',' << result.master_seed << "\n";
    }
  }
  return out.str();
}

void emit_csv(const SweepResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open for writing: " + path);
  }
  out << render_csv(result);
  if (!out) {
    throw std::runtime_error("write failed: " + path);
  }
}

std::vector<CsvRow> parse_csv(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line) || line != kHeader) {
    throw std::invalid_argument("csv: missing or unexpected header row");
  }
  std::vector<CsvRow> rows;
  while (std::getline(stream, line)) {
    if (line.empty()) {
      continue;
    }
    const std::vector<std::string> f = split_fields(line);
    if (f.size() != 12) {
      throw std::invalid_argument("csv: expected 12 fields, got " +
                                  std::to_string(f.size()) + " in '" + line + "'");
    }
    CsvRow row;
    row.experiment = f[0];
    row.sweep_param = f[1];
    row.sweep_value = parse_double(f[2]);
    row.method = f[3];
    row.one_minus_a = parse_double(f[4]);
    row.tpr = parse_double(f[5]);
    row.tnr = parse_double(f[6]);
    row.trials = std::stol(f[7]);
    row.failed_trials = std::stol(f[8]);
    row.std_err = parse_double(f[9]);
    row.wall_ms_per_trial = parse_double(f[10]);
    row.master_seed = std::stoull(f[11]);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open csv file: " + path);
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string render_gnuplot_series(const std::vector<CsvRow>& rows, const std::string& method) {
  std::ostringstream out;
  out << "# sweep_value one_minus_A (" << method << ")\n";
  for (const CsvRow& row : rows) {
    if (row.method == method) {
      out << format_double(row.sweep_value) << ' ' << format_double(row.one_minus_a) << "\n";
    }
  }
  return out.str();
}

}  // namespace aud
