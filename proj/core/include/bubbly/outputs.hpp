#pragma once

#include <string>
#include <vector>

#include "bubbly/harness.hpp"

namespace bubbly {

/// Writes errors.csv, probes_<k>.csv, conditions.csv and plot_data.csv; returns the written paths.
std::vector<std::string> emit_outputs(const ComparisonResult& result, const std::string& dir);

struct ErrorRow {
  double delta = 0.0;
  std::size_t M = 0;
  double d = 0.0;
  double eps = 0.0;
  double e_max = 0.0;
  double e_l2 = 0.0;
  double runtime_s = 0.0;
};

std::vector<ErrorRow> read_errors_csv(const std::string& path);

/// Writes a CSV with header t,probe,value for a set of series.
void write_probe_csv(const std::string& path, const std::vector<double>& times,
                     const std::vector<std::vector<double>>& series);

}  // namespace bubbly
