#pragma once

#include "mfs/experiments.hpp"

#include <string>
#include <vector>

namespace mfs {

/// Seed-median metrics of one (subset, output, pairing, method, budget) cell.
struct SummaryRow {
  std::string subset;
  std::string output;
  Pairing pairing = Pairing::LfHf;
  MethodId method = MethodId::Delta;
  int budget = 0;
  BudgetAllocation allocation;
  double rmse = 0.0;
  double r2 = 0.0;
  double wall_time_s = 0.0;
  int seeds = 0;
};

double median(std::vector<double> values);

/// Groups results and takes medians over seeds. Order follows first appearance.
std::vector<SummaryRow> summarize(const std::vector<RunResult>& results);

/// Markdown tables grouped by input subset, output and pairing; one row per
/// (method, budget) with the cells n_LF, n_MF, n_HF, RMSE, R^2 and Time (s).
std::string render_markdown(const std::vector<SummaryRow>& rows);

/// Line chart of median RMSE against budget, one polyline per method.
std::string render_svg(const std::vector<SummaryRow>& rows);

}  // namespace mfs
