#pragma once

#include "mfs/cli/run_config.hpp"
#include "mfs/experiments.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mfs::cli {

/// Parses argv and dispatches; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

void cmd_generate(const RunConfig& config, std::ostream& log);
void cmd_tune(const RunConfig& config, std::ostream& log);
void cmd_cost_study(const RunConfig& config, std::ostream& log);
void cmd_report(const std::filesystem::path& results, const std::filesystem::path& out_dir, bool svg,
                std::ostream& log);

struct EvalRecord {
  std::string model;
  std::size_t rows = 0;
  double rmse = 0.0;
  double r2 = 0.0;
};

/// `model` is a method id (trained on `train_files`, ordered low to high),
/// `benchmark:<id>` (exact values at the test file's level), `constant:<value>` or `mean`.
EvalRecord cmd_eval(const std::string& model, const std::filesystem::path& test_file,
                    const std::vector<std::filesystem::path>& train_files, const RunConfig& config);

/// Per-level data for a cost study or tuning run: generated in memory for a benchmark,
/// otherwise read from `<problem>_<level>.csv` under data_dir for the requested levels.
FidelitySources load_sources(const RunConfig& config, const std::vector<FidelityLevel>& levels);

}  // namespace mfs::cli
