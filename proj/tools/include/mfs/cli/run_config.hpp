#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace mfs::cli {

/// Everything a command needs to reproduce a run. Serialized as flat `key = value`
/// lines; lists are comma separated.
struct RunConfig {
  std::string command;

  std::string benchmark;  // registry id; empty when reading files
  int dim = 0;            // rosenbrock3f / rastrigin3f dimension
  std::filesystem::path data_dir;
  std::string problem;  // file prefix under data_dir ("onc" selects the ONC schema)
  std::string output = "y";
  std::string subset = "all";
  bool strict_bounds = false;

  std::vector<std::string> methods;
  std::vector<std::string> pairings{"lf+hf"};
  std::vector<int> budgets{300, 600, 1200, 1800};
  std::uint64_t seed = 0;
  int seed_count = 1;
  std::uint64_t split_seed = 0;
  std::uint64_t data_seed = 0;
  int rows_per_level = 1000;

  std::optional<int> epochs;
  std::optional<int> layers;
  std::optional<int> width;
  std::optional<double> learning_rate;
  std::optional<int> gp_restarts;

  std::string stage = "base";
  std::filesystem::path from;  // best-config file of a previous tuning stage

  int n_lf = 0;
  int n_mf = 0;
  int n_hf = 0;

  std::filesystem::path out = "out";
  int jobs = 1;
  bool svg = false;

  std::vector<std::uint64_t> seeds() const;
};

std::string serialize(const RunConfig& config);
/// Throws ConfigError on malformed lines, unknown keys or bad values.
RunConfig parse_run_config(const std::string& text);
RunConfig load_run_config(const std::filesystem::path& path);
void save_run_config(const RunConfig& config, const std::filesystem::path& path);

}  // namespace mfs::cli
