#pragma once

#include "mfs/dataset.hpp"
#include "mfs/mf_methods.hpp"
#include "mfs/onc.hpp"
#include "mfs/types.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace mfs {

inline constexpr int kCostLf = 1;
inline constexpr int kCostMf = 2;
inline constexpr int kCostHf = 4;

enum class Pairing { LfHf, LfMf, MfHf, LfMfHf };

std::string_view to_string(Pairing pairing);  // "lf+hf", "lf+mf", "mf+hf", "lf+mf+hf"
Pairing parse_pairing(std::string_view name);   // ConfigError on unknown names
/// Levels used by the pairing, lowest first. The last entry is the target level.
std::vector<FidelityLevel> pairing_levels(Pairing pairing);
int pairing_fidelity_count(Pairing pairing);

struct BudgetAllocation {
  int n_lf = 0;
  int n_mf = 0;
  int n_hf = 0;

  int total_cost() const { return kCostLf * n_lf + kCostMf * n_mf + kCostHf * n_hf; }
  int count(FidelityLevel level) const;
  bool operator==(const BudgetAllocation&) const = default;
};

struct BudgetRow {
  int budget = 0;
  Pairing pairing = Pairing::LfHf;
  BudgetAllocation allocation;
};

/// Cost-matched sample counts for budgets 300, 600, 1200 and 1800 (16 rows).
const std::vector<BudgetRow>& budget_table();
/// CSV text of budget_table(): header "budget,pairing,n_lf,n_mf,n_hf,total_cost".
std::string budget_table_csv();
/// Throws ConfigError when the (pairing, budget) pair is not tabulated.
BudgetAllocation budget_for(Pairing pairing, int budget);
std::vector<int> budget_totals();

enum class SplitKind { Hf200_800, Mf500_500 };
inline constexpr int kSplitRows = 1000;

struct Split {
  std::vector<int> train;  // sorted
  std::vector<int> test;   // sorted
};

/// Seeded disjoint partition of 1000 rows; throws ShapeError for any other row count.
Split make_split(int n_rows, SplitKind kind, std::uint64_t seed);

/// Fixed partitions of the HF and MF files, drawn before any training.
struct SplitPlan {
  Split hf;
  Split mf;
  std::uint64_t seed = 0;
};

/// Per-level data of one problem; absent levels are empty datasets.
struct FidelitySources {
  FidelityDataset lf;
  FidelityDataset mf;
  FidelityDataset hf;

  const FidelityDataset& at(FidelityLevel level) const;
  FidelityDataset& at(FidelityLevel level);
  bool has(FidelityLevel level) const { return !at(level).empty(); }
};

/// Splits MF when present, HF always.
SplitPlan make_split_plan(const FidelitySources& sources, std::uint64_t seed);

/// Training rows of one level for one run: the first `count` entries of a seeded shuffle
/// of that level's pool (HF and MF train pools, every LF row). Nested in `count` for a
/// fixed seed; throws AllocationError when the pool is too small.
std::vector<int> select_training_rows(const FidelitySources& sources, const SplitPlan& plan,
                                      FidelityLevel level, int count, std::uint64_t seed);

struct RunResult {
  MethodId method = MethodId::Delta;
  Pairing pairing = Pairing::LfHf;
  int budget = 0;
  std::string subset = "all";
  std::string output = "y";
  std::uint64_t seed = 0;
  double rmse = 0.0;
  double r2 = 0.0;
  double wall_time_s = 0.0;
  BudgetAllocation allocation;

  FidelityLevel test_level = FidelityLevel::HF;
  std::vector<int> train_lf, train_mf, train_hf;  // row indices into each level's file
  std::vector<int> test_rows;                     // row indices into the test level's file
  Vector predictions;                             // aligned with test_rows
  Vector truth;
  std::vector<std::string> flags;

  const std::vector<int>& train_rows(FidelityLevel level) const;
};

using SettingsProvider = std::function<MethodSettings(MethodId)>;

struct CostStudyConfig {
  std::vector<MethodId> methods;
  std::vector<Pairing> pairings{Pairing::LfHf};
  std::vector<int> budgets{300, 600, 1200, 1800};
  std::vector<std::uint64_t> seeds{0};
  std::uint64_t split_seed = 0;
  std::string subset = "all";
  std::string output = "y";
  std::optional<int> epochs;  // overrides every method's epoch count
  SettingsProvider settings = default_settings;
  int jobs = 1;
};

/// One RunResult per (method, pairing, budget, seed), in that nesting order. Every
/// (method, pairing) combination must agree in fidelity count (else ConfigError); a
/// budget exceeding a level's training pool throws AllocationError. Evaluation uses the
/// fixed test split of the pairing's top level. Wall time covers fit and predict only.
std::vector<RunResult> run_cost_study(const FidelitySources& sources, const SplitPlan& plan,
                                      const CostStudyConfig& config);

/// Results ledger with the columns method, pairing, budget, subset, output, seed, rmse,
/// r2, wall_time_s, n_lf, n_mf, n_hf.
void write_results_csv(const std::vector<RunResult>& results, const std::filesystem::path& path);
std::vector<RunResult> read_results_csv(const std::filesystem::path& path);
/// Row-level ledger: run key, role (train or test), level and file row index.
void write_indices_csv(const std::vector<RunResult>& results, const std::filesystem::path& path);
/// The fixed partitions: level, role and row.
void write_split_csv(const SplitPlan& plan, const std::filesystem::path& path);

struct LeakReport {
  std::size_t runs_checked = 0;
  std::size_t overlapping_rows = 0;
};

/// Re-reads an indices ledger and counts rows appearing both in a run's training set and
/// its test set at the same fidelity level.
LeakReport check_indices_ledger(const std::filesystem::path& path);
LeakReport check_leakage(const std::vector<RunResult>& results);

/// Runs `count` independent tasks on up to `jobs` threads; rethrows the first failure.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task);

}  // namespace mfs
