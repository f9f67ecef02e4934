#pragma once

#include "mfs/dataset.hpp"
#include "mfs/experiments.hpp"
#include "mfs/mf_methods.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace mfs {

enum class GridStage { Base, AlphaLambda, Weights3f };

std::string_view to_string(GridStage stage);
GridStage parse_grid_stage(std::string_view name);  // "base", "alpha_lambda", "weights3f"

/// Throws ConfigError when the stage does not apply to the method (e.g. alpha on delta).
void validate_stage(MethodId method, GridStage stage);

struct GridSpec {
  std::vector<int> layers{2, 3, 4};
  std::vector<int> widths{16, 32, 64, 128};
  std::vector<double> learning_rates{1e-4, 5e-4, 1e-3};
  int tuning_epochs = 500;
  int final_epochs = 2000;
  double stage1_alpha = 0.1;
  std::vector<double> alphas{1e-4, 5e-4, 1e-3, 5e-3, 1e-2, 5e-2};
  std::vector<double> lambdas{1e-1, 1e-5, 1e-4, 5e-4, 1e-3, 3e-3};
  std::vector<double> w_high{0.5, 0.6, 0.7};
  std::vector<double> w_medium{0.2, 0.3};
  std::vector<double> lambdas3f{1e-5, 1e-4, 1e-3};
};

/// One candidate. Fields not varied by a stage keep the values of the stage's base point.
struct GridPoint {
  int layers = 4;
  int width = 128;
  double learning_rate = 1e-3;
  int epochs = 500;
  double alpha = 0.1;
  double l2_lambda = 0.0;
  double w_low = 0.2;
  double w_medium = 0.2;
  double w_high = 0.6;
};

/// Grid point reflecting a method's current settings.
GridPoint point_from_settings(const MethodSettings& settings);
/// Overwrites the settings fields the stage tunes.
MethodSettings apply_point(MethodSettings settings, const GridPoint& point, GridStage stage);

/// Cartesian product for a stage, varying only that stage's fields around `base`.
std::vector<GridPoint> expand_grid(const GridSpec& spec, GridStage stage, const GridPoint& base);

/// A training set (ordered low to high) and the held-out rows scored for selection.
struct TuningProblem {
  std::string name;
  std::vector<FidelityDataset> train;
  FidelityDataset validation;
};

/// Training rows drawn like a cost-study run at (pairing, budget, seed); validation on the
/// fixed test split of the pairing's top level.
TuningProblem make_tuning_problem(std::string name, const FidelitySources& sources,
                                  const SplitPlan& plan, Pairing pairing, int budget,
                                  std::uint64_t seed);

/// Returns the validation RMSE of one candidate.
using GridEvaluator = std::function<double(MethodId, const MethodSettings&, const TuningProblem&)>;

/// fit_method followed by RMSE on the validation rows.
double evaluate_candidate(MethodId method, const MethodSettings& settings, const TuningProblem& problem);

struct GridRow {
  GridPoint point;
  std::vector<double> scores;  // per problem; +inf on divergence
  double mean_rmse = 0.0;
};

struct GridResult {
  MethodId method = MethodId::Delta;
  GridStage stage = GridStage::Base;
  std::vector<std::string> problems;
  std::vector<GridRow> ledger;  // one row per candidate, in grid order
  std::size_t best = 0;

  const GridRow& winner() const { return ledger.at(best); }
};

/// Lower mean RMSE wins; ties go to fewer layers, then smaller width, then larger learning rate.
bool better_candidate(const GridRow& a, const GridRow& b);

/// Exhaustive search. A candidate that diverges or scores NaN is kept with an infinite
/// score. Throws PreconditionError for an empty grid or problem list.
GridResult grid_search(MethodId method, GridStage stage, const std::vector<GridPoint>& grid,
                       const std::vector<TuningProblem>& problems, const MethodSettings& base,
                       const GridEvaluator& evaluator = evaluate_candidate, int jobs = 1);

/// Columns: layers, width, learning_rate, epochs, alpha, l2_lambda, w_low, w_medium,
/// w_high, one score column per problem, mean_rmse, best (1 on the winner).
void write_grid_csv(const GridResult& result, const std::filesystem::path& path);

}  // namespace mfs
