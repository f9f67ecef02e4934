#include "mfs/grid_search.hpp"

#include "mfs/csv.hpp"
#include "mfs/errors.hpp"
#include "mfs/experiments.hpp"
#include "mfs/metrics.hpp"

#include <cmath>
#include <limits>

namespace mfs {

std::string_view to_string(GridStage stage) {
  switch (stage) {
    case GridStage::Base:
      return "base";
    case GridStage::AlphaLambda:
      return "alpha_lambda";
    case GridStage::Weights3f:
      return "weights3f";
  }
  return "?";
}

GridStage parse_grid_stage(std::string_view name) {
  for (auto s : {GridStage::Base, GridStage::AlphaLambda, GridStage::Weights3f}) {
    if (to_string(s) == name) return s;
  }
  throw ConfigError("unknown grid stage '" + std::string(name) + "' (valid: base, alpha_lambda, weights3f)");
}

void validate_stage(MethodId method, GridStage stage) {
  const std::string name(to_string(method));
  switch (stage) {
    case GridStage::Base:
      if (!method_is_neural(method)) {
        throw ConfigError(name + " has no network architecture to tune (base stage)");
      }
      return;
    case GridStage::AlphaLambda:
      if (method != MethodId::GpMimic && method != MethodId::Intermediate) {
        throw ConfigError(name + " has no two-fidelity alpha/lambda loss weighting");
      }
      return;
    case GridStage::Weights3f:
      if (method != MethodId::GpMimic3f && method != MethodId::Intermediate3f) {
        throw ConfigError(name + " has no three-fidelity weight simplex");
      }
      return;
  }
}

GridPoint point_from_settings(const MethodSettings& settings) {
  GridPoint p;
  const auto& net = settings.network;
  p.layers = static_cast<int>(net.layer_widths.size());
  p.width = net.layer_widths.empty() ? 0 : net.layer_widths.back();
  p.learning_rate = net.learning_rate;
  p.epochs = net.epochs;
  p.alpha = settings.alpha;
  p.l2_lambda = settings.l2_lambda;
  const auto& w = settings.weights3f.per_level();
  p.w_low = w[0];
  p.w_medium = w[1];
  p.w_high = w[2];
  return p;
}

MethodSettings apply_point(MethodSettings settings, const GridPoint& point, GridStage stage) {
  switch (stage) {
    case GridStage::Base: {
      const auto seed = settings.network.seed;
      settings.network = MlpConfig::uniform(point.layers, point.width, point.learning_rate, point.epochs);
      settings.network.seed = seed;
      settings.alpha = point.alpha;
      break;
    }
    case GridStage::AlphaLambda:
      settings.alpha = point.alpha;
      settings.l2_lambda = point.l2_lambda;
      settings.network.epochs = point.epochs;
      break;
    case GridStage::Weights3f:
      settings.weights3f = MfWeights::three_fidelity(point.w_low, point.w_medium, point.w_high);
      settings.l2_lambda = point.l2_lambda;
      settings.network.epochs = point.epochs;
      break;
  }
  return settings;
}

std::vector<GridPoint> expand_grid(const GridSpec& spec, GridStage stage, const GridPoint& base) {
  std::vector<GridPoint> out;
  switch (stage) {
    case GridStage::Base:
      for (int layers : spec.layers) {
        for (int width : spec.widths) {
          for (double lr : spec.learning_rates) {
            GridPoint p = base;
            p.layers = layers;
            p.width = width;
            p.learning_rate = lr;
            p.epochs = spec.tuning_epochs;
            p.alpha = spec.stage1_alpha;
            out.push_back(p);
          }
        }
      }
      break;
    case GridStage::AlphaLambda:
      for (double alpha : spec.alphas) {
        for (double lambda : spec.lambdas) {
          GridPoint p = base;
          p.alpha = alpha;
          p.l2_lambda = lambda;
          p.epochs = spec.tuning_epochs;
          out.push_back(p);
        }
      }
      break;
    case GridStage::Weights3f:
      for (double wh : spec.w_high) {
        for (double wm : spec.w_medium) {
          double wl = 1.0 - wh - wm;
          if (std::abs(wl) < 1e-12) wl = 0.0;
          for (double lambda : spec.lambdas3f) {
            GridPoint p = base;
            p.w_high = wh;
            p.w_medium = wm;
            p.w_low = wl;
            p.l2_lambda = lambda;
            p.epochs = spec.tuning_epochs;
            out.push_back(p);
          }
        }
      }
      break;
  }
  return out;
}

TuningProblem make_tuning_problem(std::string name, const FidelitySources& sources,
                                  const SplitPlan& plan, Pairing pairing, int budget,
                                  std::uint64_t seed) {
  TuningProblem problem;
  problem.name = std::move(name);
  const BudgetAllocation allocation = budget_for(pairing, budget);
  const auto levels = pairing_levels(pairing);
  for (FidelityLevel level : levels) {
    if (!sources.has(level)) {
      throw PreconditionError(problem.name + ": missing " + std::string(to_string(level)) + " data");
    }
    problem.train.push_back(sources.at(level).subset(
        select_training_rows(sources, plan, level, allocation.count(level), seed)));
  }
  const Split& split = levels.back() == FidelityLevel::HF ? plan.hf : plan.mf;
  problem.validation = sources.at(levels.back()).subset(split.test);
  return problem;
}

double evaluate_candidate(MethodId method, const MethodSettings& settings, const TuningProblem& problem) {
  const auto model = fit_method(method, settings, problem.train);
  return rmse(mf_predict(*model, problem.validation.inputs), problem.validation.targets);
}

bool better_candidate(const GridRow& a, const GridRow& b) {
  if (a.mean_rmse != b.mean_rmse) return a.mean_rmse < b.mean_rmse;
  if (a.point.layers != b.point.layers) return a.point.layers < b.point.layers;
  if (a.point.width != b.point.width) return a.point.width < b.point.width;
  return a.point.learning_rate > b.point.learning_rate;
}

GridResult grid_search(MethodId method, GridStage stage, const std::vector<GridPoint>& grid,
                       const std::vector<TuningProblem>& problems, const MethodSettings& base,
                       const GridEvaluator& evaluator, int jobs) {
  validate_stage(method, stage);
  if (grid.empty()) throw PreconditionError("grid search over an empty grid");
  if (problems.empty()) throw PreconditionError("grid search needs at least one tuning problem");

  GridResult result;
  result.method = method;
  result.stage = stage;
  for (const auto& p : problems) result.problems.push_back(p.name);
  result.ledger.resize(grid.size());

  const std::size_t cells = grid.size() * problems.size();
  std::vector<double> scores(cells);
  parallel_for(cells, jobs, [&](std::size_t cell) {
    const std::size_t g = cell / problems.size();
    const std::size_t k = cell % problems.size();
    double score = std::numeric_limits<double>::infinity();
    try {
      score = evaluator(method, apply_point(base, grid[g], stage), problems[k]);
    } catch (const DivergenceError&) {
      score = std::numeric_limits<double>::infinity();
    }
    if (!std::isfinite(score)) score = std::numeric_limits<double>::infinity();
    scores[cell] = score;
  });

  for (std::size_t g = 0; g < grid.size(); ++g) {
    GridRow& row = result.ledger[g];
    row.point = grid[g];
    row.scores.assign(scores.begin() + static_cast<std::ptrdiff_t>(g * problems.size()),
                      scores.begin() + static_cast<std::ptrdiff_t>((g + 1) * problems.size()));
    double sum = 0.0;
    for (double s : row.scores) sum += s;
    row.mean_rmse = sum / static_cast<double>(row.scores.size());
    if (g > 0 && better_candidate(row, result.ledger[result.best])) result.best = g;
  }
  return result;
}

void write_grid_csv(const GridResult& result, const std::filesystem::path& path) {
  CsvTable t;
  t.columns = {"layers", "width", "learning_rate", "epochs", "alpha", "l2_lambda", "w_low", "w_medium", "w_high"};
  for (const auto& name : result.problems) t.columns.push_back("rmse_" + name);
  t.columns.emplace_back("mean_rmse");
  t.columns.emplace_back("best");
  for (std::size_t g = 0; g < result.ledger.size(); ++g) {
    const auto& r = result.ledger[g];
    std::vector<std::string> cells{std::to_string(r.point.layers), std::to_string(r.point.width),
                                   format_double(r.point.learning_rate), std::to_string(r.point.epochs),
                                   format_double(r.point.alpha), format_double(r.point.l2_lambda),
                                   format_double(r.point.w_low), format_double(r.point.w_medium),
                                   format_double(r.point.w_high)};
    for (double s : r.scores) cells.push_back(format_double(s));
    cells.push_back(format_double(r.mean_rmse));
    cells.emplace_back(g == result.best ? "1" : "0");
    t.rows.push_back(std::move(cells));
  }
  write_csv(t, path);
}

}  // namespace mfs
