#include "mfs/benchmarks.hpp"
#include "mfs/errors.hpp"
#include "mfs/experiments.hpp"
#include "mfs/grid_search.hpp"
#include "mfs/metrics.hpp"
#include "mfs/report.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <limits>
#include <set>

namespace mfs {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mfs_exp_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

FidelitySources bench_sources(const char* name, std::uint64_t seed) {
  const BenchmarkSpec spec = benchmark_by_name(name);
  FidelitySources s;
  s.lf = make_dataset(spec, FidelityLevel::LF, sample_uniform(spec, 1000, seed));
  s.hf = make_dataset(spec, FidelityLevel::HF, sample_uniform(spec, 1000, seed + 1));
  if (spec.levels == 3) s.mf = make_dataset(spec, FidelityLevel::MF, sample_uniform(spec, 1000, seed + 2));
  return s;
}

MethodSettings tiny(MethodId id) {
  MethodSettings s = default_settings(id);
  s.network.layer_widths = {8, 8};
  s.network.epochs = 30;
  s.gp.restarts = 1;
  return s;
}

TEST(Metrics, Rmse) {
  Vector a(2), b(2);
  a << 0, 0;
  b << 3, 4;
  EXPECT_NEAR(rmse(a, b), std::sqrt(12.5), 1e-15);
  EXPECT_EQ(rmse(b, b), 0.0);
  EXPECT_NEAR(rmse((b.array() + 0.25).matrix(), b), 0.25, 1e-15);
  EXPECT_THROW(rmse(Vector(2), Vector(3)), MetricError);
  EXPECT_THROW(rmse(Vector(0), Vector(0)), MetricError);
}

TEST(Metrics, R2) {
  Vector t(2), p(2);
  t << 0, 1;
  p << 2, -1;
  EXPECT_NEAR(r2(p, t), -15.0, 1e-12);
  EXPECT_EQ(r2(t, t), 1.0);
  EXPECT_NEAR(r2(Vector::Constant(2, 0.5), t), 0.0, 1e-15);
  EXPECT_THROW(r2(t, Vector::Constant(2, 1.0)), MetricError);
}

TEST(Budget, TableMatchesCostMatchedRows) {
  const std::string expected =
      "budget,pairing,n_lf,n_mf,n_hf,total_cost\n"
      "300,lf+hf,200,0,25,300\n300,lf+mf,200,50,0,300\n300,mf+hf,0,100,25,300\n300,lf+mf+hf,150,50,12,298\n"
      "600,lf+hf,400,0,50,600\n600,lf+mf,400,100,0,600\n600,mf+hf,0,200,50,600\n600,lf+mf+hf,300,100,25,600\n"
      "1200,lf+hf,800,0,100,1200\n1200,lf+mf,800,200,0,1200\n1200,mf+hf,0,400,100,1200\n"
      "1200,lf+mf+hf,600,200,50,1200\n"
      "1800,lf+hf,1000,0,200,1800\n1800,lf+mf,1000,400,0,1800\n1800,mf+hf,0,500,200,1800\n"
      "1800,lf+mf+hf,1000,200,100,1800\n";
  EXPECT_EQ(budget_table_csv(), expected);
  EXPECT_EQ(budget_table().size(), 16u);
  for (const auto& row : budget_table()) {
    const auto& a = row.allocation;
    EXPECT_EQ(a.total_cost(), a.n_lf + 2 * a.n_mf + 4 * a.n_hf);
  }
}

TEST(Budget, Lookups) {
  EXPECT_EQ(budget_for(Pairing::LfHf, 300), (BudgetAllocation{200, 0, 25}));
  EXPECT_EQ(budget_for(Pairing::LfMfHf, 300).total_cost(), 298);
  EXPECT_EQ(budget_for(Pairing::MfHf, 1800), (BudgetAllocation{0, 500, 200}));
  EXPECT_THROW(budget_for(Pairing::LfHf, 450), ConfigError);
  EXPECT_EQ(budget_totals(), (std::vector<int>{300, 600, 1200, 1800}));
  EXPECT_THROW(parse_pairing("hf+lf"), ConfigError);
  EXPECT_EQ(pairing_levels(Pairing::LfMf).back(), FidelityLevel::MF);
}

TEST(Split, DisjointCoveringAndDeterministic) {
  for (auto [kind, n_train] : {std::pair{SplitKind::Hf200_800, 200}, std::pair{SplitKind::Mf500_500, 500}}) {
    const Split s = make_split(1000, kind, 42);
    EXPECT_EQ(static_cast<int>(s.train.size()), n_train);
    EXPECT_EQ(static_cast<int>(s.test.size()), 1000 - n_train);
    std::set<int> all(s.train.begin(), s.train.end());
    for (int t : s.test) EXPECT_TRUE(all.insert(t).second) << t;
    EXPECT_EQ(all.size(), 1000u);
    EXPECT_EQ(*all.begin(), 0);
    EXPECT_EQ(*all.rbegin(), 999);
    const Split again = make_split(1000, kind, 42);
    EXPECT_EQ(s.train, again.train);
    EXPECT_EQ(s.test, again.test);
  }
  EXPECT_NE(make_split(1000, SplitKind::Hf200_800, 1).train, make_split(1000, SplitKind::Hf200_800, 2).train);
  EXPECT_THROW(make_split(999, SplitKind::Hf200_800, 0), ShapeError);
}

TEST(Split, TrainingRowsAreNestedAndInsidePool) {
  const FidelitySources s = bench_sources("forrester3f", 1);
  const SplitPlan plan = make_split_plan(s, 3);
  const auto small = select_training_rows(s, plan, FidelityLevel::HF, 25, 9);
  const auto large = select_training_rows(s, plan, FidelityLevel::HF, 100, 9);
  EXPECT_TRUE(std::includes(large.begin(), large.end(), small.begin(), small.end()));
  EXPECT_TRUE(std::is_sorted(large.begin(), large.end()));
  const std::set<int> pool(plan.hf.train.begin(), plan.hf.train.end());
  for (int r : large) EXPECT_TRUE(pool.count(r)) << r;
  EXPECT_THROW(select_training_rows(s, plan, FidelityLevel::HF, 201, 9), AllocationError);
  EXPECT_THROW(select_training_rows(s, plan, FidelityLevel::MF, 501, 9), AllocationError);
  EXPECT_EQ(select_training_rows(s, plan, FidelityLevel::LF, 1000, 9).size(), 1000u);
}

TEST(CostStudy, CardinalityAndLeakage) {
  const FidelitySources s = bench_sources("forrester3f", 2);
  const SplitPlan plan = make_split_plan(s, 0);
  CostStudyConfig cfg;
  cfg.methods = {MethodId::Delta, MethodId::Flag};
  cfg.pairings = {Pairing::LfHf, Pairing::LfMf, Pairing::MfHf};
  cfg.budgets = {300, 600};
  cfg.seeds = {0, 1};
  cfg.settings = tiny;
  cfg.jobs = 2;
  const auto results = run_cost_study(s, plan, cfg);
  ASSERT_EQ(results.size(), 2u * 3u * 2u * 2u);
  const LeakReport leak = check_leakage(results);
  EXPECT_EQ(leak.runs_checked, results.size());
  EXPECT_EQ(leak.overlapping_rows, 0u);
  for (const auto& r : results) {
    EXPECT_GE(r.rmse, 0.0);
    EXPECT_LE(r.r2, 1.0);
    EXPECT_GT(r.wall_time_s, 0.0);
    EXPECT_NEAR(r.rmse, rmse(r.predictions, r.truth), 1e-12);
    EXPECT_NEAR(r.r2, r2(r.predictions, r.truth), 1e-12);
    const FidelityLevel top = pairing_levels(r.pairing).back();
    EXPECT_EQ(r.test_level, top);
    EXPECT_EQ(r.test_rows.size(), top == FidelityLevel::HF ? 800u : 500u);
    EXPECT_EQ(r.allocation, budget_for(r.pairing, r.budget));
    EXPECT_EQ(static_cast<int>(r.train_hf.size()), r.allocation.n_hf);
  }
  const fs::path dir = scratch("leak");
  write_indices_csv(results, dir / "idx.csv");
  const LeakReport ledger = check_indices_ledger(dir / "idx.csv");
  EXPECT_EQ(ledger.runs_checked, results.size());
  EXPECT_EQ(ledger.overlapping_rows, 0u);
}

TEST(CostStudy, ParallelMatchesSerial) {
  const FidelitySources s = bench_sources("forrester2f", 3);
  const SplitPlan plan = make_split_plan(s, 0);
  CostStudyConfig cfg;
  cfg.methods = {MethodId::Delta, MethodId::Intermediate};
  cfg.budgets = {300, 600};
  cfg.settings = tiny;
  const auto serial = run_cost_study(s, plan, cfg);
  cfg.jobs = 3;
  const auto parallel = run_cost_study(s, plan, cfg);
  ASSERT_EQ(serial.size(), parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].method, parallel[i].method);
    EXPECT_EQ(serial[i].rmse, parallel[i].rmse);
  }
}

TEST(CostStudy, FullGridEmitsSixteenRowsPerMethod) {
  const FidelitySources s = bench_sources("forrester3f", 4);
  const SplitPlan plan = make_split_plan(s, 0);
  CostStudyConfig cfg;
  cfg.methods = {MethodId::Flag};
  cfg.pairings = {Pairing::LfHf, Pairing::LfMf, Pairing::MfHf};
  cfg.settings = [](MethodId id) {
    MethodSettings m = tiny(id);
    m.network.epochs = 2;
    return m;
  };
  auto two = run_cost_study(s, plan, cfg);
  cfg.methods = {MethodId::Flag3f};
  cfg.pairings = {Pairing::LfMfHf};
  const auto three = run_cost_study(s, plan, cfg);
  EXPECT_EQ(two.size() + three.size(), 16u);
}

TEST(CostStudy, Errors) {
  const FidelitySources s = bench_sources("forrester2f", 5);
  const SplitPlan plan = make_split_plan(s, 0);
  CostStudyConfig cfg;
  cfg.methods = {MethodId::Delta};
  cfg.pairings = {Pairing::LfMfHf};
  cfg.settings = tiny;
  EXPECT_THROW(run_cost_study(s, plan, cfg), ConfigError);
  cfg.pairings = {Pairing::LfMf};
  EXPECT_THROW(run_cost_study(s, plan, cfg), PreconditionError);
  FidelitySources small = s;
  small.lf = small.lf.subset({0, 1, 2, 3, 4});
  cfg.pairings = {Pairing::LfHf};
  cfg.budgets = {300};
  EXPECT_THROW(run_cost_study(small, plan, cfg), AllocationError);
}

TEST(CostStudy, LedgerRoundTrip) {
  const FidelitySources s = bench_sources("booth2f", 6);
  const SplitPlan plan = make_split_plan(s, 0);
  CostStudyConfig cfg;
  cfg.methods = {MethodId::TwoStep};
  cfg.budgets = {300};
  cfg.seeds = {4, 5};
  cfg.settings = tiny;
  const auto results = run_cost_study(s, plan, cfg);
  const fs::path dir = scratch("ledger");
  write_results_csv(results, dir / "results.csv");
  const auto back = read_results_csv(dir / "results.csv");
  ASSERT_EQ(back.size(), results.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].rmse, results[i].rmse);
    EXPECT_EQ(back[i].r2, results[i].r2);
    EXPECT_EQ(back[i].seed, results[i].seed);
    EXPECT_EQ(back[i].allocation, results[i].allocation);
  }
}

GridEvaluator scripted(std::function<double(const MethodSettings&)> f) {
  return [f](MethodId, const MethodSettings& s, const TuningProblem&) { return f(s); };
}

TEST(GridSearch, Cardinalities) {
  const GridSpec spec;
  const GridPoint base;
  EXPECT_EQ(expand_grid(spec, GridStage::Base, base).size(), 36u);
  EXPECT_EQ(expand_grid(spec, GridStage::AlphaLambda, base).size(), 36u);
  const auto w = expand_grid(spec, GridStage::Weights3f, base);
  ASSERT_EQ(w.size(), 18u);
  for (const auto& p : w) {
    EXPECT_NEAR(p.w_low + p.w_medium + p.w_high, 1.0, 1e-12);
    EXPECT_GE(p.w_low, 0.0);
  }
  for (const auto& p : expand_grid(spec, GridStage::Base, base)) EXPECT_EQ(p.epochs, 500);
}

TEST(GridSearch, StageValidation) {
  EXPECT_THROW(validate_stage(MethodId::Delta, GridStage::AlphaLambda), ConfigError);
  EXPECT_THROW(validate_stage(MethodId::Intermediate, GridStage::Weights3f), ConfigError);
  EXPECT_THROW(validate_stage(MethodId::MfGp, GridStage::Base), ConfigError);
  EXPECT_NO_THROW(validate_stage(MethodId::GpMimic3f, GridStage::Weights3f));
  EXPECT_NO_THROW(validate_stage(MethodId::Intermediate, GridStage::AlphaLambda));
}

TEST(GridSearch, SingleConfigurationAndDivergence) {
  const std::vector<TuningProblem> problems(1);
  const MethodSettings base = default_settings(MethodId::Flag);
  GridPoint only;
  only.layers = 3;
  const auto one = grid_search(MethodId::Flag, GridStage::Base, {only}, problems, base,
                               scripted([](const MethodSettings&) { return 0.5; }));
  EXPECT_EQ(one.ledger.size(), 1u);
  EXPECT_EQ(one.winner().point.layers, 3);

  GridPoint a, b;
  a.width = 16;
  b.width = 32;
  const auto div = grid_search(MethodId::Flag, GridStage::Base, {a, b}, problems, base,
                               scripted([](const MethodSettings& s) -> double {
                                 if (s.network.layer_widths.front() == 16) throw DivergenceError(3, "boom");
                                 return 2.0;
                               }));
  EXPECT_EQ(div.winner().point.width, 32);
  EXPECT_TRUE(std::isinf(div.ledger[0].mean_rmse));

  const auto nan = grid_search(MethodId::Flag, GridStage::Base, {a, b}, problems, base,
                               scripted([](const MethodSettings& s) {
                                 return s.network.layer_widths.front() == 32 ? std::nan("") : 1.0;
                               }));
  EXPECT_EQ(nan.winner().point.width, 16);
  EXPECT_THROW(grid_search(MethodId::Flag, GridStage::Base, {}, problems, base), PreconditionError);
}

TEST(GridSearch, TieBreakPrefersCheaperModels) {
  GridRow small, big;
  small.mean_rmse = big.mean_rmse = 1.0;
  small.point.layers = 2;
  big.point.layers = 3;
  EXPECT_TRUE(better_candidate(small, big));
  big.point.layers = 2;
  small.point.width = 16;
  big.point.width = 32;
  EXPECT_TRUE(better_candidate(small, big));
  big.point.width = 16;
  small.point.learning_rate = 1e-3;
  big.point.learning_rate = 1e-4;
  EXPECT_TRUE(better_candidate(small, big));
  EXPECT_FALSE(better_candidate(big, small));
  big.mean_rmse = 0.9;
  EXPECT_TRUE(better_candidate(big, small));
}

TEST(GridSearch, BaseGridOverSixBenchmarks) {
  std::vector<TuningProblem> problems;
  for (const char* name : {"forrester2f", "booth2f", "branin2f", "park91a2f", "hartmann6_2f", "borehole2f"}) {
    const FidelitySources s = bench_sources(name, 7);
    problems.push_back(make_tuning_problem(name, s, make_split_plan(s, 0), Pairing::LfHf, 300, 0));
  }
  EXPECT_EQ(problems[0].train.size(), 2u);
  EXPECT_EQ(problems[0].train[1].rows(), 25);
  EXPECT_EQ(problems[0].validation.rows(), 800);
  const GridSpec spec;
  const MethodSettings base = default_settings(MethodId::Flag);
  const auto grid = expand_grid(spec, GridStage::Base, point_from_settings(base));
  // A deterministic surrogate score keeps this exhaustive scan fast.
  const auto result = grid_search(MethodId::Flag, GridStage::Base, grid, problems, base,
                                  [](MethodId, const MethodSettings& s, const TuningProblem& p) {
                                    return std::abs(std::log(s.network.learning_rate) + 7.0) +
                                           0.01 * static_cast<double>(s.network.layer_widths.size()) +
                                           1e-4 * static_cast<double>(p.name.size());
                                  }, 2);
  ASSERT_EQ(result.ledger.size(), 36u);
  for (const auto& row : result.ledger) {
    EXPECT_EQ(row.scores.size(), 6u);
    EXPECT_LE(result.winner().mean_rmse, row.mean_rmse);
  }
  const fs::path dir = scratch("grid");
  write_grid_csv(result, dir / "grid.csv");
  std::ifstream in(dir / "grid.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 37);
}

TEST(GridSearch, RealEvaluatorOnTinyGrid) {
  const FidelitySources s = bench_sources("forrester2f", 8);
  const std::vector<TuningProblem> problems{
      make_tuning_problem("forrester2f", s, make_split_plan(s, 0), Pairing::LfHf, 300, 0)};
  const MethodSettings base = tiny(MethodId::Intermediate);
  GridSpec spec;
  spec.alphas = {0.1, 0.5};
  spec.lambdas = {1e-5};
  const auto grid = expand_grid(spec, GridStage::AlphaLambda, point_from_settings(base));
  const auto result = grid_search(MethodId::Intermediate, GridStage::AlphaLambda, grid, problems, base);
  ASSERT_EQ(result.ledger.size(), 2u);
  for (const auto& row : result.ledger) EXPECT_TRUE(std::isfinite(row.mean_rmse));
}

TEST(Report, MarkdownHasOneRowPerMethodBudget) {
  std::vector<RunResult> runs;
  for (MethodId m : {MethodId::MfGp, MethodId::Delta}) {
    for (int budget : {300, 600}) {
      for (std::uint64_t seed : {0u, 1u, 2u}) {
        RunResult r;
        r.method = m;
        r.budget = budget;
        r.seed = seed;
        r.rmse = 0.1 * static_cast<double>(seed + 1);
        r.r2 = 0.9;
        r.wall_time_s = 1.0;
        r.allocation = budget_for(Pairing::LfHf, budget);
        runs.push_back(r);
      }
    }
  }
  const auto rows = summarize(runs);
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_NEAR(rows[0].rmse, 0.2, 1e-15);
  EXPECT_EQ(rows[0].seeds, 3);
  const std::string md = render_markdown(rows);
  std::istringstream in(md);
  std::string line;
  int data_rows = 0;
  while (std::getline(in, line)) {
    if (line.rfind("| mfgp", 0) == 0 || line.rfind("| delta", 0) == 0) {
      ++data_rows;
      int numeric = 0;
      std::stringstream cells(line);
      std::string cell;
      while (std::getline(cells, cell, '|')) {
        const auto b = cell.find_first_not_of(' ');
        if (b == std::string::npos) continue;
        char* end = nullptr;
        const std::string t = cell.substr(b, cell.find_last_not_of(' ') - b + 1);
        std::strtod(t.c_str(), &end);
        if (end && *end == '\0') ++numeric;
      }
      EXPECT_EQ(numeric, 7) << line;  // budget plus the six metric and count cells
    }
  }
  EXPECT_EQ(data_rows, 4);
  EXPECT_NE(render_svg(rows).find("<svg"), std::string::npos);
  EXPECT_TRUE(std::isnan(median({})));
  EXPECT_EQ(median({3.0, 1.0, 2.0, 10.0}), 2.5);
}

}  // namespace
}  // namespace mfs
