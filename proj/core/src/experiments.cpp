#include "mfs/experiments.hpp"

#include "mfs/csv.hpp"
#include "mfs/errors.hpp"
#include "mfs/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

namespace mfs {
namespace {

constexpr std::array<std::string_view, 4> kPairingNames{"lf+hf", "lf+mf", "mf+hf", "lf+mf+hf"};

std::vector<BudgetRow> build_budget_table() {
  using P = Pairing;
  return {
      {300, P::LfHf, {200, 0, 25}},     {300, P::LfMf, {200, 50, 0}},
      {300, P::MfHf, {0, 100, 25}},     {300, P::LfMfHf, {150, 50, 12}},
      {600, P::LfHf, {400, 0, 50}},     {600, P::LfMf, {400, 100, 0}},
      {600, P::MfHf, {0, 200, 50}},     {600, P::LfMfHf, {300, 100, 25}},
      {1200, P::LfHf, {800, 0, 100}},   {1200, P::LfMf, {800, 200, 0}},
      {1200, P::MfHf, {0, 400, 100}},   {1200, P::LfMfHf, {600, 200, 50}},
      {1800, P::LfHf, {1000, 0, 200}},  {1800, P::LfMf, {1000, 400, 0}},
      {1800, P::MfHf, {0, 500, 200}},   {1800, P::LfMfHf, {1000, 200, 100}},
  };
}

std::uint64_t level_stream(std::uint64_t seed, FidelityLevel level) {
  return seed * 0x9E3779B97F4A7C15ULL + 0xBF58476D1CE4E5B9ULL * (static_cast<std::uint64_t>(level) + 1);
}

std::vector<int> iota_vector(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::string run_key(const RunResult& r) {
  return std::string(to_string(r.method)) + "," + std::string(to_string(r.pairing)) + "," +
         std::to_string(r.budget) + "," + r.subset + "," + r.output + "," + std::to_string(r.seed);
}

struct RunTask {
  MethodId method;
  Pairing pairing;
  int budget;
  std::uint64_t seed;
};

RunResult execute(const RunTask& task, const FidelitySources& sources, const SplitPlan& plan,
                  const CostStudyConfig& config) {
  RunResult r;
  r.method = task.method;
  r.pairing = task.pairing;
  r.budget = task.budget;
  r.seed = task.seed;
  r.subset = config.subset;
  r.output = config.output;
  r.allocation = budget_for(task.pairing, task.budget);

  const auto levels = pairing_levels(task.pairing);
  std::vector<FidelityDataset> train;
  for (FidelityLevel level : levels) {
    std::vector<int> pool =
        select_training_rows(sources, plan, level, r.allocation.count(level), task.seed);
    train.push_back(sources.at(level).subset(pool));
    switch (level) {
      case FidelityLevel::LF:
        r.train_lf = std::move(pool);
        break;
      case FidelityLevel::MF:
        r.train_mf = std::move(pool);
        break;
      case FidelityLevel::HF:
        r.train_hf = std::move(pool);
        break;
    }
  }

  r.test_level = levels.back();
  r.test_rows = r.test_level == FidelityLevel::HF ? plan.hf.test : plan.mf.test;
  const FidelityDataset test = sources.at(r.test_level).subset(r.test_rows);
  r.truth = test.targets;

  MethodSettings settings = config.settings(task.method);
  settings.network.seed = task.seed;
  if (config.epochs) settings.network.epochs = *config.epochs;

  const auto start = std::chrono::steady_clock::now();
  try {
    const auto model = fit_method(task.method, settings, train);
    r.predictions = mf_predict(*model, test.inputs);
    r.flags = model->flags;
  } catch (const DivergenceError& e) {
    r.predictions = Vector::Constant(test.rows(), std::numeric_limits<double>::quiet_NaN());
    r.flags.push_back("diverged@" + std::to_string(e.epoch()));
  }
  r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (r.predictions.allFinite()) {
    r.rmse = rmse(r.predictions, r.truth);
    r.r2 = r2(r.predictions, r.truth);
  } else {
    r.rmse = std::numeric_limits<double>::quiet_NaN();
    r.r2 = std::numeric_limits<double>::quiet_NaN();
  }
  return r;
}

}  // namespace

std::string_view to_string(Pairing pairing) { return kPairingNames[static_cast<std::size_t>(pairing)]; }

Pairing parse_pairing(std::string_view name) {
  for (std::size_t i = 0; i < kPairingNames.size(); ++i) {
    if (kPairingNames[i] == name) return static_cast<Pairing>(i);
  }
  throw ConfigError("unknown pairing '" + std::string(name) + "' (valid: lf+hf, lf+mf, mf+hf, lf+mf+hf)");
}

std::vector<FidelityLevel> pairing_levels(Pairing pairing) {
  using L = FidelityLevel;
  switch (pairing) {
    case Pairing::LfHf:
      return {L::LF, L::HF};
    case Pairing::LfMf:
      return {L::LF, L::MF};
    case Pairing::MfHf:
      return {L::MF, L::HF};
    case Pairing::LfMfHf:
      return {L::LF, L::MF, L::HF};
  }
  return {};
}

int pairing_fidelity_count(Pairing pairing) { return static_cast<int>(pairing_levels(pairing).size()); }

int BudgetAllocation::count(FidelityLevel level) const {
  switch (level) {
    case FidelityLevel::LF:
      return n_lf;
    case FidelityLevel::MF:
      return n_mf;
    case FidelityLevel::HF:
      return n_hf;
  }
  return 0;
}

const std::vector<BudgetRow>& budget_table() {
  static const std::vector<BudgetRow> table = build_budget_table();
  return table;
}

std::string budget_table_csv() {
  std::ostringstream out;
  out << "budget,pairing,n_lf,n_mf,n_hf,total_cost\n";
  for (const auto& row : budget_table()) {
    const auto& a = row.allocation;
    out << row.budget << ',' << to_string(row.pairing) << ',' << a.n_lf << ',' << a.n_mf << ','
        << a.n_hf << ',' << a.total_cost() << '\n';
  }
  return out.str();
}

BudgetAllocation budget_for(Pairing pairing, int budget) {
  for (const auto& row : budget_table()) {
    if (row.pairing == pairing && row.budget == budget) return row.allocation;
  }
  throw ConfigError("no cost-matched allocation for budget " + std::to_string(budget) +
                    " (valid: 300, 600, 1200, 1800)");
}

std::vector<int> budget_totals() { return {300, 600, 1200, 1800}; }

Split make_split(int n_rows, SplitKind kind, std::uint64_t seed) {
  if (n_rows != kSplitRows) {
    throw ShapeError("split expects " + std::to_string(kSplitRows) + " rows, got " +
                     std::to_string(n_rows));
  }
  const int n_train = kind == SplitKind::Hf200_800 ? 200 : 500;
  std::vector<int> order = iota_vector(n_rows);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.test.assign(order.begin() + n_train, order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

const FidelityDataset& FidelitySources::at(FidelityLevel level) const {
  switch (level) {
    case FidelityLevel::LF:
      return lf;
    case FidelityLevel::MF:
      return mf;
    case FidelityLevel::HF:
      return hf;
  }
  return hf;
}

FidelityDataset& FidelitySources::at(FidelityLevel level) {
  return const_cast<FidelityDataset&>(std::as_const(*this).at(level));
}

SplitPlan make_split_plan(const FidelitySources& sources, std::uint64_t seed) {
  SplitPlan plan;
  plan.seed = seed;
  if (sources.has(FidelityLevel::HF)) {
    plan.hf = make_split(static_cast<int>(sources.hf.rows()), SplitKind::Hf200_800, seed);
  }
  if (sources.has(FidelityLevel::MF)) {
    plan.mf = make_split(static_cast<int>(sources.mf.rows()), SplitKind::Mf500_500, seed + 1);
  }
  return plan;
}

std::vector<int> select_training_rows(const FidelitySources& sources, const SplitPlan& plan,
                                      FidelityLevel level, int count, std::uint64_t seed) {
  std::vector<int> pool;
  if (level == FidelityLevel::HF) {
    pool = plan.hf.train;
  } else if (level == FidelityLevel::MF) {
    pool = plan.mf.train;
  } else {
    pool = iota_vector(static_cast<int>(sources.lf.rows()));
  }
  if (count < 0 || count > static_cast<int>(pool.size())) {
    throw AllocationError("requested " + std::to_string(count) + " " + std::string(to_string(level)) +
                          " training rows but the pool holds " + std::to_string(pool.size()));
  }
  std::mt19937_64 rng(level_stream(seed, level));
  std::shuffle(pool.begin(), pool.end(), rng);
  pool.resize(static_cast<std::size_t>(count));
  std::sort(pool.begin(), pool.end());
  return pool;
}

const std::vector<int>& RunResult::train_rows(FidelityLevel level) const {
  switch (level) {
    case FidelityLevel::LF:
      return train_lf;
    case FidelityLevel::MF:
      return train_mf;
    case FidelityLevel::HF:
      return train_hf;
  }
  return train_hf;
}

std::vector<RunResult> run_cost_study(const FidelitySources& sources, const SplitPlan& plan,
                                      const CostStudyConfig& config) {
  if (config.methods.empty()) throw ConfigError("cost study needs at least one method");
  if (config.seeds.empty()) throw ConfigError("cost study needs at least one seed");
  std::vector<RunTask> tasks;
  for (MethodId m : config.methods) {
    for (Pairing p : config.pairings) {
      if (method_fidelity_count(m) != pairing_fidelity_count(p)) {
        throw ConfigError(std::string(to_string(m)) + " is a " + std::to_string(method_fidelity_count(m)) +
                          "-fidelity method and cannot run the " + std::string(to_string(p)) + " pairing");
      }
      for (FidelityLevel level : pairing_levels(p)) {
        if (!sources.has(level)) {
          throw PreconditionError(std::string(to_string(p)) + " needs " + std::string(to_string(level)) +
                                  " data, which is missing");
        }
      }
      const auto top = pairing_levels(p).back();
      const Split& split = top == FidelityLevel::HF ? plan.hf : plan.mf;
      if (split.test.empty()) throw PreconditionError("split plan has no test rows for " + std::string(to_string(top)));
      for (int b : config.budgets) {
        const BudgetAllocation a = budget_for(p, b);
        if (a.n_mf > 0 && static_cast<std::size_t>(a.n_mf) > plan.mf.train.size()) {
          throw AllocationError("budget " + std::to_string(b) + " needs " + std::to_string(a.n_mf) +
                                " MF training rows; pool holds " + std::to_string(plan.mf.train.size()));
        }
        if (static_cast<std::size_t>(a.n_hf) > plan.hf.train.size()) {
          throw AllocationError("budget " + std::to_string(b) + " needs " + std::to_string(a.n_hf) +
                                " HF training rows; pool holds " + std::to_string(plan.hf.train.size()));
        }
        if (a.n_lf > sources.lf.rows()) {
          throw AllocationError("budget " + std::to_string(b) + " needs " + std::to_string(a.n_lf) +
                                " LF rows; file holds " + std::to_string(sources.lf.rows()));
        }
        for (std::uint64_t s : config.seeds) tasks.push_back({m, p, b, s});
      }
    }
  }

  std::vector<RunResult> results(tasks.size());
  parallel_for(tasks.size(), config.jobs,
               [&](std::size_t i) { results[i] = execute(tasks[i], sources, plan, config); });
  return results;
}

void write_results_csv(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  CsvTable t;
  t.columns = {"method", "pairing", "budget", "subset", "output", "seed", "rmse", "r2",
               "wall_time_s", "n_lf", "n_mf", "n_hf"};
  for (const auto& r : results) {
    t.rows.push_back({std::string(to_string(r.method)), std::string(to_string(r.pairing)),
                      std::to_string(r.budget), r.subset, r.output, std::to_string(r.seed),
                      format_double(r.rmse), format_double(r.r2), format_double(r.wall_time_s),
                      std::to_string(r.allocation.n_lf), std::to_string(r.allocation.n_mf),
                      std::to_string(r.allocation.n_hf)});
  }
  write_csv(t, path);
}

std::vector<RunResult> read_results_csv(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_method = t.column("method");
  const auto c_pairing = t.column("pairing");
  const auto c_budget = t.column("budget");
  const auto c_subset = t.column("subset");
  const auto c_output = t.column("output");
  const auto c_seed = t.column("seed");
  const auto c_rmse = t.column("rmse");
  const auto c_r2 = t.column("r2");
  const auto c_time = t.column("wall_time_s");
  const auto c_lf = t.column("n_lf");
  const auto c_mf = t.column("n_mf");
  const auto c_hf = t.column("n_hf");
  auto number = [](const std::string& cell, std::size_t row, const std::string& col) {
    if (cell == "nan" || cell == "-nan") return std::numeric_limits<double>::quiet_NaN();
    return parse_cell(cell, row, col);
  };
  std::vector<RunResult> out;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    RunResult r;
    const auto method = parse_method(row[c_method]);
    if (!method) throw SchemaError("row " + std::to_string(i + 1) + ": unknown method '" + row[c_method] + "'");
    r.method = *method;
    r.pairing = parse_pairing(row[c_pairing]);
    r.budget = static_cast<int>(parse_cell(row[c_budget], i, "budget"));
    r.subset = row[c_subset];
    r.output = row[c_output];
    r.seed = static_cast<std::uint64_t>(parse_cell(row[c_seed], i, "seed"));
    r.rmse = number(row[c_rmse], i, "rmse");
    r.r2 = number(row[c_r2], i, "r2");
    r.wall_time_s = parse_cell(row[c_time], i, "wall_time_s");
    r.allocation = {static_cast<int>(parse_cell(row[c_lf], i, "n_lf")),
                    static_cast<int>(parse_cell(row[c_mf], i, "n_mf")),
                    static_cast<int>(parse_cell(row[c_hf], i, "n_hf"))};
    out.push_back(std::move(r));
  }
  return out;
}

void write_indices_csv(const std::vector<RunResult>& results, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << "method,pairing,budget,subset,output,seed,role,level,row\n";
  for (const auto& r : results) {
    const std::string key = run_key(r);
    for (FidelityLevel level : {FidelityLevel::LF, FidelityLevel::MF, FidelityLevel::HF}) {
      for (int row : r.train_rows(level)) out << key << ",train," << to_string(level) << ',' << row << '\n';
    }
    for (int row : r.test_rows) out << key << ",test," << to_string(r.test_level) << ',' << row << '\n';
  }
  if (!out) throw SchemaError("failed writing " + path.string());
}

void write_split_csv(const SplitPlan& plan, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SchemaError("cannot write " + path.string());
  out << "level,role,row\n";
  for (int row : plan.hf.train) out << "hf,train," << row << '\n';
  for (int row : plan.hf.test) out << "hf,test," << row << '\n';
  for (int row : plan.mf.train) out << "mf,train," << row << '\n';
  for (int row : plan.mf.test) out << "mf,test," << row << '\n';
}

LeakReport check_indices_ledger(const std::filesystem::path& path) {
  const CsvTable t = read_csv(path);
  const auto c_role = t.column("role");
  const auto c_level = t.column("level");
  const auto c_row = t.column("row");
  const std::vector<std::size_t> key_cols{t.column("method"), t.column("pairing"), t.column("budget"),
                                          t.column("subset"), t.column("output"), t.column("seed")};
  // (run, level) -> train rows / test rows
  std::map<std::pair<std::string, std::string>, std::pair<std::set<std::string>, std::set<std::string>>> runs;
  std::set<std::string> keys;
  for (const auto& row : t.rows) {
    std::string key;
    for (auto c : key_cols) key += row[c] + ",";
    keys.insert(key);
    auto& slot = runs[{key, row[c_level]}];
    if (row[c_role] == "train") {
      slot.first.insert(row[c_row]);
    } else if (row[c_role] == "test") {
      slot.second.insert(row[c_row]);
    } else {
      throw SchemaError("unknown role '" + row[c_role] + "' in " + path.string());
    }
  }
  LeakReport report;
  report.runs_checked = keys.size();
  for (const auto& [k, sets] : runs) {
    for (const auto& r : sets.first) report.overlapping_rows += sets.second.count(r);
  }
  return report;
}

LeakReport check_leakage(const std::vector<RunResult>& results) {
  LeakReport report;
  for (const auto& r : results) {
    ++report.runs_checked;
    const auto& train = r.train_rows(r.test_level);
    const std::set<int> test(r.test_rows.begin(), r.test_rows.end());
    for (int row : train) report.overlapping_rows += test.count(row);
  }
  return report;
}

void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      while (true) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          task(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace mfs
